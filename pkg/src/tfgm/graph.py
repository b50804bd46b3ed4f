"""Pixel graphs over a time-frequency modulus and their connected components.

Every pixel of the modulus matrix ``A`` is a vertex. Two pixels are joined
when they lie within an l^p ball of radius ``r`` of each other and the
threshold criterion holds for their values. The connected components,
ordered by edge count, are the separated time-frequency domains.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .noise import ThresholdSpec

NORMS = (1, 2, np.inf)


@dataclass(frozen=True)
class GraphConfig:
    threshold: ThresholdSpec
    r: int = 2
    p: float = 1

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 1:
            raise ValueError("r must be a positive integer")
        if self.p not in NORMS:
            raise ValueError(f"p must be one of {NORMS}")


@dataclass(frozen=True)
class Component:
    pixels: np.ndarray  # (k, 2) array of (row, col), row-major sorted
    edge_count: int
    total_energy: float

    @property
    def size(self) -> int:
        return len(self.pixels)


@dataclass(frozen=True)
class ComponentSet:
    components: list[Component]
    dims: tuple[int, int]

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def labels(self) -> np.ndarray:
        """Label image: component ``i`` painted as ``i + 1``, background 0."""
        out = np.zeros(self.dims, dtype=np.int64)
        for i, c in enumerate(self.components):
            out[c.pixels[:, 0], c.pixels[:, 1]] = i + 1
        return out

    def partition(self) -> set[frozenset[int]]:
        """Components as sets of flat pixel indices (order-free comparison)."""
        ncol = self.dims[1]
        return {frozenset((c.pixels[:, 0] * ncol + c.pixels[:, 1]).tolist()) for c in self.components}


class DisjointSet:
    """Array-backed disjoint-set forest.

    Parents always point to a smaller index, so hooking a root under the
    smallest root it is joined to can never create a cycle.
    """

    def __init__(self, n: int):
        self.parent = np.arange(n)

    def find(self, a: int) -> int:
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return int(a)

    def union(self, a: int, b: int) -> bool:
        a, b = self.find(a), self.find(b)
        if a == b:
            return False
        lo, hi = min(a, b), max(a, b)
        self.parent[hi] = lo
        return True

    def _compress(self) -> None:
        parent = self.parent
        while True:
            grand = parent[parent]
            if np.array_equal(grand, parent):
                break
            parent = grand
        self.parent = parent

    def union_pairs(self, u: np.ndarray, v: np.ndarray) -> None:
        """Union all pairs at once: hook roots to their smallest partner, compress, repeat."""
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        self._compress()
        while u.size:
            ru, rv = self.parent[u], self.parent[v]
            live = ru != rv
            if not live.any():
                break
            ru, rv = ru[live], rv[live]
            u, v = u[live], v[live]
            np.minimum.at(self.parent, np.maximum(ru, rv), np.minimum(ru, rv))
            self._compress()

    def roots(self) -> np.ndarray:
        self._compress()
        return self.parent.copy()


def ball_offsets(r: int, p: float) -> np.ndarray:
    """Offsets ``(di, dj)`` with ``0 < ||(di, dj)||_p <= r`` in the forward half-plane.

    Only one of each ``+/-`` pair is kept so every undirected edge appears once.
    """
    d = np.arange(-r, r + 1)
    di, dj = np.meshgrid(d, d, indexing="ij")
    di, dj = di.ravel(), dj.ravel()
    if p == 1:
        dist = np.abs(di) + np.abs(dj)
    elif p == 2:
        dist = np.sqrt(di**2 + dj**2)
    else:
        dist = np.maximum(np.abs(di), np.abs(dj))
    forward = (di > 0) | ((di == 0) & (dj > 0))
    keep = forward & (dist <= r + 1e-12)
    return np.stack([di[keep], dj[keep]], axis=1)


def edges(A: np.ndarray, cfg: GraphConfig) -> tuple[np.ndarray, np.ndarray]:
    """All qualifying edges as flat pixel index pairs ``(u, v)`` with ``u < v``.

    Pixels with zero value never carry an edge, so a zero threshold does not
    connect an empty plane.
    """
    A = np.asarray(A, dtype=float)
    rows, cols = A.shape
    tau = cfg.threshold.tau
    product = cfg.threshold.criterion == "product"
    flat = np.arange(A.size).reshape(A.shape)
    us, vs = [], []
    for di, dj in ball_offsets(cfg.r, cfg.p):
        # a = A[i, j], b = A[i + di, j + dj]
        i0, i1 = 0, rows - di
        j0, j1 = max(0, -dj), min(cols, cols - dj)
        if i1 <= i0 or j1 <= j0:
            continue
        a = A[i0:i1, j0:j1]
        b = A[i0 + di:i1 + di, j0 + dj:j1 + dj]
        if product:
            ok = a * b >= tau
        else:
            ok = np.minimum(a, b) >= tau
        ok &= (a > 0) & (b > 0)
        us.append(flat[i0:i1, j0:j1][ok])
        vs.append(flat[i0 + di:i1 + di, j0 + dj:j1 + dj][ok])
    if not us:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    return np.concatenate(us), np.concatenate(vs)


def connected_components(n_vertices: int, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Root label per vertex from union-find over the edge list."""
    ds = DisjointSet(n_vertices)
    ds.union_pairs(u, v)
    return ds.roots()


Partitioner = Callable[[int, np.ndarray, np.ndarray], np.ndarray]


def build_components(A: np.ndarray, cfg: GraphConfig,
                     partition: Partitioner = connected_components) -> ComponentSet:
    """Group the pixels of ``A`` into edge-connected components.

    ``partition`` maps ``(n_vertices, u, v)`` to a label per vertex; the default
    is plain connected components. Vertices without any incident edge are
    dropped. Components are sorted by edge count (descending), then by total
    energy ``sum A**2`` (descending), then by smallest pixel index.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError("A must be a matrix")
    if np.any(A < 0):
        raise ValueError("A must be non-negative")
    u, v = edges(A, cfg)
    if u.size == 0:
        return ComponentSet([], A.shape)

    # compress to the vertices that carry edges
    touched, inv = np.unique(np.concatenate([u, v]), return_inverse=True)
    cu, cv = inv[: u.size], inv[u.size:]
    labels = np.asarray(partition(touched.size, cu, cv))
    _, comp = np.unique(labels, return_inverse=True)
    ncomp = comp.max() + 1

    edge_count = np.bincount(comp[cu], minlength=ncomp)
    energy = np.bincount(comp, weights=A.ravel()[touched] ** 2, minlength=ncomp)
    first_pixel = np.full(ncomp, np.iinfo(np.int64).max)
    np.minimum.at(first_pixel, comp, touched)
    order = np.lexsort((first_pixel, -energy, -edge_count))

    ncol = A.shape[1]
    by_comp = np.argsort(comp, kind="stable")
    bounds = np.searchsorted(comp[by_comp], np.arange(ncomp + 1))
    out = []
    for k in order:
        flat = touched[by_comp[bounds[k]:bounds[k + 1]]]
        pix = np.stack([flat // ncol, flat % ncol], axis=1)
        out.append(Component(pix, int(edge_count[k]), float(energy[k])))
    return ComponentSet(out, A.shape)


def component_to_mask(c: Component, dims_full: tuple[int, int]) -> np.ndarray:
    """Boolean ``M x N`` mask at the component pixels and their conjugate bins."""
    M, N = dims_full
    pix = np.asarray(c.pixels if isinstance(c, Component) else c, dtype=np.int64).reshape(-1, 2)
    rows, cols = pix[:, 0], pix[:, 1]
    if np.any(rows < 0) or np.any(rows > M // 2) or np.any(cols < 0) or np.any(cols >= N):
        raise ValueError("component pixel outside the half-spectrum")
    mask = np.zeros((M, N), dtype=bool)
    mask[rows, cols] = True
    mask[(M - rows) % M, cols] = True
    return mask


@dataclass(frozen=True)
class SelectionPolicy:
    """Exactly one of ``top_k``, ``min_edges``, ``min_energy_fraction`` (or none)."""

    top_k: int | None = None
    min_edges: int | None = None
    min_energy_fraction: float | None = None

    def __post_init__(self):
        given = [x is not None for x in (self.top_k, self.min_edges, self.min_energy_fraction)]
        if sum(given) > 1:
            raise ValueError("choose a single selection rule")
        if self.top_k is not None and self.top_k < 0:
            raise ValueError("top_k must be non-negative")
        if self.min_energy_fraction is not None and not 0 <= self.min_energy_fraction <= 1:
            raise ValueError("min_energy_fraction must lie in [0, 1]")

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


def select_components(cs: ComponentSet, policy: SelectionPolicy | dict) -> ComponentSet:
    if isinstance(policy, dict):
        policy = SelectionPolicy(**policy)
    comps = cs.components
    if policy.top_k is not None:
        comps = comps[: policy.top_k]
    elif policy.min_edges is not None:
        comps = [c for c in comps if c.edge_count >= policy.min_edges]
    elif policy.min_energy_fraction is not None:
        total = sum(c.total_energy for c in comps)
        comps = [c for c in comps if total > 0 and c.total_energy >= policy.min_energy_fraction * total]
    return ComponentSet(list(comps), cs.dims)
