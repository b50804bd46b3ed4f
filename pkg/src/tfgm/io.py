"""Plain file formats: signal CSV/WAV, PGM heatmaps, PBM masks, component CSVs.

Every writer goes through :func:`atomic_write`, so a failed write never
leaves a partial file behind.
"""

from __future__ import annotations

import contextlib
import csv
import hashlib
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .signals import Signal


@contextlib.contextmanager
def atomic_write(path, mode="w", **kwargs):
    """Write to a temporary sibling file and rename it over ``path`` on success."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, mode, **kwargs) as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_json(path, obj) -> None:
    with atomic_write(path) as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


# -- signals -----------------------------------------------------------------

def write_signal_csv(sig: Signal, path) -> None:
    with atomic_write(path, newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time", "amplitude"])
        for t, a in zip(sig.times, sig.samples):
            w.writerow([repr(float(t)), repr(float(a))])


def read_signal_csv(path) -> Signal:
    """Read a two-column ``time,amplitude`` CSV (header optional)."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if rows and not _is_number(rows[0][0]):
        rows = rows[1:]
    if not rows:
        raise ValueError(f"{path}: no samples")
    try:
        data = np.array([[float(v) for v in r[:2]] for r in rows])
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    if data.shape[1] == 1:
        return Signal(data[:, 0], 1.0, Path(path).stem)
    dt = float(np.median(np.diff(data[:, 0]))) if len(data) > 1 else 1.0
    return Signal(data[:, 1], dt, Path(path).stem)


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def write_signal_wav(sig: Signal, path, bits: int = 16) -> float:
    """Write a WAV file; returns the scale factor applied to the samples.

    16-bit output is peak-normalized to full scale; 32-bit output stores
    float32 samples unscaled. The sample rate is ``round(1/dt)``.
    """
    rate = max(1, int(round(1.0 / sig.dt)))
    if bits == 16:
        peak = float(np.max(np.abs(sig.samples)))
        scale = 32767.0 / peak if peak > 0 else 1.0
        data = np.round(sig.samples * scale).astype(np.int16)
    elif bits == 32:
        scale = 1.0
        data = sig.samples.astype(np.float32)
    else:
        raise ValueError("bits must be 16 or 32")
    buf = io.BytesIO()
    wavfile.write(buf, rate, data)
    with atomic_write(path, "wb") as fh:
        fh.write(buf.getvalue())
    return scale


def read_signal_wav(path) -> Signal:
    rate, data = wavfile.read(path)
    if data.ndim > 1:
        data = data[:, 0]
    if data.dtype == np.int16:
        x = data.astype(float) / 32767.0
    elif data.dtype == np.int32:
        x = data.astype(float) / 2147483647.0
    else:
        x = data.astype(float)
    return Signal(x, 1.0 / rate, Path(path).stem)


def read_signal(path) -> Signal:
    path = Path(path)
    if path.suffix.lower() == ".wav":
        return read_signal_wav(path)
    return read_signal_csv(path)


# -- images ------------------------------------------------------------------

def modulus_to_gray(A: np.ndarray) -> np.ndarray:
    """Linear map of ``[0, max]`` onto ``0..255``; row 0 (DC) ends up at the bottom."""
    A = np.asarray(A, dtype=float)
    peak = A.max() if A.size else 0.0
    gray = np.zeros(A.shape, dtype=np.uint8) if peak <= 0 else np.round(255.0 * A / peak).astype(np.uint8)
    return gray[::-1]


def write_pgm(A: np.ndarray, path) -> None:
    gray = modulus_to_gray(A)
    h, w = gray.shape
    with atomic_write(path) as fh:
        fh.write(f"P2\n{w} {h}\n255\n")
        for row in gray:
            fh.write(" ".join(map(str, row.tolist())) + "\n")


def read_pgm(path) -> np.ndarray:
    tokens = Path(path).read_text().split()
    if tokens[0] != "P2":
        raise ValueError("not a plain PGM file")
    w, h = int(tokens[1]), int(tokens[2])
    return np.array(tokens[4:4 + w * h], dtype=np.uint8).reshape(h, w)


def write_pbm(mask: np.ndarray, path) -> None:
    """Plain PBM (P1); 1 = selected, row 0 at the bottom like the heatmaps."""
    bits = np.asarray(mask, dtype=bool)[::-1]
    h, w = bits.shape
    with atomic_write(path) as fh:
        fh.write(f"P1\n{w} {h}\n")
        for row in bits.astype(np.uint8):
            fh.write(" ".join(map(str, row.tolist())) + "\n")


def read_pbm(path) -> np.ndarray:
    tokens = Path(path).read_text().split()
    if tokens[0] != "P1":
        raise ValueError("not a plain PBM file")
    w, h = int(tokens[1]), int(tokens[2])
    return np.array(tokens[3:3 + w * h], dtype=np.uint8).reshape(h, w)[::-1].astype(bool)


def write_png(A: np.ndarray, path) -> None:
    from PIL import Image

    buf = io.BytesIO()
    Image.fromarray(modulus_to_gray(A), mode="L").save(buf, format="PNG")
    with atomic_write(path, "wb") as fh:
        fh.write(buf.getvalue())


# -- tables ------------------------------------------------------------------

def write_matrix_csv(A: np.ndarray, path) -> None:
    with atomic_write(path, newline="") as fh:
        w = csv.writer(fh)
        for row in np.asarray(A, dtype=float):
            w.writerow([repr(float(v)) for v in row])


def write_mask_pixels_csv(mask: np.ndarray, path) -> None:
    rows, cols = np.nonzero(mask)
    with atomic_write(path, newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "col"])
        w.writerows(zip(rows.tolist(), cols.tolist()))


def write_component_summary(components, path) -> None:
    with atomic_write(path, newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "edge_count", "pixel_count", "energy"])
        for i, c in enumerate(components):
            w.writerow([i, c.edge_count, c.size, repr(float(c.total_energy))])
