"""``tfgm {synth|extract|bench}`` command-line entry point.

Exit codes: 0 success, 2 bad input, 3 bad config, 4 internal error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io as tio
from . import signals as sg
from .bench import (builtin_scenarios, load_scenario, plot_summary, realization_seed,
                    run_benchmark, stderr_progress, summarize, summary_csv)
from .methods import METHODS, MethodConfig, method_presets, run_method

EXIT_OK, EXIT_INPUT, EXIT_CONFIG, EXIT_INTERNAL = 0, 2, 3, 4


class InputError(Exception):
    pass


class ConfigError(Exception):
    pass


def _log(msg: str) -> None:
    # plain text only, so NO_COLOR needs no special handling
    print(msg, file=sys.stderr, flush=True)


def _parse_kv(text: str) -> dict:
    out = {}
    for part in filter(None, text.split(",")):
        if "=" not in part:
            raise ConfigError(f"expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError:
            raise ConfigError(f"{k}: not a number: {v!r}") from None
    return out


def _base(path: Path) -> Path:
    return path.with_suffix("") if path.suffix.lower() in (".csv", ".wav", ".json") else path


def _write_signal(sig: sg.Signal, base: Path, fmt: str) -> Path:
    # appended, not with_suffix, so names like "x.truth0" survive
    if fmt == "csv":
        path = base.with_name(base.name + ".csv")
        tio.write_signal_csv(sig, path)
    else:
        path = base.with_name(base.name + ".wav")
        tio.write_signal_wav(sig, path, bits=16 if fmt == "wav16" else 32)
    return path


def _write_manifest(out_dir: Path, input_path, config: dict, files: list[Path]) -> None:
    artifacts = [{"path": f.relative_to(out_dir).as_posix(), "sha256": tio.sha256(f),
                  "bytes": f.stat().st_size} for f in sorted(files)]
    tio.write_json(out_dir / "manifest.json", {
        "input": str(input_path) if input_path is not None else None,
        "config": config,
        "output_dir": str(out_dir),
        "artifacts": artifacts,
    })


# -- synth -------------------------------------------------------------------

def cmd_synth(args) -> int:
    out = _base(Path(args.out))
    meta: dict = {"seed": args.seed, "snr_db": args.snr}
    truth = []
    if args.scenario:
        scen = _load_scenario(args.scenario)
        truth = scen.truth()
        clean = sg.mix(truth)
        meta["scenario"] = scen.to_dict()
    elif args.tone:
        kv = _parse_kv(args.tone)
        if "f" not in kv:
            raise ConfigError("--tone needs f=<frequency>")
        n = int(kv.pop("n", args.n))
        try:
            clean = sg.gen_tone(n, kv.pop("f"), dt=args.dt, **kv)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"--tone: {exc}") from None
        meta["tone"] = {"n": n, "dt": args.dt, **_parse_kv(args.tone)}
    else:
        raise ConfigError("give --tone or --scenario")

    snr = math.inf if args.snr is None else args.snr
    seed = args.seed if args.seed is not None else 0
    noisy = sg.add_noise(clean, snr, seed) if math.isfinite(snr) else clean
    files = [_write_signal(noisy, out, args.format)]
    for i, t in enumerate(truth):
        files.append(_write_signal(t, out.with_name(f"{out.name}.truth{i}"), args.format))
    meta["files"] = [f.name for f in files]
    tio.write_json(out.with_name(out.name + ".json"), meta)
    _log(f"wrote {', '.join(str(f) for f in files)}")
    return EXIT_OK


# -- extract -----------------------------------------------------------------

def _method_config(args) -> MethodConfig:
    try:
        if args.config:
            d = json.loads(Path(args.config).read_text())
            if args.method and args.method != "custom":
                d["method"] = args.method
            cfg = MethodConfig.from_dict(d)
        elif args.method == "custom":
            cfg = MethodConfig(method="custom")
        else:
            cfg = method_presets()[args.method or "A"]
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {exc.filename}") from None
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid config: {exc}") from None
    return cfg


def cmd_extract(args) -> int:
    cfg = _method_config(args)
    if args.dump_config:
        print(cfg.to_json())
        return EXIT_OK
    if not args.input:
        raise InputError("no input file given")
    try:
        x = tio.read_signal(args.input)
    except FileNotFoundError:
        raise InputError(f"input not found: {args.input}") from None
    except (ValueError, OSError) as exc:
        raise InputError(f"cannot read {args.input}: {exc}") from None
    try:
        result = run_method(x, cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    out = Path(args.out)
    files: list[Path] = []

    def emit(name):
        p = out / name
        files.append(p)
        return p

    modulus = np.abs(result.representation.coeffs[: result.representation.half_bins])
    tio.write_pgm(modulus, emit("tfr_modulus.pgm"))
    tio.write_png(modulus, emit("tfr_modulus.png"))
    if args.tfr_csv:
        tio.write_matrix_csv(modulus, emit("tfr_modulus.csv"))
    tio.write_component_summary(result.components, emit("components.csv"))
    for i, est in enumerate(result.estimates):
        stem = f"component_{i:02d}"
        tio.write_signal_csv(est.signal, emit(f"{stem}.csv"))
        if args.wav:
            tio.write_signal_wav(est.signal, emit(f"{stem}.wav"), bits=32)
        tio.write_pbm(est.mask, emit(f"{stem}_mask.pbm"))
        tio.write_mask_pixels_csv(est.mask, emit(f"{stem}_mask.csv"))
        c = result.components[i]
        tio.write_json(emit(f"{stem}.json"), {
            "id": i, "source_kind": est.source_kind, "method": cfg.method,
            "edge_count": c.edge_count, "pixel_count": c.size, "energy": c.total_energy,
            "mask_popcount": int(est.mask.sum()),
            "threshold": {"criterion": result.diagnostics["criterion"],
                          "tau": result.diagnostics["tau"], "gamma": result.diagnostics["gamma"]},
        })
    tio.write_json(emit("diagnostics.json"), result.diagnostics)
    _write_manifest(out, args.input, cfg.to_dict(), files)
    _log(f"{len(result.estimates)} component(s) written to {out}")
    return EXIT_OK


# -- bench -------------------------------------------------------------------

def _load_scenario(name):
    try:
        return load_scenario(name)
    except (ValueError, TypeError, KeyError, json.JSONDecodeError) as exc:
        raise ConfigError(str(exc)) from None


def cmd_bench(args) -> int:
    scen = _load_scenario(args.scenario)
    if args.snr:
        scen = replace(scen, snr_db=[s.strip() for s in args.snr.split(",")])
    if args.realizations is not None:
        scen = replace(scen, realizations=args.realizations)
    if args.seed is not None:
        scen = replace(scen, seed=args.seed)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    bad = [m for m in methods if m not in METHODS]
    if bad:
        raise ConfigError(f"unknown method(s) {bad}; choose from {list(METHODS)}")
    if args.plot:
        try:
            import matplotlib  # noqa: F401
        except ImportError:
            raise ConfigError("--plot needs matplotlib (pip install tfgm[plot])") from None
    if args.dump_config:
        print(json.dumps({"scenario": scen.to_dict(), "methods": methods,
                          "method_configs": {m: replace(method_presets()[m], **scen.method).to_dict()
                                             for m in methods}}, indent=2, sort_keys=True))
        return EXIT_OK

    result = run_benchmark(scen, methods, workers=args.workers,
                           progress=stderr_progress(scen.name))
    out = Path(args.out)
    files = []
    for name, text in (("bench.csv", result.to_csv()),
                       ("summary.csv", summary_csv(summarize(result))),
                       ("timings.csv", result.timings_csv())):
        with tio.atomic_write(out / name, newline="") as fh:
            fh.write(text)
        files.append(out / name)
    if args.plot:
        plot_summary(result, out / "summary.png")
        files.append(out / "summary.png")
    failures = sum(r.status != "ok" for r in result.rows)
    if failures:
        _log(f"warning: {failures} row(s) recorded errors")
    _write_manifest(out, None, {"scenario": scen.to_dict(), "methods": methods,
                                "seeds": [realization_seed(scen.seed, k)
                                          for k in range(scen.realizations)]},
                    [f for f in files if f.name != "timings.csv"])
    _log(f"{len(result.rows)} rows written to {out / 'bench.csv'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tfgm", description="Time-frequency masking by pixel-graph components.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="generate a test signal")
    s.add_argument("--tone", help="pure tone, e.g. f=0.1[,amp=1,n=1024]")
    s.add_argument("--scenario", help=f"built-in scenario ({', '.join(builtin_scenarios())}) or JSON path")
    s.add_argument("--snr", type=float, default=None, help="SNR in dB (default: noiseless)")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--n", type=int, default=1024)
    s.add_argument("--dt", type=float, default=1.0)
    s.add_argument("--format", choices=("csv", "wav16", "wav32"), default="csv")
    s.add_argument("--out", required=True, help="output path (suffix is set by --format)")
    s.set_defaults(func=cmd_synth)

    e = sub.add_parser("extract", help="separate the components of a signal")
    e.add_argument("input", nargs="?", help="signal as CSV (time,amplitude) or WAV")
    e.add_argument("--method", choices=METHODS + ("custom",), default=None)
    e.add_argument("--config", help="MethodConfig JSON file")
    e.add_argument("--out", default="tfgm_out")
    e.add_argument("--wav", action="store_true", help="also write components as 32-bit WAV")
    e.add_argument("--tfr-csv", action="store_true", help="also write the dense modulus as CSV")
    e.add_argument("--dump-config", action="store_true", help="print the effective config and exit")
    e.set_defaults(func=cmd_extract)

    b = sub.add_parser("bench", help="Monte Carlo benchmark over SNRs and realizations")
    b.add_argument("--scenario", default="hermite-chirp")
    b.add_argument("--methods", default="A,B,C,D,E")
    b.add_argument("--snr", help="comma-separated SNRs in dB ('inf' allowed)")
    b.add_argument("--realizations", type=int)
    b.add_argument("--seed", type=int)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--plot", action="store_true", help="also write summary.png")
    b.add_argument("--out", default="tfgm_bench")
    b.add_argument("--dump-config", action="store_true", help="print the effective config and exit")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        _log(f"error: {exc}")
        return EXIT_INPUT
    except ConfigError as exc:
        _log(f"config error: {exc}")
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        _log(f"internal error: {type(exc).__name__}: {exc}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
