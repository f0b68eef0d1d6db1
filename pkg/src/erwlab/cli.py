"""Command line interface: reproducible experiment runs and data emission.

Subcommands
-----------
simulate      generate a batch of walks; writes a binary raw-path dump
              (see below) and optionally a scaled-process CSV
oracle        exact law of S_n: pmf CSV (columns s, prob) + JSON moments
verify-coeff  deterministic coefficient checks (gap curves + reports)
test          run a named experiment (or "all") under a preset
report        re-read reports.jsonl from an output directory

Exit codes: 0 all checks passed, 1 some check failed, 2 configuration
error, 3 runtime fault.

Configuration for ``test`` may come from a JSON file (--config); flags
mirror the schema keys one to one and override the file.  The output
directory defaults to $ERW_OUT_DIR, then ./erw_out.  Every emitted file
carries the package version (with git describe when available), the
hash of the effective configuration, and the seed; the human-readable
summary.txt is the only file with a timestamp, so rerunning a
configuration reproduces every data file byte for byte.

Raw-path dump format (simulate): a little-endian header
``magic "ERWD", format version u8, p f8, q f8, horizon u64, n_paths
u64, seed u64`` followed by one record per path of ceil(horizon/8)
bytes; bit j of a record (LSB first within each byte) is 1 when
increment X_{j+1} is +1.
"""

from __future__ import annotations

import argparse
import functools
import hashlib
import json
import math
import os
import struct
import subprocess
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__, coeff, experiments, oracle, scaling, walk
from .stats import TestReport

DEFAULT_SEED = 20240809

_DUMP_MAGIC = b"ERWD"
_DUMP_HEADER = struct.Struct("<4sBddQQQ")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str = "all"
    p: float | None = None
    q: float | None = None
    n: int | None = None
    n_paths: int | None = None
    grid: list | None = None
    seed: int = DEFAULT_SEED
    out_dir: str = ""
    preset: str = "desk"
    threads: int | None = None
    with_distance_corr: bool | None = None

    def scientific_dict(self) -> dict:
        d = asdict(self)
        d.pop("out_dir")  # operational, not scientific
        d.pop("threads")
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.scientific_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


_REGIME_GATES = {
    "clt-diffusive": lambda p: 0.0 <= p < 0.75,
    "fclt-diffusive": lambda p: 0.0 <= p < 0.75,
    "joint-cov": lambda p: 0.0 <= p < 0.75,
    "clt-critical": lambda p: p == 0.75,
    "fclt-critical": lambda p: p == 0.75,
    "fclt-superdiffusive": lambda p: 0.75 < p < 1.0,
    "stable-indep": lambda p: 0.75 < p < 1.0,
    "conditions-ab": lambda p: 0.75 < p < 1.0,
}


def _validate_config(cfg: ExperimentConfig) -> None:
    if cfg.experiment != "all" and cfg.experiment not in experiments.EXPERIMENTS:
        raise ConfigError(f"unknown experiment {cfg.experiment!r}")
    if cfg.preset not in experiments.PRESETS:
        raise ConfigError(f"unknown preset {cfg.preset!r}")
    overridden = any(getattr(cfg, k) is not None for k in ("p", "q", "n", "n_paths", "grid"))
    if cfg.experiment == "all" and overridden:
        raise ConfigError("parameter overrides are not allowed with experiment 'all'")
    for name, lo, hi in (("p", 0.0, 1.0), ("q", 0.0, 1.0)):
        v = getattr(cfg, name)
        if v is not None and not lo <= v <= hi:
            raise ConfigError(f"{name} must lie in [{lo}, {hi}]")
    for name in ("n", "n_paths"):
        v = getattr(cfg, name)
        if v is not None and v < 1:
            raise ConfigError(f"{name} must be >= 1")
    if cfg.threads is not None and cfg.threads < 1:
        raise ConfigError("threads must be >= 1")
    if not 0 <= cfg.seed < 2**64:
        raise ConfigError("seed must fit in 64 bits")
    gate = _REGIME_GATES.get(cfg.experiment)
    if gate is not None and cfg.p is not None and not gate(cfg.p):
        raise ConfigError(f"p={cfg.p} violates the regime of {cfg.experiment!r}")
    if cfg.grid is not None:
        grid = [float(t) for t in cfg.grid]
        if sorted(grid) != grid or any(t < 0 for t in grid):
            raise ConfigError("grid must be nondecreasing and nonnegative")


def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        unknown = set(raw) - set(asdict(cfg))
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key, val in raw.items():
            setattr(cfg, key, val)
    for key in ("experiment", "p", "q", "n", "n_paths", "grid", "seed",
                "out_dir", "preset", "threads", "with_distance_corr"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    if not cfg.out_dir:
        cfg.out_dir = os.environ.get("ERW_OUT_DIR", "erw_out")
    _validate_config(cfg)
    return cfg


@functools.lru_cache(maxsize=1)
def version_string() -> str:
    try:
        git = subprocess.run(["git", "describe", "--always", "--dirty"],
                             capture_output=True, text=True, timeout=10)
        tag = git.stdout.strip() if git.returncode == 0 and git.stdout.strip() else "nogit"
    except (OSError, subprocess.SubprocessError):
        tag = "nogit"
    return f"erwlab-{__version__}+{tag}"


def _meta(cfg: ExperimentConfig) -> dict:
    return {"version": version_string(), "config_hash": cfg.config_hash(), "seed": cfg.seed}


def _meta_line(cfg: ExperimentConfig) -> str:
    m = _meta(cfg)
    return f"{m['version']} config={m['config_hash']} seed={m['seed']} preset={cfg.preset}"


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")


def _write_reports(out_dir: Path, cfg: ExperimentConfig, reports: list[TestReport]) -> None:
    with open(out_dir / "reports.jsonl", "w") as fh:
        head = {"kind": "meta", **_meta(cfg)}
        fh.write(json.dumps(head, sort_keys=True) + "\n")
        for rep in reports:
            fh.write(json.dumps(rep.to_json_dict(), sort_keys=True) + "\n")
    with open(out_dir / "summary.csv", "w") as fh:
        fh.write(f"# {_meta_line(cfg)}\n")
        fh.write("name,observed,target,tolerance,pass,n_samples\n")
        for rep in reports:
            fh.write(f"{rep.name},{rep.observed!r},{rep.target!r},"
                     f"{rep.tolerance!r},{int(rep.passed)},{rep.n_samples}\n")
    n_fail = sum(not r.passed for r in reports)
    with open(out_dir / "summary.txt", "w") as fh:
        fh.write(f"{_meta_line(cfg)}\n")
        fh.write(f"finished: {time.strftime('%Y-%m-%d %H:%M:%S')}\n")
        fh.write(f"experiment={cfg.experiment} reports={len(reports)} failures={n_fail}\n\n")
        for rep in reports:
            flag = "PASS" if rep.passed else "FAIL"
            side = "<=" if rep.metadata.get("one_sided") == "true" else "~"
            fh.write(f"[{flag}] {rep.name}: observed={rep.observed:.6g} "
                     f"{side} target={rep.target:.6g} (tol={rep.tolerance:.3g})\n")


def load_reports(out_dir) -> list[TestReport]:
    reports = []
    with open(Path(out_dir) / "reports.jsonl") as fh:
        for line in fh:
            d = json.loads(line)
            if d.get("kind") == "meta":
                continue
            reports.append(TestReport(d["name"], d["observed"], d["target"],
                                      d["tolerance"], d["pass"], d["n_samples"],
                                      d.get("metadata", {})))
    return reports


def _set_threads(threads: int | None) -> None:
    if threads is not None:
        import numba

        numba.set_num_threads(threads)


def cmd_test(args) -> int:
    cfg = _load_config(args)
    _set_threads(cfg.threads)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ctx = experiments.RunContext(
        seed=cfg.seed, out_dir=out_dir, preset=cfg.preset, meta_line=_meta_line(cfg),
        overrides={k: getattr(cfg, k) for k in experiments.OVERRIDABLE})
    reports = experiments.run_experiment(cfg.experiment, ctx)
    _write_json(out_dir / "config.json", {"meta": _meta(cfg), "config": asdict(cfg)})
    _write_reports(out_dir, cfg, reports)
    for rep in reports:
        flag = "PASS" if rep.passed else "FAIL"
        print(f"[{flag}] {rep.name}: observed={rep.observed:.6g} target={rep.target:.6g}")
    n_fail = sum(not r.passed for r in reports)
    print(f"{len(reports) - n_fail}/{len(reports)} checks passed -> {out_dir}")
    return 0 if n_fail == 0 else 1


def cmd_verify_coeff(args) -> int:
    args.experiment = "coeff"
    return cmd_test(args)


def cmd_report(args) -> int:
    out_dir = args.out_dir or os.environ.get("ERW_OUT_DIR", "erw_out")
    try:
        reports = load_reports(out_dir)
    except OSError as exc:
        raise ConfigError(f"cannot read reports: {exc}") from exc
    n_fail = 0
    for rep in reports:
        flag = "PASS" if rep.passed else "FAIL"
        n_fail += not rep.passed
        print(f"[{flag}] {rep.name}: observed={rep.observed:.6g} target={rep.target:.6g} "
              f"tol={rep.tolerance:.3g} n={rep.n_samples}")
    print(f"{len(reports) - n_fail}/{len(reports)} checks passed")
    return 0 if n_fail == 0 else 1


def cmd_oracle(args) -> int:
    if not 0.0 <= args.p <= 1.0 or not 0.0 <= args.q <= 1.0 or args.n < 1:
        raise ConfigError("need 0 <= p, q <= 1 and n >= 1")
    out_dir = Path(args.out_dir or os.environ.get("ERW_OUT_DIR", "erw_out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    law = oracle.exact_law(args.p, args.q, args.n)
    cfg = ExperimentConfig(experiment="oracle", p=args.p, q=args.q, n=args.n,
                           preset="desk", seed=0)
    with open(out_dir / "pmf.csv", "w") as fh:
        fh.write(f"# {_meta_line(cfg)}\n")
        fh.write("s,prob\n")
        for s, pr in zip(law.support, law.probs):
            fh.write(f"{int(s)},{float(pr)!r}\n")
    tab = coeff.build_coeffs(args.p, args.n)
    moments = {
        "meta": _meta(cfg),
        "p": args.p, "q": args.q, "n": args.n,
        "mean": oracle.exact_moment(law, 1),
        "second": oracle.exact_moment(law, 2),
        "fourth": oracle.exact_moment(law, 4),
        "mass_defect": law.mass_defect(),
        "martingale_identity_error": oracle.martingale_identity_error(
            args.p, args.q, args.n, tab),
    }
    _write_json(out_dir / "moments.json", moments)
    print(f"wrote pmf.csv and moments.json for p={args.p} q={args.q} n={args.n} -> {out_dir}")
    return 0


def write_dump(path, batch: walk.PathBatch) -> None:
    """Raw-path dump: header + per-path packed increments, 1 bit/step."""
    inc = batch.increments()
    bits = np.packbits(inc > 0, axis=1, bitorder="little")
    header = _DUMP_HEADER.pack(_DUMP_MAGIC, 1, batch.params.p, batch.params.q,
                               batch.params.horizon, batch.n_paths,
                               batch.params.master_seed)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(bits.tobytes())


def read_dump(path) -> tuple[dict, np.ndarray]:
    """Inverse of write_dump: (header dict, increments array of +-1)."""
    blob = Path(path).read_bytes()
    magic, fmt, p, q, horizon, n_paths, seed = _DUMP_HEADER.unpack_from(blob, 0)
    if magic != _DUMP_MAGIC or fmt != 1:
        raise ValueError("not an erwlab raw-path dump")
    per = math.ceil(horizon / 8)
    raw = np.frombuffer(blob, dtype=np.uint8, offset=_DUMP_HEADER.size)
    raw = raw.reshape(n_paths, per)
    bits = np.unpackbits(raw, axis=1, bitorder="little")[:, :horizon]
    inc = np.where(bits == 1, 1, -1).astype(np.int8)
    return {"p": p, "q": q, "horizon": horizon, "n_paths": n_paths, "seed": seed}, inc


def cmd_simulate(args) -> int:
    if not 0.0 <= args.p <= 1.0 or not 0.0 <= args.q <= 1.0:
        raise ConfigError("need 0 <= p, q <= 1")
    if args.horizon < 1 or args.n_paths < 1:
        raise ConfigError("need horizon >= 1 and n_paths >= 1")
    _set_threads(args.threads)
    out_dir = Path(args.out_dir or os.environ.get("ERW_OUT_DIR", "erw_out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    params = walk.WalkParams(p=args.p, q=args.q, horizon=args.horizon,
                             master_seed=seed, mode=args.mode)
    batch = walk.simulate(params, args.n_paths)
    write_dump(out_dir / "paths.bin", batch)
    cfg = ExperimentConfig(experiment="simulate", p=args.p, q=args.q,
                           n=args.horizon, n_paths=args.n_paths, seed=seed)
    _write_json(out_dir / "meta.json",
                {"meta": _meta(cfg), "p": args.p, "q": args.q, "mode": args.mode,
                 "horizon": args.horizon, "n_paths": args.n_paths, "seed": seed})
    written = ["paths.bin", "meta.json"]
    if args.scale:
        grid = args.grid if args.grid is not None else scaling.default_grid().tolist()
        n = args.scale_n or max(1, args.horizon // 2)
        sg = scaling.SCALERS[args.scale](batch, n, grid)
        sg.write_csv(out_dir / "scaled.csv")
        written.append("scaled.csv")
    print(f"wrote {', '.join(written)} ({args.n_paths} paths, horizon {args.horizon}) -> {out_dir}")
    return 0


def _add_common(sub, *, seed=True, out_dir=True, threads=False):
    if seed:
        sub.add_argument("--seed", type=int, default=None,
                         help=f"64-bit master seed (default {DEFAULT_SEED})")
    if out_dir:
        sub.add_argument("--out-dir", type=str, default=None,
                         help="output directory (default $ERW_OUT_DIR or ./erw_out)")
    if threads:
        sub.add_argument("--threads", type=int, default=None,
                         help="cap on worker threads (default: available parallelism)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="erwlab", description="elephant random walk scaling-limit laboratory")
    parser.add_argument("--version", action="version", version=version_string())
    subs = parser.add_subparsers(dest="command", required=True)

    t = subs.add_parser("test", help="run a named experiment under a preset")
    t.add_argument("--experiment", choices=list(experiments.EXPERIMENTS) + ["all"],
                   default=None, help="experiment name (default all)")
    t.add_argument("--preset", choices=list(experiments.PRESETS), default=None,
                   help="desk = acceptance-grade (minutes); smoke = quick, 3x tolerances")
    t.add_argument("--config", type=str, default=None, help="JSON config file; flags override")
    t.add_argument("--p", type=float, default=None, help="memory parameter override")
    t.add_argument("--q", type=float, default=None, help="first-step up-probability override")
    t.add_argument("--n", type=int, default=None, help="scaling index override")
    t.add_argument("--n-paths", dest="n_paths", type=int, default=None,
                   help="Monte Carlo path count override")
    t.add_argument("--grid", type=float, nargs="+", default=None, help="time grid override")
    t.add_argument("--distance-corr", dest="with_distance_corr", action="store_const",
                   const=True, default=None,
                   help="also report a distance correlation in stable-indep (diagnostic)")
    _add_common(t, threads=True)
    t.set_defaults(fn=cmd_test)

    v = subs.add_parser("verify-coeff", help="deterministic coefficient checks")
    v.add_argument("--preset", choices=list(experiments.PRESETS), default=None)
    v.add_argument("--config", type=str, default=None)
    _add_common(v, threads=True)
    v.set_defaults(fn=cmd_verify_coeff, experiment="coeff")

    o = subs.add_parser(
        "oracle",
        help="exact law of S_n: pmf.csv (columns s,prob) + moments.json",
        description="Exact law of S_n by dynamic programming. Writes pmf.csv "
                    "with columns (s, prob) and moments.json with mean, second "
                    "and fourth moments, the DP mass defect, and the martingale "
                    "identity error.")
    o.add_argument("--p", type=float, required=True)
    o.add_argument("--q", type=float, required=True)
    o.add_argument("--n", type=int, required=True)
    _add_common(o, seed=False)
    o.set_defaults(fn=cmd_oracle)

    s = subs.add_parser(
        "simulate", help="generate walks; write a raw-path dump",
        description="Generate a batch of walks. Writes paths.bin (binary header "
                    "p,q,horizon,n_paths,seed + packed increments, 1 bit/step, "
                    "LSB-first within bytes), meta.json, and with --scale a "
                    "scaled.csv with columns (path_id, t, value).")
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--q", type=float, required=True)
    s.add_argument("--horizon", type=int, required=True)
    s.add_argument("--n-paths", dest="n_paths", type=int, required=True)
    s.add_argument("--mode", choices=[walk.MODE_MARKOV, walk.MODE_HISTORY],
                   default=walk.MODE_MARKOV)
    s.add_argument("--scale", choices=list(scaling.SCALERS), default=None,
                   help="also emit a scaled-process CSV (columns path_id,t,value)")
    s.add_argument("--scale-n", dest="scale_n", type=int, default=None,
                   help="scaling index for --scale (default horizon // 2)")
    s.add_argument("--grid", type=float, nargs="+", default=None)
    _add_common(s, threads=True)
    s.set_defaults(fn=cmd_simulate)

    r = subs.add_parser("report", help="summarize reports.jsonl from an output directory")
    _add_common(r, seed=False)
    r.set_defaults(fn=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, 0 on --help
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (scaling.RegimeError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime fault
        import traceback

        traceback.print_exc()
        print(f"runtime fault: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
