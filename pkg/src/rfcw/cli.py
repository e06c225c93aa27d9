"""Command-line entry point.

Subcommands::

    analyze   minima/phase structure of the free-energy landscape -> JSON
    exact     exact magnetization log-pmf -> JSON
    mc        Glauber sampler -> JSON summary + binary sample file
    rates     deviation-rate curves -> CSV (x, ldp_rate, mdp_rate)
    verify    named experiment from a key=value config file -> JSON report

Exit codes: 0 success (and all declared tolerances pass), 1 tolerance
failure, 2 usage or validation error.  Every run is a pure function of its
flags; floats are printed with 17 significant digits so repeated runs give
byte-identical payloads (the report's ``runtime_s`` field is the one
wall-clock exception).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import _jsonio, _kernels
from .exact import exact_log_pmf
from .fields import make_distribution, sample_fields
from .gfunction import GFunction, classify_minimum, classify_phase, find_minima
from .glauber import ChainConfig, empirical_pmf, run_chains
from .rates import RateSpec, ldp_rate, mdp_rate
from .verify import EXPERIMENTS, run_experiment

__version__ = "0.1.0"
CONFIG_SCHEMA_VERSION = 1


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rfcw",
        description="Random field Curie-Weiss numerical laboratory",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"rfcw {__version__} (config schema v{CONFIG_SCHEMA_VERSION})",
    )
    parser.add_argument("--threads", type=int, default=1, help="cap for worker threads")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="classify the minima and phase of G")
    p.add_argument("--nu", required=True, help='distribution spec, e.g. "dirac 0.0"')
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--search-bound", type=float, default=None)
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("exact", help="exact log-pmf of the total magnetization")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--nu", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("mc", help="Glauber-dynamics sampler")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--nu", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sweeps", type=int, required=True)
    p.add_argument("--burn-in", type=int, default=None, help="sweeps to discard (default 10*n)")
    p.add_argument("--thin", type=int, default=None, help="updates between records (default n)")
    p.add_argument("--chains", type=int, default=1)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("rates", help="rate-function curves as CSV")
    p.add_argument("--nu", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--x", nargs=3, metavar=("LO", "HI", "COUNT"), required=True)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("verify", help="run a named verification experiment")
    p.add_argument("--experiment", required=True, choices=sorted(EXPERIMENTS))
    p.add_argument("--config", type=Path, required=True, help="flat key=value file")
    p.add_argument("--out", type=Path, required=True)

    return parser


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------


def _minimum_record(info) -> dict:
    return {
        "m": info.location,
        "k": info.k,
        "lambda": info.strength,
        "height": info.height,
        "broadness": info.broadness,
        "cond_radius": info.cond_radius,
        "global": info.is_global,
        "mdp_ok": info.mdp_condition_ok,
    }


def _cmd_analyze(args) -> int:
    g = GFunction(beta=args.beta, dist=make_distribution(args.nu))
    cls = classify_phase(g, search_bound=args.search_bound)
    payload = {
        "beta": args.beta,
        "nu_spec": args.nu,
        "minima": [_minimum_record(i) for i in cls.all_minima],
        "phase": cls.phase,
    }
    text = _jsonio.dumps(payload)
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    print(f"analyze: phase={cls.phase} minima={len(cls.all_minima)}", file=sys.stderr)
    return 0


def _cmd_exact(args) -> int:
    fields = sample_fields(make_distribution(args.nu), args.n, args.seed)
    pmf = exact_log_pmf(fields, args.beta)
    payload = {
        "n": args.n,
        "beta": args.beta,
        "seed": args.seed,
        "log_Z": pmf.log_Z,
        "pmf": [[int(s), float(lp)] for s, lp in zip(pmf.s, pmf.log_p)],
    }
    _jsonio.dump(payload, args.out)
    print(f"exact: n={args.n} log_Z={_fmt(pmf.log_Z)} -> {args.out}", file=sys.stderr)
    return 0


def _cmd_mc(args) -> int:
    fields = sample_fields(make_distribution(args.nu), args.n, args.seed)
    cfg = ChainConfig.with_defaults(
        n=args.n,
        beta=args.beta,
        fields=fields,
        seed=args.seed,
        sweeps=args.sweeps,
        burn_in=args.burn_in,
        thin=args.thin,
    )
    series = run_chains(cfg, args.chains, max_workers=max(1, args.threads))
    samples = np.concatenate(series)
    samples_path = args.out.with_suffix(args.out.suffix + ".samples.bin")
    samples.astype("<i4").tofile(samples_path)
    emp = empirical_pmf(samples, args.n)
    payload = {
        "config": {
            "n": args.n,
            "beta": args.beta,
            "nu_spec": args.nu,
            "seed": args.seed,
            "sweeps": cfg.sweeps,
            "burn_in": cfg.burn_in,
            "thin": cfg.thin,
            "chains": args.chains,
            "generator": "philox4x64 key=seed, chain i consumes jumped(1+i)",
        },
        "samples_path": samples_path.name,
        "summary": {
            "retained": int(samples.size),
            "mean": float(samples.mean()),
            "var": float(samples.var()),
            "histogram": [
                [int(s), int(c)] for s, c in zip(emp.s, emp.counts) if c > 0
            ],
        },
    }
    _jsonio.dump(payload, args.out)
    print(
        f"mc: retained={samples.size} mean={_fmt(float(samples.mean()))} -> {args.out}",
        file=sys.stderr,
    )
    return 0


def _cmd_rates(args) -> int:
    lo, hi, count = float(args.x[0]), float(args.x[1]), int(args.x[2])
    if count < 1:
        raise ValueError("x grid needs at least one point")
    g = GFunction(beta=args.beta, dist=make_distribution(args.nu))
    minima = find_minima(g)
    infos = [classify_minimum(g, m, minima=minima) for m in minima]
    glob = [i for i in infos if i.is_global]
    anchor = max(glob, key=lambda i: i.location)
    spec = RateSpec.from_minimum(anchor, args.beta)
    xs = np.linspace(lo, hi, count)
    lines = ["x,ldp_rate,mdp_rate"]
    for x in xs:
        lines.append(
            f"{_fmt(float(x))},{_fmt(float(ldp_rate(g, float(x))))},{_fmt(float(mdp_rate(spec, float(x))))}"
        )
    args.out.write_text("\n".join(lines) + "\n")
    print(
        f"rates: anchor m={_fmt(anchor.location)} k={anchor.k} -> {args.out}",
        file=sys.stderr,
    )
    return 0


def _parse_config(path: Path) -> dict:
    """Flat key=value lines; '#' starts a comment.  Values are parsed as
    int, float, bool, comma-separated list, or left as strings."""

    def parse_scalar(tok: str):
        low = tok.lower()
        if low in ("true", "false"):
            return low == "true"
        if low in ("inf", "-inf"):
            return math.inf if low == "inf" else -math.inf
        for cast in (int, float):
            try:
                return cast(tok)
            except ValueError:
                continue
        return tok

    out = {}
    for raw in path.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line (expected key=value): {raw!r}")
        key, value = line.split("=", 1)
        value = value.strip()
        if "," in value:
            out[key.strip()] = [parse_scalar(t.strip()) for t in value.split(",") if t.strip()]
        else:
            out[key.strip()] = parse_scalar(value)
    return out


_LIST_KEYS = {"n_list", "x_grid", "h_grid"}


def _cmd_verify(args) -> int:
    config = _parse_config(args.config)
    for key in _LIST_KEYS & set(config):
        if not isinstance(config[key], list):
            config[key] = [config[key]]
    report = run_experiment(args.experiment, **config)
    report.write(args.out)
    status = "PASS" if report.passed else "FAIL"
    print(
        f"verify {report.experiment}: {status} ({report.runtime_s:.2f}s) -> {args.out}",
        file=sys.stderr,
    )
    return 0 if report.passed else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    if args.threads and _kernels.NUMBA_ENABLED:
        import numba

        numba.set_num_threads(max(1, min(args.threads, numba.config.NUMBA_NUM_THREADS)))
    try:
        handler = {
            "analyze": _cmd_analyze,
            "exact": _cmd_exact,
            "mc": _cmd_mc,
            "rates": _cmd_rates,
            "verify": _cmd_verify,
        }[args.command]
        return handler(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"rfcw {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
