"""Command line front end.

Subcommands:
    mppi-check    residual check of the normalized pseudo-inverses
    plan          print the stream plan for a rate point
    simulate      run one transmission round, print the result as JSON
    sweep         run a power sweep, emit CSV or JSON on stdout
    dof check     exact membership verdict for a rate point
    dof sumdof    exact maximum weighted sum over the region
    dof gap       probe for points inside the region the scheme cannot serve
    dof vertices-k3  enumerate region vertices for 3 users

Exit codes: 0 success, 1 domain failure (infeasible point, violated check,
non-member), 2 usage or config error.

A config file (--config) holds `key = value` lines, `#` comments, and blank
lines; keys mirror the long flag names with underscores (k, m, n, seed,
trials, mode, out, noise, dof, sweep_db, power_db). Explicit flags win over
the file, the file wins over built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .alignment import DofVector, build_stream_plan
from .channel import SystemConfig, sample_channels
from .dofregion import (
    RegionSpec,
    construction_feasible,
    find_construction_gap,
    is_member,
    sum_dof_max,
    vertices_k3,
)
from .errors import YRelayError
from .harness import ExperimentConfig, db_to_linear, derive_seed, run_sweep
from .linalg import DIAG_RTOL, TRACE_TOL
from .transceiver import GENIE, RAW, run_round

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

SUBSEED_MPPI = 0xA1


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad rational {text!r}: {exc}") from None


def parse_dof_spec(text: str, k_users: int) -> DofVector:
    """Parse `1-2=1,2-1=1/2,...`; `uniform:V` sets every direction to V.

    Unlisted directions are zero.
    """
    text = text.strip()
    if text.startswith("uniform:"):
        return DofVector.uniform(k_users, parse_fraction(text[len("uniform:"):]))
    values = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            pair, _, val = item.partition("=")
            j, _, k = pair.partition("-")
            key = (int(j), int(k))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad dof entry {item!r}, want J-K=VALUE") from None
        if not val:
            raise argparse.ArgumentTypeError(f"bad dof entry {item!r}, want J-K=VALUE")
        if key in values:
            raise argparse.ArgumentTypeError(f"duplicate dof entry for {pair}")
        values[key] = parse_fraction(val)
    return DofVector(k_users, values)


def parse_sweep_spec(text: str) -> tuple:
    """`start:step:stop` inclusive, e.g. 30:5:60 -> (30, 35, ..., 60)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"bad sweep {text!r}, want start:step:stop")
    try:
        start, step, stop = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad sweep {text!r}, want numeric start:step:stop") from None
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"bad sweep {text!r}: need step > 0 and stop >= start")
    count = int((stop - start) / step + 1e-9) + 1
    return tuple(start + i * step for i in range(count))


def load_config(path: str) -> dict:
    """Flat `key = value` file; later keys override earlier ones."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep or not key.strip():
                raise ValueError(f"{path}:{lineno}: expected `key = value`, got {raw.rstrip()!r}")
            out[key.strip()] = value.strip()
    return out


_CONFIG_KEYS = {
    "k": int,
    "m": int,
    "n": int,
    "seed": int,
    "trials": int,
    "power_db": float,
    "mode": str,
    "out": str,
    "dof": str,
    "sweep_db": str,
    "noise": None,  # parsed as bool below
}


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"bad boolean {text!r}")


def apply_config(args: argparse.Namespace, raw: dict) -> None:
    """Fill argparse values that the command line left at None."""
    for key, value in raw.items():
        if key not in _CONFIG_KEYS:
            raise ValueError(f"unknown config key {key!r}")
        if not hasattr(args, key) or getattr(args, key) is not None:
            continue
        caster = _parse_bool if key == "noise" else _CONFIG_KEYS[key]
        setattr(args, key, caster(value))


def _fill_defaults(args: argparse.Namespace, **defaults) -> None:
    for key, value in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)


def _emit(data: bytes) -> None:
    sys.stdout.buffer.write(data)
    sys.stdout.buffer.flush()


def _print_json(obj) -> None:
    _emit((json.dumps(obj, sort_keys=True, indent=2) + "\n").encode())


def _note(args, message: str) -> None:
    if not args.quiet:
        print(message, file=sys.stderr)


def _system(args) -> SystemConfig:
    p_db = getattr(args, "power_db", None)
    p_lin = db_to_linear(p_db) if p_db is not None else db_to_linear(args.sweep_db[0])
    return SystemConfig(K=args.k, M=args.m, N=args.n, P=p_lin)


def _dof(args) -> DofVector:
    return parse_dof_spec(args.dof, args.k)


def cmd_mppi_check(args) -> int:
    _fill_defaults(args, k=4, m=6, n=6, seed=0, trials=200)
    cfg = SystemConfig(K=args.k, M=args.m, N=args.n, P=1.0)
    max_diag = 0.0
    max_trace = 0.0
    from .linalg import normalized_left_mppi, normalized_right_mppi

    for t in range(args.trials):
        ch = sample_channels(cfg, derive_seed(args.seed, SUBSEED_MPPI, t))
        for h in ch.uplink:
            r = normalized_right_mppi(h)
            resid = np.linalg.norm(h @ r.matrix - r.alpha * np.eye(cfg.N))
            max_diag = max(max_diag, resid / (r.alpha * np.sqrt(cfg.N)))
            max_trace = max(max_trace, abs(np.trace(r.matrix.conj().T @ r.matrix).real - 1.0))
        for d in ch.downlink:
            l = normalized_left_mppi(d)
            resid = np.linalg.norm(l.matrix @ d - l.beta * np.eye(cfg.N))
            max_diag = max(max_diag, resid / (l.beta * np.sqrt(cfg.N)))
            max_trace = max(max_trace, abs(np.trace(l.matrix.conj().T @ l.matrix).real - 1.0))
    max_diag, max_trace = float(max_diag), float(max_trace)
    ok = max_diag <= DIAG_RTOL and max_trace <= TRACE_TOL
    _print_json(
        {
            "trials": args.trials,
            "users": cfg.K,
            "shape": [cfg.N, cfg.M],
            "max_diagonalization_residual": max_diag,
            "max_trace_error": max_trace,
            "tolerances": {"diagonalization": DIAG_RTOL, "trace": TRACE_TOL},
            "ok": ok,
        }
    )
    return EXIT_OK if ok else EXIT_FAILURE


def cmd_plan(args) -> int:
    _fill_defaults(args, k=4, n=6, dof="uniform:1")
    plan = build_stream_plan(_dof(args), args.n)
    _print_json(plan.to_dict())
    return EXIT_OK


def cmd_simulate(args) -> int:
    _fill_defaults(args, k=4, m=6, n=6, seed=0, power_db=40.0, mode=GENIE, dof="uniform:1")
    if args.noise is None:
        args.noise = True
    cfg = _system(args)
    ch = sample_channels(cfg, derive_seed(args.seed, 0xC4, 0))
    res = run_round(cfg, ch, _dof(args), seed=args.seed, mode=args.mode, noise=args.noise)
    _print_json(res.to_dict())
    return EXIT_OK


def cmd_sweep(args) -> int:
    _fill_defaults(
        args, k=4, m=6, n=6, seed=0, trials=200, mode=GENIE, out="csv", dof="uniform:1"
    )
    if args.sweep_db is None:
        args.sweep_db = parse_sweep_spec("30:5:60")
    if args.noise is None:
        args.noise = True
    cfg = ExperimentConfig(
        system=_system(args),
        dof=_dof(args),
        sweep_db=tuple(args.sweep_db),
        trials=args.trials,
        seed=args.seed,
        mode=args.mode,
        noise=args.noise,
    )
    _note(args, f"sweep: {len(cfg.sweep_db)} points x {cfg.trials} trials, config {cfg.digest()}")
    report = run_sweep(cfg)
    _emit(report.to_csv_bytes() if args.out == "csv" else report.to_json_bytes())
    return EXIT_OK


def cmd_dof_check(args) -> int:
    _fill_defaults(args, k=4, n=6, dof="uniform:1")
    d = _dof(args)
    spec = RegionSpec(K=args.k, N=args.n)
    verdict = is_member(d, spec)
    feasible, weighted = construction_feasible(d, args.n)
    out = verdict.to_dict()
    out["construction_feasible"] = feasible
    out["weighted_sum"] = str(weighted)
    _print_json(out)
    return EXIT_OK if verdict.member else EXIT_FAILURE


def cmd_dof_sumdof(args) -> int:
    _fill_defaults(args, k=4, n=6)
    value, maximizer = sum_dof_max(RegionSpec(K=args.k, N=args.n))
    _print_json({"sum_dof": str(value), "maximizer": maximizer.to_dict()})
    return EXIT_OK


def cmd_dof_gap(args) -> int:
    _fill_defaults(args, k=4, n=6)
    witness = find_construction_gap(RegionSpec(K=args.k, N=args.n))
    if witness is None:
        _print_json({"gap_found": False, "witness": None})
    else:
        feasible, weighted = construction_feasible(witness, args.n)
        _print_json(
            {
                "gap_found": True,
                "witness": witness.to_dict(),
                "construction_feasible": feasible,
                "weighted_sum": str(weighted),
            }
        )
    return EXIT_OK


def cmd_dof_vertices(args) -> int:
    _fill_defaults(args, n=6)
    verts = vertices_k3(args.n)
    _print_json({"n_relay": args.n, "count": len(verts), "vertices": [v.to_dict() for v in verts]})
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser, *names: str) -> None:
    if "k" in names:
        p.add_argument("--k", type=int, default=None, help="number of users")
    if "m" in names:
        p.add_argument("--m", type=int, default=None, help="antennas per user")
    if "n" in names:
        p.add_argument("--n", type=int, default=None, help="relay antennas")
    if "seed" in names:
        p.add_argument("--seed", type=int, default=None, help="master RNG seed")
    if "trials" in names:
        p.add_argument("--trials", type=int, default=None, help="trials per point")
    if "dof" in names:
        p.add_argument("--dof", type=str, default=None, help="rate point, e.g. 1-2=1,2-1=1/2 or uniform:1")
    if "mode" in names:
        p.add_argument("--mode", choices=(GENIE, RAW), default=None, help="relay decode mode")
    if "noise" in names:
        p.add_argument("--noise", action=argparse.BooleanOptionalAction, default=None, help="add receiver noise")
    if "power_db" in names:
        p.add_argument("--power-db", dest="power_db", type=float, default=None, help="transmit power in dB")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="yrelay",
        description="Zero-forcing multi-way relaying: simulation and exact DoF-region tools.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", type=str, default=None, help="key = value config file")
    parser.add_argument("--quiet", action="store_true", help="suppress progress notes on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mppi-check", help="residual check of the normalized pseudo-inverses")
    _add_common(p, "k", "m", "n", "seed", "trials")
    p.set_defaults(func=cmd_mppi_check)

    p = sub.add_parser("plan", help="print the stream plan for a rate point")
    _add_common(p, "k", "n", "dof")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("simulate", help="run one transmission round")
    _add_common(p, "k", "m", "n", "seed", "dof", "mode", "noise", "power_db")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run a power sweep and emit a report")
    _add_common(p, "k", "m", "n", "seed", "trials", "dof", "mode", "noise")
    p.add_argument("--sweep-db", dest="sweep_db", type=parse_sweep_spec, default=None,
                   help="power points start:step:stop in dB")
    p.add_argument("--out", choices=("csv", "json"), default=None, help="report format")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("dof", help="exact region computations")
    dof_sub = p.add_subparsers(dest="dof_command", required=True)

    q = dof_sub.add_parser("check", help="membership verdict for a rate point")
    _add_common(q, "k", "n", "dof")
    q.set_defaults(func=cmd_dof_check)

    q = dof_sub.add_parser("sumdof", help="maximum total DoF over the region")
    _add_common(q, "k", "n")
    q.set_defaults(func=cmd_dof_sumdof)

    q = dof_sub.add_parser("gap", help="probe for member points the scheme cannot serve")
    _add_common(q, "k", "n")
    q.set_defaults(func=cmd_dof_gap)

    q = dof_sub.add_parser("vertices-k3", help="enumerate region vertices for 3 users")
    _add_common(q, "n")
    q.set_defaults(func=cmd_dof_vertices)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        try:
            apply_config(args, load_config(args.config))
        except (OSError, ValueError) as exc:
            print(f"yrelay: config error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except YRelayError as exc:
        print(f"yrelay: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except argparse.ArgumentTypeError as exc:
        # late parse of values that needed other flags first (e.g. --dof)
        print(f"yrelay: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"yrelay: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
