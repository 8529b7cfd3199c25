"""Command-line front end.

Every subcommand accepts ``--config FILE``: a JSON object whose keys are the
subcommand's long flag names (dashes or underscores).  Flags given on the
command line override values from the file.

Exit codes: 0 on success, 1 on configuration errors, 2 on numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bessel_chain import ChainConfig, drift_estimate, simulate_replicas
from .driving_walk import IncrementLaw, knot_values, sample_walk
from .errors import ConfigurationError, DomainError, NumericalFailure
from .experiments import (
    chain_summaries,
    continuity_bound_sweep,
    convergence_sweep,
    perturbation_sweep,
    random_driver_pairs,
    reflection_test,
    stationarity_test,
    trend_test,
)
from .halfplane_maps import SlitChain
from .hull_forest import branch_trace, build_forest, forest_stats
from .loewner_solver import continuity_threshold
from .measure_lab import CompactMeasure, monotone_convolve

__all__ = ["run", "main"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigurationError(message)


def _floats(text):
    return [float(x) for x in str(text).split(",") if x.strip()]


def _ints(text):
    return [int(x) for x in str(text).split(",") if x.strip()]


def _add_law(p, kappa=4.0):
    p.add_argument("--kappa", type=float, default=kappa)
    p.add_argument("--law", default="bernoulli",
                   help="bernoulli, rademacher, uniform, gaussian, atoms or constant")
    p.add_argument("--atoms", default=None,
                   help="comma-separated values for --law atoms (variance must equal kappa)")
    p.add_argument("--weights", default=None, help="comma-separated weights for --law atoms")


def _law(args, kappa=None) -> IncrementLaw:
    kappa = args.kappa if kappa is None else kappa
    values = tuple(_floats(args.atoms)) if args.atoms else ()
    weights = tuple(_floats(args.weights)) if args.weights else ()
    if args.law == "constant":
        kappa = 0.0
    return IncrementLaw(args.law, kappa, values, weights)


def _build_parser() -> _Parser:
    p = _Parser(prog="discrete-loewner", description="Discrete Loewner evolution toolkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("simulate", help="walk-driven slit chain and its hull forest")
    _add_law(s)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--m", type=int, default=100, help="number of slits")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default="-")

    s = sub.add_parser("hulls", help="render the hull forest as SVG")
    _add_law(s)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--m", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--points", type=int, default=64)
    s.add_argument("--svg", default="-")

    s = sub.add_parser("chain", help="Y-chain trajectories and drift table")
    s.add_argument("--kappa", type=float, default=4.0)
    s.add_argument("--law", default="rademacher", help="law of X' (variance 1)")
    s.add_argument("--atoms", default=None)
    s.add_argument("--weights", default=None)
    s.add_argument("--y0", type=float, default=1.0)
    s.add_argument("--M", type=int, default=1000, help="number of steps")
    s.add_argument("--replicas", type=int, default=10)
    s.add_argument("--stride", type=int, default=1, help="write every stride-th step")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--csv", default="-")
    s.add_argument("--drift-csv", default=None,
                   help="also write a drift table at the levels --drift-y")
    s.add_argument("--drift-y", default="10,100,1000")
    s.add_argument("--drift-samples", type=int, default=100000)

    s = sub.add_parser("converge", help="step versus interpolated driver sweep")
    _add_law(s)
    s.add_argument("--t", type=float, default=1.0)
    s.add_argument("--n-list", default="4,16,64")
    s.add_argument("--seeds", type=int, default=1, help="number of seeds, starting at --seed")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--points", type=int, default=201)
    s.add_argument("--out", default="-")
    s.add_argument("--csv", default=None)

    s = sub.add_parser("tests", help="stationarity, reflection and continuity checks")
    _add_law(s)
    s.add_argument("--which", default="stationarity,reflection,continuity,perturbation")
    s.add_argument("--m", type=int, default=5)
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--replicas", type=int, default=2000)
    s.add_argument("--pairs", type=int, default=100)
    s.add_argument("--deltas", default="0.25,0.5,1")
    s.add_argument("--t", type=float, default=1.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default="-")

    s = sub.add_parser("convolve", help="monotone convolution of two measure files")
    s.add_argument("--mu", default=None, help="JSON measure file")
    s.add_argument("--nu", default=None, help="JSON measure file")
    s.add_argument("--bins", type=int, default=400)
    s.add_argument("--out", default="-")

    for s in sub.choices.values():
        s.add_argument("--config", default=None, help="JSON file of flag values")
    return p


def _parse(argv):
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        raise ConfigurationError("a subcommand is required")
    cfg = getattr(args, "config", None)
    if cfg is None:
        return args
    sub = parser._subparsers._group_actions[0].choices[args.command]
    try:
        data = json.loads(Path(cfg).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config {cfg}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError("config must be a JSON object")
    known = {a.dest for a in sub._actions}
    defaults = {}
    for key, value in data.items():
        dest = key.lstrip("-").replace("-", "_")
        if dest not in known or dest in ("help", "config"):
            raise ConfigurationError(f"unknown config key {key!r}")
        if isinstance(value, list):
            value = ",".join(str(v) for v in value)
        defaults[dest] = value
    sub.set_defaults(**defaults)
    args = parser.parse_args(argv)
    # re-apply argparse type conversion to values that came from the file
    for a in sub._actions:
        if a.dest in defaults and a.type is not None and isinstance(getattr(args, a.dest), str):
            setattr(args, a.dest, a.type(getattr(args, a.dest)))
    return args


def _emit(text: str, path: str):
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, newline="")


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_plain) + "\n"


def _plain(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(f"not serialisable: {type(x)}")


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _chain_for(args) -> SlitChain:
    if args.m < 1 or args.n < 1:
        raise ConfigurationError("need m >= 1 and n >= 1")
    w = sample_walk(_law(args), args.m - 1, args.seed, n=args.n)
    return SlitChain(args.n, knot_values(w))


def cmd_simulate(args):
    c = _chain_for(args)
    f = build_forest(c)
    summ = chain_summaries(c)
    out = {
        "kappa": args.kappa, "law": args.law, "n": args.n, "m": args.m, "seed": args.seed,
        "drivers": c.drivers.tolist(),
        "capacity": summ["capacity"],
        "hull_interval": [summ["lo"], summ["hi"]],
        "forest": f.to_dict(),
        "stats": forest_stats(f),
    }
    _emit(_json(out), args.out)


def render_svg(c: SlitChain, points: int = 64, margin: float = 0.05) -> str:
    """SVG drawing of every branch of the chain's hull, auto-fitted."""
    f = build_forest(c)
    traces = [branch_trace(c, k, points) for k in range(c.m)]
    allz = np.concatenate(traces)
    x0, x1 = allz.real.min(), allz.real.max()
    y1 = max(allz.imag.max(), 1e-9)
    w, h = max(x1 - x0, 1e-9), y1
    x0, x1 = x0 - margin * w, x1 + margin * w
    y0, y1 = -margin * h, y1 + margin * h
    width = 800
    height = max(1, int(round(width * (y1 - y0) / (x1 - x0))))
    palette = ["#1b6ca8", "#c0392b", "#27ae60", "#8e44ad", "#d35400", "#2c3e50"]
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f"<!-- generator: discrete_loewner {__version__} -->",
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{x0:.6f} {-y1:.6f} {x1 - x0:.6f} {y1 - y0:.6f}">',
        f'<line x1="{x0:.6f}" y1="0" x2="{x1:.6f}" y2="0" stroke="#888" '
        f'stroke-width="{(x1 - x0) / 800:.6f}"/>',
    ]
    sw = (x1 - x0) / 400
    for k, tr in enumerate(traces):
        colour = palette[f.branches[k].tree % len(palette)]
        pts = " ".join(f"{z.real:.6f},{-z.imag:.6f}" for z in tr)
        lines.append(f'<polyline fill="none" stroke="{colour}" stroke-width="{sw:.6f}" '
                     f'data-branch="{k}" data-tree="{f.branches[k].tree}" points="{pts}"/>')
    lines.append(f"<!-- trees: {len(f.trees)} -->")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def cmd_hulls(args):
    c = _chain_for(args)
    _emit(render_svg(c, args.points), args.svg)


def cmd_chain(args):
    law = _law(args, kappa=1.0)
    cfg = ChainConfig(args.kappa, law, args.y0, args.M, args.seed)
    if args.replicas < 1 or args.stride < 1:
        raise ConfigurationError("replicas and stride must be positive")
    traj = simulate_replicas(cfg, args.replicas, record=True)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["replica", "step", "y"])
    steps = np.arange(0, args.M + 1, args.stride)
    for r in range(args.replicas):
        for s in steps:
            wr.writerow([r, int(s), _fmt(traj[r, s])])
    _emit(buf.getvalue(), args.csv)
    if args.drift_csv:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["y", "scaled_drift", "scaled_drift_se", "second_moment",
                     "second_moment_se", "limit_drift"])
        for i, y in enumerate(_floats(args.drift_y)):
            d = drift_estimate(y, args.kappa, law, args.drift_samples, args.seed + i)
            wr.writerow([_fmt(y)] + [_fmt(d[k]) for k in ("scaled_drift", "scaled_drift_se",
                                                          "second_moment", "second_moment_se",
                                                          "limit_drift")])
        _emit(buf.getvalue(), args.drift_csv)


def cmd_converge(args):
    law = _law(args)
    n_list = _ints(args.n_list)
    if sorted(n_list) != n_list or len(set(n_list)) != len(n_list):
        raise ConfigurationError("--n-list must be strictly increasing")
    rows = []
    for s in range(args.seed, args.seed + args.seeds):
        rows.extend(convergence_sweep(law, args.t, n_list, s, points=args.points))
    out = {"rows": rows}
    if args.seeds > 1 or len(n_list) > 2:
        out["trend"] = trend_test(rows)
    _emit(_json(out), args.out)
    if args.csv:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        keys = ["seed", "n", "path_distance", "sup_diff", "modulus", "bound"]
        wr.writerow(keys)
        for r in rows:
            wr.writerow([r["seed"], r["n"]] + [_fmt(r[k]) for k in keys[2:]])
        _emit(buf.getvalue(), args.csv)


def cmd_tests(args):
    law = _law(args)
    which = [w.strip() for w in args.which.split(",") if w.strip()]
    out = {}
    for w in which:
        if w == "stationarity":
            out[w] = stationarity_test(law, args.m, args.k, args.replicas, args.seed).to_dict()
        elif w == "reflection":
            out[w] = reflection_test(law, args.m, args.replicas, args.seed).to_dict()
        elif w == "continuity":
            deltas = _floats(args.deltas)
            pairs = {d: random_driver_pairs(
                args.pairs, lambda _, d=d: 0.9 * continuity_threshold(d, args.t), args.t, args.seed)
                for d in deltas}
            out[w] = continuity_bound_sweep(pairs, args.t, deltas)
        elif w == "perturbation":
            out[w] = perturbation_sweep(args.pairs, args.t, 1e-3, seed=args.seed)
        else:
            raise ConfigurationError(f"unknown test {w!r}")
    _emit(_json(out), args.out)


def _load_measure(path) -> CompactMeasure:
    if path is None:
        raise ConfigurationError("--mu and --nu are required")
    try:
        return CompactMeasure.from_json(Path(path).read_text())
    except OSError as exc:
        raise ConfigurationError(f"cannot read measure {path}: {exc}") from exc
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"malformed measure file {path}: {exc}") from exc


def cmd_convolve(args):
    mu, nu = _load_measure(args.mu), _load_measure(args.nu)
    res = monotone_convolve(mu, nu, bins=args.bins)
    out = res.to_dict()
    out["mean"] = res.mean
    out["variance"] = res.variance
    _emit(_json(out), args.out)


_COMMANDS = {
    "simulate": cmd_simulate,
    "hulls": cmd_hulls,
    "chain": cmd_chain,
    "converge": cmd_converge,
    "tests": cmd_tests,
    "convolve": cmd_convolve,
}


def run(argv=None) -> int:
    """Run the command line and return its exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
        _COMMANDS[args.command](args)
    except (ConfigurationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    return 0


def main():
    sys.exit(run())
