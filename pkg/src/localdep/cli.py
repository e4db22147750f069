"""``localdep`` command line.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 estimator
precondition failure (or a failed selftest / scaling check).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .core import DataError, read_csv
from .experiments import (BENCH_ESTIMATORS, ESTIMATORS, ConfigError, Params, SweepTable, bench,
                          compute, converge, document, dumps, format_cell, sweep)
from .oracle import GuardError
from .synth import FAMILIES, FUNCTIONS, GeneratorSpec, gen

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_ESTIMATOR = 0, 1, 2, 3

DEFAULT_ESTIMATORS = {
    "compute": ["xi", "zeta_limit", "eta2_binned", "r2"],
    "sweep": ["xi", "eta2_binned"],
    "bench": ["xi_large"],
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _ints(text: str) -> list[int]:
    return [int(float(t)) for t in text.split(",") if t.strip()]


def _names(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="localdep", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"localdep {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--input", type=Path, help="two-column CSV file")
    src.add_argument("--gen", choices=FAMILIES, help="synthetic generator family")
    common.add_argument("--config", type=Path,
                        help="JSON config: a previous output document or a generator spec")
    common.add_argument("--rho", type=float, default=0.0)
    common.add_argument("--f", dest="f", choices=sorted(FUNCTIONS), default="identity")
    common.add_argument("--n", type=int, default=1000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--eps", type=_floats, default=None, help="comma-separated ε list")
    common.add_argument("--delta", type=_floats, default=None, help="comma-separated δ list")
    common.add_argument("--k", type=int, default=None)
    common.add_argument("--bins", type=int, default=None)
    common.add_argument("--rho-grid", type=_floats, default=None)
    common.add_argument("--n-grid", type=_ints, default=None)
    common.add_argument("--reps", type=int, default=1)
    common.add_argument("--estimators", type=_names, default=None)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--repeat", type=int, default=3, help="timing repetitions (bench)")
    common.add_argument("--out", type=Path, default=None)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--force-quadratic", action="store_true",
                        help="allow the O(n²) oracles above their size guard")

    sub.add_parser("compute", parents=[common], help="run estimators on one sample")
    sub.add_parser("sweep", parents=[common], help="ρ-sweep on the Gaussian family")
    sub.add_parser("converge", parents=[common], help="ε and n convergence of ζ")
    sub.add_parser("bench", parents=[common], help="time estimators over an n grid")
    sub.add_parser("selftest", parents=[common], help="quick oracle and hand-example checks")
    return parser


def _load_config(args: argparse.Namespace) -> None:
    """Overlay a JSON config onto parsed arguments (config values win)."""
    doc = json.loads(args.config.read_text(encoding="utf-8"))
    cfg = doc.get("config", doc)
    if "family" in cfg and "gen" not in cfg:  # bare generator spec
        cfg = {**cfg, "gen": cfg["family"]}
    for key, value in cfg.items():
        if key == "command":
            continue
        if key == "input" and value is not None:
            args.input, args.gen = Path(value), None
        elif key == "gen" and value is not None:
            args.gen, args.input = value, None
        elif hasattr(args, key):
            setattr(args, key, value)


def config_dict(args: argparse.Namespace) -> dict:
    return {
        "command": args.command,
        "input": str(args.input) if args.input else None,
        "gen": args.gen,
        "rho": args.rho,
        "f": args.f,
        "n": args.n,
        "seed": args.seed,
        "eps": args.eps,
        "delta": args.delta,
        "k": args.k,
        "bins": args.bins,
        "rho_grid": args.rho_grid,
        "n_grid": args.n_grid,
        "reps": args.reps,
        "estimators": args.estimators,
        "workers": args.workers,
        "format": args.format,
        "force_quadratic": args.force_quadratic,
    }


def _params(args) -> Params:
    return Params(eps=args.eps if args.eps is not None else [0.05], delta=args.delta or [],
                  k=args.k, bins=args.bins, force_quadratic=args.force_quadratic)


def _estimators(args, allowed) -> list[str]:
    names = args.estimators or DEFAULT_ESTIMATORS.get(args.command, [])
    bad = [e for e in names if e not in allowed]
    if bad:
        raise ConfigError(f"unknown estimator(s) {bad}; choose from {list(allowed)}")
    return names


def _spec(args) -> GeneratorSpec:
    try:
        return GeneratorSpec(args.gen, args.n, args.seed, args.rho, args.f)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _check_eps(params: Params) -> None:
    if any(not e > 0 for e in params.eps):
        raise ValueError("ε must be positive")
    if any(not d > 0 for d in params.delta):
        raise ValueError("δ must be positive")


def _emit(args, text: str) -> None:
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_table(args, table: SweepTable, **extra) -> None:
    if args.format == "csv":
        _emit(args, table.to_csv())
    else:
        _emit(args, dumps(document(config_dict(args), table.rows, **extra)))


def cmd_compute(args) -> int:
    if args.input is None and args.gen is None:
        raise ConfigError("compute needs --input PATH or --gen FAMILY")
    names = _estimators(args, ESTIMATORS)
    params = _params(args)
    sample = read_csv(args.input) if args.input else gen(_spec(args))
    _check_eps(params)
    reports = [r.to_dict() for r in compute(sample, names, params, args.seed)]
    if args.format == "csv":
        rows = [{**r, "params": json.dumps(r["params"]), "warnings": "; ".join(r["warnings"])}
                for r in reports]
        _emit(args, SweepTable(["estimator", "value", "n", "seed", "params", "warnings"], rows).to_csv())
    else:
        _emit(args, dumps(document(config_dict(args), reports)))
    return EXIT_OK


def cmd_sweep(args) -> int:
    grid = args.rho_grid if args.rho_grid is not None else [round(0.2 * i, 1) for i in range(6)]
    params = _params(args)
    _check_eps(params)
    table = sweep(grid, args.n, args.reps, args.seed, _estimators(args, ESTIMATORS), params,
                  args.workers)
    _emit_table(args, table)
    return EXIT_OK


def cmd_converge(args) -> int:
    spec = _spec(args) if args.gen else GeneratorSpec("independent", args.n, args.seed)
    table = converge(spec, args.eps or [], args.n_grid or [], args.reps, args.workers)
    _emit_table(args, table)
    return EXIT_OK


def cmd_bench(args) -> int:
    grid = args.n_grid or [100_000, 1_000_000]
    table, checks = bench(grid, _estimators(args, BENCH_ESTIMATORS), args.seed, _params(args),
                          args.repeat)
    _emit_table(args, table, scaling=checks)
    for c in checks:
        verdict = "PASS" if c["passed"] else "FAIL"
        print(f"[{verdict}] {c['estimator']}: time(n={c['n_large']})/time(n={c['n']}) = "
              f"{format_cell(c['ratio'])} (limit {c['limit']})", file=sys.stderr)
    return EXIT_OK if all(c["passed"] for c in checks) else EXIT_ESTIMATOR


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    results = run_selftest(seed=args.seed)
    for name, ok, detail in results:
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_ESTIMATOR


COMMANDS = {"compute": cmd_compute, "sweep": cmd_sweep, "converge": cmd_converge,
            "bench": cmd_bench, "selftest": cmd_selftest}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.config is not None:
            _load_config(args)
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"localdep: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"localdep: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (GuardError, ValueError) as exc:
        print(f"localdep: estimator error: {exc}", file=sys.stderr)
        return EXIT_ESTIMATOR


if __name__ == "__main__":
    sys.exit(main())
