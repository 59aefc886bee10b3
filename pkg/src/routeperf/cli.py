"""Command line entry point: ``routeperf model|sim|compare``.

Exit codes: 0 success or PASS, 1 usage or configuration error, 2 numeric
failure, 3 comparison FAIL.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .compare import CompareError, compare_report
from .config import ConfigError, load_config
from .curves import CurveError, CurveGrid, model_curves
from .quadrature import NumericError
from .runner import SweepAxes, SweepError, report_row, run_scenario, run_sweep, sweep_csv
from .runner import SIM_COLUMNS
from .tables import write_csv

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_FAIL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _floats(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _names(text: str) -> tuple:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def parse_nodes(text: str) -> tuple:
    """``10:70:10`` (inclusive) or ``10,20,40``."""
    try:
        if ":" in text:
            parts = [int(x) for x in text.split(":")]
            if len(parts) == 2:
                parts.append(1)
            lo, hi, step = parts
            if step <= 0 or lo > hi:
                raise ValueError
            return tuple(range(lo, hi + 1, step))
        return tuple(int(x) for x in text.split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad node list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="routeperf", description="Ad-hoc routing models and simulator.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    m = sub.add_parser("model", help="evaluate an analytic model over its grid")
    m.add_argument("kind", choices=("pdr", "delay", "nro"))
    m.add_argument("--lambda", dest="lambdas", type=_floats,
                   help="comma-separated vehicle rates (default: midnight and morning)")
    m.add_argument("--sigma", dest="sigmas", type=_floats, help="comma-separated speed std-devs")
    m.add_argument("--out", type=Path)

    s = sub.add_parser("sim", help="run the packet-level simulator")
    ss = s.add_subparsers(dest="sim_command", required=True, parser_class=_Parser)
    r = ss.add_parser("run", help="one scenario")
    r.add_argument("--config", type=Path, required=True)
    r.add_argument("--seed", type=int)
    r.add_argument("--out", type=Path)
    w = ss.add_parser("sweep", help="scenario grid over nodes, protocols, variants, networks, seeds")
    w.add_argument("--config", type=Path, required=True)
    w.add_argument("--nodes", type=parse_nodes, default=(10, 20, 30, 40, 50, 60, 70))
    w.add_argument("--protocols", type=_names, default=("dsdv", "dsr", "dymo"))
    w.add_argument("--variants", type=_names, default=("default", "modified"))
    w.add_argument("--networks", type=_names, default=("manet", "vanet"))
    w.add_argument("--seeds", type=int, default=5, help="number of seeds, starting at 0")
    w.add_argument("--workers", type=int, default=1)
    w.add_argument("--out", type=Path, help="directory for sweep.csv")

    c = sub.add_parser("compare", help="trend report for a sweep table and a model table")
    c.add_argument("--sim", type=Path, required=True)
    c.add_argument("--model", type=Path, required=True)
    c.add_argument("--out", type=Path)
    return p


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_bytes(text.encode("utf-8"))


def _cmd_model(args) -> int:
    grid = CurveGrid()
    changes = {}
    if args.lambdas and min(args.lambdas) < 0:
        raise UsageError("--lambda values must be >= 0")
    if args.sigmas and min(args.sigmas) <= 0:
        raise UsageError("--sigma values must be > 0")
    if args.lambdas:
        changes.update(lambdas=args.lambdas, lambda_override=True)
    if args.sigmas:
        changes.update(sigmas=args.sigmas)
    if changes:
        grid = CurveGrid(**{**grid.__dict__, **changes})
    _emit(model_curves(args.kind, grid), args.out)
    return EXIT_OK


def _cmd_sim(args) -> int:
    cfg = load_config(args.config)
    if args.sim_command == "run":
        if args.seed is not None:
            cfg = cfg.replace(seed=args.seed).validate()
        rep = run_scenario(cfg)
        key = (cfg.network, cfg.protocol, cfg.variant, cfg.node_count, cfg.seed)
        _emit(write_csv(SIM_COLUMNS, [report_row(key, rep)]), args.out)
        return EXIT_OK
    if args.seeds < 1:
        raise UsageError("--seeds must be >= 1")
    for name, allowed in (("protocols", ("dsdv", "dsr", "dymo")),
                          ("variants", ("default", "modified")),
                          ("networks", ("manet", "vanet"))):
        extra = set(getattr(args, name)) - set(allowed)
        if extra:
            raise UsageError(f"unknown {name}: {', '.join(sorted(extra))}")
    try:
        axes = SweepAxes(node_counts=args.nodes, protocols=args.protocols, variants=args.variants,
                         networks=args.networks, seeds=tuple(range(args.seeds)))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    results = run_sweep(cfg, axes, workers=args.workers)
    _emit(sweep_csv(results), None if args.out is None else args.out / "sweep.csv")
    return EXIT_OK


def _cmd_compare(args) -> int:
    try:
        sim_text = args.sim.read_text(encoding="utf-8")
        model_text = args.model.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read input: {exc}") from None
    rep = compare_report(sim_text, model_text)
    _emit(rep.text(), args.out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "model":
            return _cmd_model(args)
        if args.command == "sim":
            return _cmd_sim(args)
        return _cmd_compare(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, CompareError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CurveError, NumericError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SweepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
