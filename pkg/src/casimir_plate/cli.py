"""Command-line front end.

Usage::

    casimir-plate potential --method far --atom-a 0,0,1 --atom-b 0,0,2
    casimir-plate scan --grid grid.json --method far,wick --output scan.csv --plot scan.png
    casimir-plate compare --grid grid.json --tol 1e-5
    casimir-plate correlation --grid grid.json --k 0.5,1.0,2.0 --output corr.csv
    casimir-plate oracle-check --samples 100 --seed 0
    casimir-plate selftest --seed 0
    casimir-plate version

Exit status: 0 on success, 1 on invalid input, 2 on a numerical failure
(failing rows are still written, flagged in the ``status`` column).
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib.metadata import PackageNotFoundError, version as _dist_version

from . import __version__
from .atoms import StaticAtom, far_zone, load_atom
from .correlations import COMPONENTS, CorrelationGrid, correlation_scan
from .errors import CasimirPlateError, NumericalError, ValidationError
from .geometry import PlateGeometry
from .io import (
    ScanConfig,
    load_grid,
    parse_floats,
    parse_point,
    write_table,
)
from .potential import METHOD_TAGS, PLATE_METHODS, compare_methods, evaluate
from .quadrature import SEMI_INFINITE_MAPS, QuadratureConfig

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2

GEOMETRY_COLUMNS = ["x_a", "y_a", "z_a", "x_b", "y_b", "z_b", "R", "Rbar"]
RESULT_COLUMNS = GEOMETRY_COLUMNS + ["method", "value", "reduced_coefficient", "error_estimate", "status"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _methods(text: str) -> list[str]:
    names = [m.strip() for m in text.split(",") if m.strip()]
    bad = [m for m in names if m not in METHOD_TAGS]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"unknown method(s) {bad}; choose from {sorted(METHOD_TAGS)}")
    return names


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        n = 0
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return n


def _add_quad(p):
    g = p.add_argument_group("quadrature")
    g.add_argument("--rel-tol", type=float)
    g.add_argument("--abs-tol", type=float)
    g.add_argument("--max-subdivisions", type=int)
    g.add_argument("--extrapolation-order", type=int)
    g.add_argument("--map", dest="semi_infinite_map", choices=SEMI_INFINITE_MAPS)


def _add_output(p, plot=True):
    p.add_argument("--output", "-o", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), help="output format (default: csv)")
    if plot:
        p.add_argument("--plot", metavar="PNG", help="also render a figure to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="casimir-plate", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("potential", help="potential for one geometry")
    p.add_argument("--method", type=_methods, default=["far"],
                   help="comma-separated subset of far,wick,abel,double,free")
    p.add_argument("--atoms-a", help="atom JSON file for atom A (default: unit static polarizability)")
    p.add_argument("--atoms-b", help="atom JSON file for atom B")
    p.add_argument("--atom-a", required=True, type=parse_point, metavar="X,Y,Z")
    p.add_argument("--atom-b", required=True, type=parse_point, metavar="X,Y,Z")
    p.add_argument("--static", action="store_true", help="use zero-frequency polarizabilities throughout")
    _add_quad(p)
    _add_output(p, plot=False)

    p = sub.add_parser("scan", help="potentials over a grid of geometries")
    p.add_argument("--grid", required=True)
    p.add_argument("--method", type=_methods, help="override the grid's method list")
    p.add_argument("--static", action="store_true")
    p.add_argument("--jobs", type=_positive_int, default=1)
    _add_quad(p)
    _add_output(p)

    p = sub.add_parser("compare", help="cross-validate the plate methods on a grid")
    p.add_argument("--grid", required=True)
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--method", type=_methods, help=f"default: {','.join(PLATE_METHODS)}")
    p.add_argument("--dynamic", action="store_true",
                   help="keep dynamic polarizabilities in the correlation methods")
    p.add_argument("--jobs", type=_positive_int, default=1)
    _add_quad(p)
    _add_output(p)

    p = sub.add_parser("correlation", help="vacuum field-correlation maps")
    p.add_argument("--grid", required=True)
    p.add_argument("--k", type=parse_floats, help="comma-separated wavenumbers (overrides the grid)")
    _add_output(p)

    p = sub.add_parser("oracle-check", help="closed-form tensors against brute-force oracles")
    p.add_argument("--samples", type=_positive_int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--node-budget", type=int, default=128)
    _add_output(p, plot=False)

    p = sub.add_parser("selftest", help="randomised invariant checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=_positive_int, default=100)

    sub.add_parser("version", help="print the package version")
    return parser


def _quad_from(args, base: QuadratureConfig) -> QuadratureConfig:
    overrides = {
        name: getattr(args, name)
        for name in ("rel_tol", "abs_tol", "max_subdivisions", "extrapolation_order", "semi_infinite_map")
        if getattr(args, name, None) is not None
    }
    return base.with_overrides(**overrides) if overrides else base


def _emit(text: str, path) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)


def _result_row(geometry, method, result=None, failure=None) -> dict:
    row = geometry.as_dict() if isinstance(geometry, PlateGeometry) else {}
    row["method"] = METHOD_TAGS[method]
    row["method_key"] = method
    if result is not None:
        row.update(value=result.value, reduced_coefficient=result.reduced_coefficient,
                   error_estimate=result.error_estimate, status="ok")
    else:
        row["status"] = failure
    return row


def _evaluate_one(task) -> tuple[dict, int]:
    geometry, m, atom_a, atom_b, quad = task
    if not isinstance(geometry, PlateGeometry):
        return _result_row(geometry, m, failure=f"invalid geometry: {geometry}"), EXIT_INVALID
    try:
        return _result_row(geometry, m, evaluate(m, atom_a, atom_b, geometry, quad)), EXIT_OK
    except NumericalError as exc:
        return _result_row(geometry, m, failure=f"{type(exc).__name__}: {exc}"), EXIT_NUMERICAL
    except ValidationError as exc:
        return _result_row(geometry, m, failure=f"{type(exc).__name__}: {exc}"), EXIT_INVALID


def _evaluate_rows(cfg: ScanConfig, methods, jobs: int = 1) -> tuple[list[dict], int]:
    """One row per (geometry, method), in grid order whatever ``jobs`` is."""
    atom_a, atom_b = cfg.atom_a, cfg.atom_b
    if cfg.static:
        atom_a, atom_b = far_zone(atom_a), far_zone(atom_b)
    tasks = [(g, m, atom_a, atom_b, cfg.quad) for g in cfg.geometries for m in methods]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_evaluate_one, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = [_evaluate_one(t) for t in tasks]
    return [row for row, _ in results], max((code for _, code in results), default=EXIT_OK)


def cmd_potential(args) -> int:
    atom_a = load_atom(args.atoms_a) if args.atoms_a else StaticAtom(1.0)
    atom_b = load_atom(args.atoms_b) if args.atoms_b else StaticAtom(1.0)
    geometry = PlateGeometry(args.atom_a, args.atom_b)
    cfg = ScanConfig(geometries=[geometry], atom_a=atom_a, atom_b=atom_b,
                     quad=_quad_from(args, QuadratureConfig()), static=args.static)
    rows, status = _evaluate_rows(cfg, args.method)
    text = write_table(rows, RESULT_COLUMNS, args.output, args.format or "csv", "potential")
    _emit(text, args.output)
    return status


def cmd_scan(args) -> int:
    cfg = load_grid(args.grid)
    cfg.quad = _quad_from(args, cfg.quad)
    cfg.static = cfg.static or args.static
    if not cfg.geometries:
        raise ValidationError(f"{args.grid}: grid defines no geometries")
    rows, status = _evaluate_rows(cfg, args.method or cfg.methods, args.jobs)
    output = args.output or cfg.output
    text = write_table(rows, RESULT_COLUMNS, output, args.format or cfg.format, "scan")
    _emit(text, output)
    if args.plot:
        from .plotting import plot_scan

        plot_scan(rows, args.plot)
    return status


COMPARE_FIXED = GEOMETRY_COLUMNS


def cmd_compare(args) -> int:
    cfg = load_grid(args.grid)
    cfg.quad = _quad_from(args, cfg.quad)
    methods = tuple(args.method or PLATE_METHODS)
    report = compare_methods(cfg.atom_a, cfg.atom_b, cfg.geometries, cfg.quad, methods=methods,
                             tol=args.tol, far_zone_only=not args.dynamic, jobs=args.jobs)
    columns = COMPARE_FIXED + [f"value_{m}" for m in methods] + ["max_deviation", "passed", "status"]
    rows = []
    for r in report.rows:
        row = r.geometry.as_dict() if r.geometry is not None else {}
        for m, res in r.results.items():
            row[f"value_{m}"] = res.value
        row["max_deviation"] = r.max_deviation
        row["passed"] = r.passed
        if r.error:
            row["status"] = f"invalid geometry: {r.error}"
        elif r.failures:
            row["status"] = "; ".join(f"{m}: {msg}" for m, msg in sorted(r.failures.items()))
        else:
            row["status"] = "ok" if r.passed else "tolerance exceeded"
        rows.append(row)
    output = args.output or cfg.output
    meta = {"tol": args.tol, "methods": list(methods), "all_passed": report.all_passed,
            "quadrature": cfg.quad.to_dict()}
    text = write_table(rows, columns, output, args.format or cfg.format, "compare", meta)
    _emit(text, output)
    n_pass = sum(r.passed for r in report.rows)
    print(f"compare: {n_pass}/{len(report.rows)} grid points within tol={args.tol:g}"
          f" ({'all pass' if report.all_passed else 'FAILURES'})", file=sys.stderr)
    if args.plot:
        from .plotting import plot_compare

        plot_compare(rows, args.tol, args.plot)
    if report.numerical_failures or any(r.results and not r.passed for r in report.rows):
        return EXIT_NUMERICAL
    if any(r.error for r in report.rows):
        return EXIT_INVALID
    return EXIT_OK


def cmd_correlation(args) -> int:
    cfg = load_grid(args.grid)
    if cfg.axes is None:
        raise ValidationError(f"{args.grid}: correlation maps need z_a, z_b and rho axes")
    k = tuple(args.k) if args.k else cfg.k
    rows = correlation_scan(CorrelationGrid(cfg.axes["z_a"], cfg.axes["z_b"], cfg.axes["rho"], k))
    columns = ["k", "z_a", "z_b", "rho", *COMPONENTS]
    output = args.output or cfg.output
    text = write_table(rows, columns, output, args.format or cfg.format, "correlation")
    _emit(text, output)
    if args.plot:
        from .plotting import plot_correlation

        plot_correlation(rows, args.plot)
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    from .checks import oracle_rows

    rows = oracle_rows(args.seed, args.samples, args.node_budget)
    columns = list(rows[0]) if rows else ["k"]
    text = write_table(rows, columns, args.output, args.format or "csv", "oracle-check")
    _emit(text, args.output)
    bad = [r for r in rows if r["tau_max_abs_diff"] > 1e-9 or r["dipole_max_abs_diff"] > 1e-6]
    return EXIT_NUMERICAL if bad else EXIT_OK


def cmd_selftest(args) -> int:
    from .checks import run_selftest

    outcomes = run_selftest(args.seed, args.samples)
    for o in outcomes:
        print(f"{'PASS' if o.passed else 'FAIL'}  {o.name}  (worst {o.worst:.3e}, limit {o.limit:.0e})")
    return EXIT_OK if all(o.passed for o in outcomes) else EXIT_NUMERICAL


def cmd_version(args) -> int:
    try:
        v = _dist_version("artifact")
    except PackageNotFoundError:
        v = __version__
    print(f"casimir-plate {v}")
    return EXIT_OK


COMMANDS = {
    "potential": cmd_potential,
    "scan": cmd_scan,
    "compare": cmd_compare,
    "correlation": cmd_correlation,
    "oracle-check": cmd_oracle_check,
    "selftest": cmd_selftest,
    "version": cmd_version,
}


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"casimir-plate {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"casimir-plate {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (CasimirPlateError, OSError) as exc:
        print(f"casimir-plate {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
