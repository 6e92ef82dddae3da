"""
Command line entry point: ``resolvent-lab <command> ...``.

Exit codes: 0 all checks pass, 1 a check failed, 2 configuration or
precondition error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import Sequence

from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from .errors import NumericalFailure, ResolventLabError
from .runtime.geometry import find_r0, orders, r0_closed_form, radii_resolvent
from .runtime.renderers import render_image_curves, write_curves_csv, write_curves_svg
from .runtime.resolvent import resolve_in_disk
from .runtime.suite import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_PASS, default_registry, run_suite
from .utils.load import default_suite_path, load_generator, load_suite_config

logger = logging.getLogger(__name__)
console = Console()


def parse_complex(text: str) -> complex:
    """Parse ``0.3+0.1i`` (``i`` or ``j``) into a complex number."""
    cleaned = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(cleaned)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def parse_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def list_checks(names: Sequence[str] = ()) -> int:
    """Print the registered checks, or only ``names`` when given (unknown names exit 2)."""
    registry = default_registry()
    try:
        definitions = registry.require(names) if names else list(registry.checks())
    except KeyError as exc:
        console.print(f"[red]error:[/red] {exc.args[0]}")
        return EXIT_CONFIG
    table = Table(title=f"Registered checks ({len(definitions)} of {len(registry)})")
    table.add_column("Check", style="bold")
    table.add_column("Module")
    table.add_column("Runs")
    table.add_column("Verifies")
    for d in definitions:
        name = d.name.value
        runs = "per r" if d.per_r else "per generator"
        table.add_row(name, d.module.value, runs, registry.describe(name))
    console.print(table)
    return EXIT_PASS


def cmd_r0(args: argparse.Namespace) -> int:
    bisected, closed = find_r0(), r0_closed_form()
    console.print(f"r0 (bisection)   {bisected:.15f}")
    console.print(f"r0 (closed form) {closed:.15f}")
    console.print(f"difference       {abs(bisected - closed):.3e}")
    return EXIT_PASS


def cmd_orders(args: argparse.Namespace) -> int:
    report = orders(args.q, args.r)
    table = Table(title=f"Orders for q = {args.q}, r = {args.r:g}")
    table.add_column("Quantity")
    table.add_column("Value", justify="right")
    for k, v in report.as_dict().items():
        table.add_row(k, str(v))
    radii = radii_resolvent(args.q, args.r)
    for name, value in zip(("rho", "rho1", "rho2", "rho3"), radii):
        table.add_row(name, f"{value!r}")
    table.add_row("rho2_sharp", f"{radii.rho2_sharp!r}")
    console.print(table)
    return EXIT_PASS


def cmd_resolve(args: argparse.Namespace) -> int:
    g = load_generator(args.gen)
    result = resolve_in_disk(g, args.r, [args.w])[0]
    console.print(str(result))
    return EXIT_PASS


def cmd_render(args: argparse.Namespace) -> int:
    g = load_generator(args.gen)
    curves = render_image_curves(g, args.r, args.circles, angles=args.angles)
    out = Path(args.out)
    stem = f"{g.name}_r{args.r:g}"
    write_curves_csv(curves, out / f"{stem}.csv")
    write_curves_svg(curves, out / f"{stem}.svg")
    for c in curves:
        console.print(repr(c))
    console.print(f"wrote {out / stem}.csv and .svg")
    return EXIT_PASS


def cmd_suite(args: argparse.Namespace) -> int:
    suite = load_suite_config(args.config or default_suite_path())
    result = run_suite(suite, output_dir=Path(args.output_dir) if args.output_dir else None, threads=args.threads)
    table = Table(title=f"Suite results ({result.output_dir})")
    table.add_column("Task")
    table.add_column("Pass")
    table.add_column("Worst margin", justify="right")
    for o in result.outcomes:
        task = f"{o.task.generator.name}/{o.task.filename.removesuffix('.json')}"
        if o.report is None:
            table.add_row(task, "[red]error[/red]", o.error or "")
        else:
            mark = "[green]yes[/green]" if o.report.passed else "[red]no[/red]"
            table.add_row(task, mark, f"{o.report.worst_margin:.6g}")
    console.print(table)
    s = result.summary
    console.print(f"total {s.total}  passed {s.passed}  failed {s.failed}  skipped {s.skipped}  errors {s.errors}")
    return result.exit_code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resolvent-lab",
        description="Nonlinear resolvents of semigroup generators on the unit disk.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG.")
    parser.add_argument(
        "--list-checks",
        nargs="*",
        metavar="CHECK",
        default=None,
        help="List the registered checks (or only the named ones) and exit.",
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("r0", help="Print r0 by bisection and by the closed form.")
    p.set_defaults(func=cmd_r0)

    p = sub.add_parser("orders", help="Print the starlikeness orders and radii for (q, r).")
    p.add_argument("--q", type=parse_complex, default=1 + 0j)
    p.add_argument("--r", type=float, required=True)
    p.set_defaults(func=cmd_orders)

    p = sub.add_parser("resolve", help="Evaluate G_r(w) for a generator document or bundled name.")
    p.add_argument("--gen", required=True, help="Generator document path or bundled name (linear, koebe, ...).")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--w", type=parse_complex, required=True, help="Target point, e.g. 0.3+0.1i.")
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("render", help="Write image curves of circles under G_r as CSV and SVG.")
    p.add_argument("--gen", required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--circles", type=parse_floats, default=[0.5, 0.9])
    p.add_argument("--angles", type=int, default=256)
    p.add_argument("--out", default="curves")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("suite", help="Run a suite configuration (the bundled default if omitted).")
    p.add_argument("--config", default=None)
    p.add_argument("--output-dir", default=None)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    if args.list_checks is not None:
        return list_checks(args.list_checks)
    if args.command is None:
        parser.print_help()
        return EXIT_CONFIG
    try:
        return args.func(args)
    except NumericalFailure as exc:
        console.print(f"[red]numerical failure:[/red] {exc}")
        return EXIT_NUMERICAL
    except (ResolventLabError, ValueError) as exc:
        console.print(f"[red]error:[/red] {exc}")
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
