"""Command-line entry point: ``hypcount <subcommand> [flags]``.

Exit codes: 0 on success, 1 when ``selftest`` finds a failing check, 2 on invalid input or an
unwritable output directory (a JSON error report is printed and written to ``error.json``
when possible), 3 when a node budget ran out (outputs are written with ``partial: true`` in
their header).
"""

from __future__ import annotations
import argparse
from collections.abc import Callable, Mapping, Sequence
from dataclasses import asdict, dataclass, field
import hashlib
import json
import math
from pathlib import Path
import sys
from typing import Any, NoReturn

import pandas as pd
from rich.console import Console
from rich.table import Table

from hypcount import __version__
from hypcount.config import OUTPUT_DIR_ENV, FitConfig, RunConfig, Tolerances, default_output_dir
from hypcount.counting import (
    count_loops,
    count_ortho,
    count_primitive_geodesics,
    fit_exponential,
    geodesic_ratio,
)
from hypcount.errors import (
    BudgetExceededError,
    HypcountError,
    InsufficientDataError,
    ValidationError,
)
from hypcount.exponent import estimate_delta
from hypcount.group.spec import GroupSpec
from hypcount.io.export import OutputHeader, sanitize, write_csv, write_json
from hypcount.io.schema import load_family, load_group
from hypcount.logging import init_logger
from hypcount.measures import partition_masses, ps_estimate
from hypcount.selftest import run_selftest
from hypcount.sweep import run_sweep
from hypcount.types import Subcommand

__all__ = ["build_parser", "main"]

LOGGER = init_logger(__name__)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise ValidationError(f"Invalid arguments: {message}", details={"prog": self.prog})


def _floats(text: str, count: int) -> tuple[float, ...]:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != count:
        raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers, got '{text}'")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{text}' is not a list of numbers") from None


def _window(text: str) -> tuple[float, float]:
    lo, hi = _floats(text, 2)
    return lo, hi


def _bodies(text: str) -> tuple[str, str]:
    names = [name.strip() for name in text.split(",")]
    if len(names) != 2 or not all(names):
        raise argparse.ArgumentTypeError(f"expected two body names 'D-,D+', got '{text}'")
    return names[0], names[1]


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--group", type=Path, help="Group file (.grp).")
    common.add_argument("--family", type=Path, help="Family file (.fam), for 'sweep'.")
    common.add_argument("--T", type=float, help="Displacement / orthogeodesic length cutoff.")
    common.add_argument("--L", type=float, help="Closed geodesic length cutoff.")
    common.add_argument("--bodies", type=_bodies, help="Body names 'D-,D+' for 'ortho'.")
    common.add_argument("--window", type=_window, help="Fit window 't_lo,t_hi'.")
    common.add_argument("--delta", type=float, help="Critical exponent; estimated when omitted.")
    common.add_argument(
        "--budget", type=int, default=20_000_000, help="Node budget per enumeration."
    )
    common.add_argument("--workers", type=int, default=1, help="Parallel workers (-1: all cores).")
    common.add_argument(
        "--out", type=Path, default=None, help=f"Output directory (default: ${OUTPUT_DIR_ENV})."
    )
    common.add_argument("--tol", type=float, default=None, help="Geometric tolerance.")
    common.add_argument("--seed", type=int, default=47, help="Seed of randomised self-checks.")

    parser = _Parser(
        prog="hypcount",
        description="Orbit counting, critical exponents and Patterson-Sullivan measures.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")
    helps = {
        Subcommand.EXPONENT: "estimate the critical exponent and the bottom of the spectrum",
        Subcommand.LOOPS: "count geodesic loops at the basepoint",
        Subcommand.GEODESICS: "count primitive closed geodesics",
        Subcommand.ORTHO: "count orthogeodesics between two named bodies",
        Subcommand.PS_MEASURE: "estimate the Patterson-Sullivan measure",
        Subcommand.SWEEP: "run a convergence sweep over a family",
        Subcommand.SELFTEST: "run the built-in oracle suite",
    }
    for command, text in helps.items():
        sub.add_parser(str(command), parents=[common], help=text, description=text.capitalize())
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    tolerances = Tolerances()
    if args.tol is not None:
        tolerances = Tolerances(geometry=args.tol, classification=args.tol)
    return RunConfig(
        subcommand=Subcommand(args.subcommand),
        group=args.group,
        family=args.family,
        T=args.T,
        L=args.L,
        bodies=args.bodies,
        window=args.window,
        delta=args.delta,
        output_dir=default_output_dir() if args.out is None else args.out,
        workers=args.workers,
        node_budget=args.budget,
        tolerances=tolerances,
        seed=args.seed,
    )


def _require(run: RunConfig, *names: str) -> None:
    missing = [f"--{name}" for name in names if getattr(run, name) is None]
    if missing:
        raise ValidationError(
            f"'{run.subcommand}' requires {', '.join(missing)}.",
            details={"subcommand": str(run.subcommand), "missing": missing},
        )


def _digest(path: Path | None) -> str | None:
    if path is None or not path.is_file():
        return None
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _hashed_config(run: RunConfig) -> dict[str, Any]:
    """Everything that determines the outputs; worker count and output paths are excluded."""
    source = run.family if run.subcommand is Subcommand.SWEEP else run.group
    return {
        "subcommand": str(run.subcommand),
        "input": None if source is None else source.name,
        "input_sha256": _digest(source),
        "T": run.T,
        "L": run.L,
        "bodies": run.bodies,
        "window": run.window,
        "delta": run.delta,
        "node_budget": run.node_budget,
        "tolerances": asdict(run.tolerances),
        "seed": run.seed,
    }


@dataclass
class _Outcome:
    """What a subcommand produced, before it is written to disk."""

    tables: list[Table] = field(default_factory=list)
    frames: dict[str, pd.DataFrame] = field(default_factory=dict)
    reports: dict[str, dict[str, Any]] = field(default_factory=dict)
    certificates: dict[str, Any] = field(default_factory=dict)
    partial: bool = False
    exit_code: int = 0


def _summary(title: str, values: Mapping[str, Any]) -> Table:
    table = Table(title=title, show_header=True, header_style="bold")
    table.add_column("quantity")
    table.add_column("value", justify="right")
    for key, value in values.items():
        if isinstance(value, float):
            text = "nan" if math.isnan(value) else f"{value:.6g}"
        else:
            text = str(value)
        table.add_row(key, text)
    return table


def _group(run: RunConfig) -> GroupSpec:
    _require(run, "group")
    assert run.group is not None
    return load_group(run.group, tolerances=run.tolerances)


def _exponent(run: RunConfig) -> _Outcome:
    _require(run, "T")
    assert run.T is not None
    spec = _group(run)
    estimate = estimate_delta(spec, run.T, config=run.enumeration)
    report = {"group": spec.name, **estimate.to_dict()}
    return _Outcome(
        tables=[_summary(f"critical exponent of '{spec.name}'", report)],
        reports={"exponent": report},
        certificates={"orbit": estimate.certificate.to_dict()},
    )


def _loops(run: RunConfig) -> _Outcome:
    _require(run, "T")
    assert run.T is not None
    spec = _group(run)
    series = count_loops(spec, None, run.T, config=run.enumeration)
    window = run.window or (run.T / 2, run.T)
    report: dict[str, Any] = {"group": spec.name, "diagnostics": series.diagnostics()}
    try:
        fit = fit_exponential(series, window)
        report["fit"] = {**fit.to_dict(), "certificate": series.certificate.to_dict()}
    except InsufficientDataError as exc:
        report["fit"], report["note"] = None, str(exc)
    flat = {**series.diagnostics(), **(report["fit"] or {})}
    flat.pop("certificate", None)
    return _Outcome(
        tables=[_summary(f"loops of '{spec.name}'", flat)],
        frames={"loops": series.to_frame()},
        reports={"loops": report},
        certificates={"orbit": series.certificate.to_dict()},
    )


def _geodesics(run: RunConfig) -> _Outcome:
    _require(run, "L")
    assert run.L is not None
    spec = _group(run)
    series = count_primitive_geodesics(spec, run.L, config=run.enumeration)
    delta = run.delta
    if delta is None and run.T is not None:
        delta = estimate_delta(spec, run.T, config=run.enumeration).delta_series
    ratio = math.nan
    if delta is not None and delta > 0:
        ratio = geodesic_ratio(series, delta, run.L)
    report = {
        "group": spec.name,
        "diagnostics": series.diagnostics(),
        "count": int(series.N(run.L)),
        "delta": delta,
        "geodesic_ratio": ratio,
    }
    flat = {"count": report["count"], "delta": delta, "geodesic_ratio": ratio}
    return _Outcome(
        tables=[_summary(f"primitive geodesics of '{spec.name}' up to L={run.L:g}", flat)],
        frames={"geodesics": series.to_frame()},
        reports={"geodesics": report},
        certificates={"classes": series.certificate.to_dict()},
    )


def _ortho(run: RunConfig) -> _Outcome:
    _require(run, "T", "bodies")
    assert run.T is not None and run.bodies is not None
    spec = _group(run)
    fit_config = FitConfig()
    series = count_ortho(
        spec, run.bodies[0], run.bodies[1], run.T, config=run.enumeration, fit_config=fit_config
    )
    window = run.window or (run.T / 2, run.T)
    report: dict[str, Any] = {"group": spec.name, "diagnostics": series.diagnostics()}
    try:
        fit = fit_exponential(series, window, config=fit_config)
        report["fit"] = {**fit.to_dict(), "certificate": series.certificate.to_dict()}
    except InsufficientDataError as exc:
        report["fit"], report["note"] = None, str(exc)
    flat = {**series.diagnostics(), **(report["fit"] or {})}
    flat.pop("certificate", None)
    return _Outcome(
        tables=[_summary(series.description, flat)],
        frames={"ortho": series.to_frame()},
        reports={"ortho": report},
        certificates={"orbit": series.certificate.to_dict()},
    )


def _ps_measure(run: RunConfig) -> _Outcome:
    _require(run, "T")
    assert run.T is not None
    spec = _group(run)
    delta = run.delta
    if delta is None:
        delta = estimate_delta(spec, run.T, config=run.enumeration).delta_series
    mu = ps_estimate(spec, delta, run.T, config=run.enumeration)
    report = {
        "group": spec.name,
        "delta_used": mu.delta_used,
        "cutoff": mu.cutoff,
        "atoms": len(mu),
        "raw_mass": mu.raw_mass,
        "reference": str(mu.reference),
        "partition_masses": partition_masses(mu),
    }
    flat = {key: report[key] for key in ("delta_used", "atoms", "raw_mass")}
    return _Outcome(
        tables=[_summary(f"Patterson-Sullivan estimate of '{spec.name}'", flat)],
        frames={"ps_measure": mu.to_frame()},
        reports={"ps_measure": report},
        certificates={
            "orbit": {"kind": "pruned", "cutoff": run.T, "slack": spec.max_generator_displacement}
        },
    )


def _sweep(run: RunConfig) -> _Outcome:
    _require(run, "family")
    assert run.family is not None
    family = load_family(run.family, tolerances=run.tolerances)
    report = run_sweep(
        family,
        run.enumeration,
        workers=run.workers,
        progress=sys.stdout.isatty(),
    )
    frame = report.to_frame()
    table = Table(title=f"sweep '{family.name}'", header_style="bold")
    columns = ["k", "delta_series", "lambda0", "loop_C_hat", "ortho_C_hat", "failed"]
    for column in columns:
        table.add_column(column, justify="right")
    for record in frame[columns].itertuples(index=False):
        table.add_row(*(f"{v:.6g}" if isinstance(v, float) else str(v) for v in record))
    failed = any(row.failed for row in (*report.rows, report.limit))
    return _Outcome(
        tables=[table],
        frames={"sweep": frame},
        reports={"sweep": report.to_dict()},
        certificates={"sweep": report.certificates},
        partial=failed,
        exit_code=3 if failed else 0,
    )


def _selftest(run: RunConfig) -> _Outcome:
    results = run_selftest(run.seed)
    table = Table(title="selftest", header_style="bold")
    for column in ("check", "result", "detail"):
        table.add_column(column)
    for result in results:
        status = "[green]PASS" if result.passed else "[red]FAIL"
        table.add_row(result.name, status, result.detail)
    passed = all(result.passed for result in results)
    report = {
        "passed": passed,
        "checks": [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in results],
    }
    return _Outcome(tables=[table], reports={"selftest": report}, exit_code=0 if passed else 1)


_HANDLERS: dict[Subcommand, Callable[[RunConfig], _Outcome]] = {
    Subcommand.EXPONENT: _exponent,
    Subcommand.LOOPS: _loops,
    Subcommand.GEODESICS: _geodesics,
    Subcommand.ORTHO: _ortho,
    Subcommand.PS_MEASURE: _ps_measure,
    Subcommand.SWEEP: _sweep,
    Subcommand.SELFTEST: _selftest,
}


def _write(outcome: _Outcome, run: RunConfig) -> list[Path]:
    header = OutputHeader(
        version=__version__,
        config=_hashed_config(run),
        certificates=outcome.certificates,
        partial=outcome.partial,
    )
    out = run.output_dir
    written = [
        write_csv(frame, out / f"{name}.csv", header) for name, frame in outcome.frames.items()
    ]
    written += [
        write_json(report, out / f"{name}.json", header) for name, report in outcome.reports.items()
    ]
    return written


def _report_error(exc: HypcountError, output_dir: Path) -> None:
    payload = {
        "error": type(exc).__name__,
        "message": str(exc),
        "details": sanitize(getattr(exc, "details", {})),
    }
    text = json.dumps(payload, sort_keys=True, indent=2)
    sys.stdout.write(text + "\n")
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
        (output_dir / "error.json").write_text(text + "\n", encoding="utf-8")
    except OSError as err:
        LOGGER.warning("Could not write error report to '%s': %s", output_dir, err)


def _unwritable(output_dir: Path, err: OSError) -> ValidationError:
    return ValidationError(
        f"Cannot write to the output directory '{output_dir}': {err.strerror or err}.",
        details={"output_dir": str(output_dir)},
    )


def main(argv: Sequence[str] | None = None) -> int:
    output_dir = default_output_dir()
    try:
        args = build_parser().parse_args(argv)
        output_dir = default_output_dir() if args.out is None else args.out
        run = _run_config(args)
    except HypcountError as exc:
        _report_error(exc, output_dir)
        return 2
    try:
        outcome = _HANDLERS[run.subcommand](run)
    except BudgetExceededError as exc:
        LOGGER.error("%s", exc)
        header = OutputHeader(version=__version__, config=_hashed_config(run), partial=True)
        try:
            write_json(
                {"error": type(exc).__name__, "message": str(exc), "stats": exc.stats.to_dict()},
                run.output_dir / "partial.json",
                header,
            )
        except OSError as err:
            _report_error(_unwritable(run.output_dir, err), run.output_dir)
            return 2
        return 3
    except HypcountError as exc:
        _report_error(exc, run.output_dir)
        return 2
    console = Console()
    for table in outcome.tables:
        console.print(table)
    try:
        written = _write(outcome, run)
    except OSError as err:
        _report_error(_unwritable(run.output_dir, err), run.output_dir)
        return 2
    for path in written:
        LOGGER.info("Wrote %s", path)
    return outcome.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
