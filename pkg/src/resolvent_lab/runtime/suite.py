"""
Suite orchestration: expand a loaded configuration into (generator, r, check)
tasks, run them on a thread pool, and write one JSON report per task plus a
summary.

Task order is generator-major, then check (configuration order), then r, and
every output is produced in that order regardless of which worker finished
first.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Optional

from ..base import CheckModule, CheckName
from ..errors import ConfigError, NumericalFailure, ResolventLabError
from ..schema.dump import dump_json, dump_yaml
from ..schema.registry import CheckDefinition, CheckRegistry
from ..schema.schema_model import CheckReport, SuiteSummary
from ..utils.env import thread_cap
from .generator import AtomicHerglotz, GeneratorSpec
from .geometry import (
    CONVEXITY_SLACK,
    check_hyperbolic_convexity,
    check_lemma_bounds,
    check_starlike_disk,
    check_subordination,
    find_r0,
)
from .grid import SamplingGrid
from .resolvent import SolverConfig
from .semigroup import (
    FLOW_SLACK,
    check_normalized_convergence,
    check_sector,
    check_squeezing,
    check_uniform_bound,
    resolvent_generator_suite,
    theorem_sector,
)

if TYPE_CHECKING:
    from ..utils.load import LoadedSuite

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

SECTOR_START = 0.5
SECTOR_S_END = 20.0
SECTOR_RAYS = 9


@dataclass(frozen=True)
class CheckTask:
    generator: GeneratorSpec
    check: CheckDefinition
    r: float | None
    grid: SamplingGrid
    solver: SolverConfig
    slack: float
    r_values: tuple[float, ...]

    @property
    def filename(self) -> str:
        suffix = f"_r{self.r:g}" if self.r is not None else ""
        return f"{self.check.name.value}{suffix}.json"

    @property
    def relpath(self) -> Path:
        return Path(self.generator.name) / self.filename

    def __repr__(self) -> str:
        r = f" r={self.r:g}" if self.r is not None else ""
        return f"<CheckTask {self.generator.name}/{self.check.name.value}{r}>"


@dataclass(frozen=True)
class TaskOutcome:
    task: CheckTask
    report: CheckReport | None = None
    error: str | None = None
    numerical: bool = False


@dataclass(frozen=True)
class SuiteResult:
    summary: SuiteSummary
    outcomes: tuple[TaskOutcome, ...]
    skipped: tuple[str, ...]
    output_dir: Path
    numerical_failures: int = 0
    precondition_errors: int = 0
    files: tuple[Path, ...] = field(default_factory=tuple)

    @property
    def exit_code(self) -> int:
        if self.numerical_failures:
            return EXIT_NUMERICAL
        if self.precondition_errors:
            return EXIT_CONFIG
        return EXIT_PASS if self.summary.all_passed else EXIT_FAILURE

    @property
    def reports(self) -> list[CheckReport]:
        return [o.report for o in self.outcomes if o.report is not None]

    def __repr__(self) -> str:
        return f"<SuiteResult exit={self.exit_code} {self.summary!r}>"


# ---------------------------------------------------------------------------
# Preconditions
# ---------------------------------------------------------------------------


def _centered(g: GeneratorSpec) -> Optional[str]:
    if not g.centered:
        return f"tau = {g.tau} (theorem checks need tau = 0)"
    if not g.q.real > 0.0:
        return f"Re q = {g.q.real} (theorem checks need Re q > 0)"
    return None


def _above_r0(g: GeneratorSpec, r: Optional[float]) -> Optional[str]:
    reason = _centered(g)
    if reason or r is None:
        return reason
    x = r * g.q.real
    r0 = find_r0()
    return None if x > r0 else f"r Re q = {x:g} must exceed r0 = {r0:.6f}"


def _atomic_above_r0(g: GeneratorSpec, r: Optional[float]) -> Optional[str]:
    if not isinstance(g.herglotz, AtomicHerglotz):
        return "lemma bounds need an atomic Herglotz measure"
    return _above_r0(g, r)


def _centered_any_r(g: GeneratorSpec, r: Optional[float]) -> Optional[str]:
    return _centered(g)


def _six_or_real_q(g: GeneratorSpec, r: Optional[float]) -> Optional[str]:
    reason = _centered(g)
    if reason or r is None:
        return reason
    x = r * g.q.real
    if x >= 6.0 or g.q.imag == 0.0:
        return None
    return f"r Re q = {x:g} must be at least 6 when q is not real"


def _above_two(g: GeneratorSpec, r: Optional[float]) -> Optional[str]:
    reason = _centered(g)
    if reason or r is None:
        return reason
    x = r * g.q.real
    return None if x > 2.0 else f"r Re q = {x:g} must exceed 2"


# ---------------------------------------------------------------------------
# Runners
# ---------------------------------------------------------------------------


def _run_starlike(t: CheckTask) -> CheckReport:
    return check_starlike_disk(t.generator, t.r, t.grid, t.solver, slack=t.slack)


def _run_convexity(t: CheckTask) -> CheckReport:
    return check_hyperbolic_convexity(t.generator, t.r, t.grid, t.solver, slack=max(t.slack, CONVEXITY_SLACK))


def _run_lemma(t: CheckTask) -> CheckReport:
    return check_lemma_bounds(t.generator, t.r, t.grid, slack=t.slack)


def _run_subordination(t: CheckTask) -> CheckReport:
    return check_subordination(t.generator, t.r, t.grid, slack=t.slack)


def _run_squeezing(t: CheckTask) -> CheckReport:
    return check_squeezing(t.generator, t.grid, slack=t.slack)


def _run_sector(t: CheckTask) -> CheckReport:
    sector = theorem_sector(t.generator, t.grid)
    return check_sector(t.generator, SECTOR_START, sector, SECTOR_S_END, SECTOR_RAYS)


def _run_resolvent_generator(t: CheckTask) -> CheckReport:
    return resolvent_generator_suite(t.generator, t.r, t.grid, t.solver, slack=t.slack, flow_slack=FLOW_SLACK)


def _run_uniform_bound(t: CheckTask) -> CheckReport:
    return check_uniform_bound(t.generator, [t.r], t.grid, t.solver, slack=t.slack)


def _run_normalized_convergence(t: CheckTask) -> CheckReport:
    return check_normalized_convergence(t.generator, sorted(set(t.r_values)), 0.9, t.solver)


def default_registry() -> CheckRegistry:
    geometry, semigroup = CheckModule.geometry, CheckModule.semigroup
    return CheckRegistry(
        [
            CheckDefinition(
                CheckName.starlike_disk,
                geometry,
                "w G_r'/G_r lies in the disk centered 1/(1-A^2) of radius A/(1-A^2)",
                True,
                _run_starlike,
                _above_r0,
            ),
            CheckDefinition(
                CheckName.hyperbolic_convexity,
                geometry,
                "Re(w G''/G' + 1 + 2 w conj(G) G'/(1-|G|^2)) >= 0",
                True,
                _run_convexity,
                _centered_any_r,
            ),
            CheckDefinition(
                CheckName.lemma_bounds,
                geometry,
                "A_r(z, zeta) <= A and C_r/B_r <= A on |z| <= 3/(1 + r Re q)",
                True,
                _run_lemma,
                _atomic_above_r0,
            ),
            CheckDefinition(
                CheckName.subordination,
                geometry,
                "Id + r f belongs to the class (2r Re q, 1 + rq)",
                True,
                _run_subordination,
                _centered_any_r,
            ),
            CheckDefinition(
                CheckName.squeezing,
                semigroup,
                "|u(t, z)| <= |z| exp(-kappa t) with kappa = min Re p",
                False,
                _run_squeezing,
                _centered_any_r,
            ),
            CheckDefinition(
                CheckName.sector,
                semigroup,
                "flows along complex-time rays inside the arg p sector stay in the disk",
                False,
                _run_sector,
                _centered_any_r,
            ),
            CheckDefinition(
                CheckName.resolvent_generator,
                semigroup,
                "lower bounds on G_r(z)/z and squeezing of the flow generated by G_r",
                True,
                _run_resolvent_generator,
                _six_or_real_q,
            ),
            CheckDefinition(
                CheckName.uniform_bound,
                semigroup,
                "|G_r| <= 3/(1 + r Re q) and |G_r(z)| <= rho1 |z| / rho",
                True,
                _run_uniform_bound,
                _above_two,
            ),
            CheckDefinition(
                CheckName.normalized_convergence,
                semigroup,
                "max |(1 + rq) G_r(z) - z| decreases along r",
                False,
                _run_normalized_convergence,
                _centered_any_r,
            ),
        ]
    )


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------


def plan_tasks(suite: LoadedSuite, registry: CheckRegistry | None = None) -> tuple[list[CheckTask], list[str]]:
    """
    Expand the suite into tasks, applying each check's precondition.

    Raises
    ------
    ConfigError
        If the registry lacks a requested check, or for the first
        inapplicable task when the policy is ``error``.
    """
    registry = registry or default_registry()
    try:
        definitions = registry.require([name.value for name in suite.checks])
    except KeyError as exc:
        raise ConfigError(exc.args[0], path="checks") from exc
    tasks: list[CheckTask] = []
    skipped: list[str] = []
    for g in suite.generators:
        for name, definition in zip(suite.checks, definitions):
            rs: list[float | None] = list(suite.r_values) if definition.per_r else [None]
            for r in rs:
                reason = definition.precondition(g, r)
                where = f"{g.name}/{name.value}" + (f" at r = {r:g}" if r is not None else "")
                if reason:
                    if not suite.skip_inapplicable:
                        raise ConfigError(f"precondition of {name.value} fails: {reason}", path=where)
                    logger.info(f"skipping {where}: {reason}")
                    skipped.append(f"{where}: {reason}")
                    continue
                tasks.append(
                    CheckTask(
                        generator=g,
                        check=definition,
                        r=r,
                        grid=suite.grid,
                        solver=suite.solver,
                        slack=suite.slack,
                        r_values=suite.r_values,
                    )
                )
    return tasks, skipped


def run_task(task: CheckTask) -> TaskOutcome:
    logger.info(f"running {task!r}")
    try:
        return TaskOutcome(task, report=task.check.run(task))
    except NumericalFailure as exc:
        logger.error(f"{task!r} failed numerically: {exc}")
        return TaskOutcome(task, error=f"{type(exc).__name__}: {exc}", numerical=True)
    except (ResolventLabError, ValueError, ZeroDivisionError) as exc:
        logger.error(f"{task!r} rejected its inputs: {exc}")
        return TaskOutcome(task, error=f"{type(exc).__name__}: {exc}")


def run_suite(
    suite: LoadedSuite,
    *,
    registry: CheckRegistry | None = None,
    output_dir: Path | None = None,
    threads: int | None = None,
    write: bool = True,
) -> SuiteResult:
    """
    Run every planned task and write its report.

    Files: ``<output_dir>/<generator>/<check>[_r<r>].json`` per task,
    ``summary.json`` and the effective ``config.yaml``. Reports are written
    even when checks fail.
    """
    tasks, skipped = plan_tasks(suite, registry)
    out = output_dir or suite.output_dir
    workers = max(1, min(threads or thread_cap(), len(tasks) or 1))
    logger.info(f"{len(tasks)} tasks, {len(skipped)} skipped, {workers} workers")

    if workers == 1:
        outcomes = [run_task(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run_task, tasks))

    reports = [o.report for o in outcomes if o.report is not None]
    errors = sum(1 for o in outcomes if o.error is not None)
    numerical = sum(1 for o in outcomes if o.numerical)
    summary = SuiteSummary.from_reports(reports, skipped=len(skipped), errors=errors)

    files: list[Path] = []
    if write:
        for o in outcomes:
            path = out / o.task.relpath
            if o.report is not None:
                dump_json(o.report.to_dict(), path)
            else:
                kind = "numerical" if o.numerical else "precondition"
                dump_json(
                    {"check": o.task.check.name.value, "pass": False, "error": o.error, "error_kind": kind}, path
                )
            files.append(path)
        dump_json(summary.to_dict(), out / "summary.json")
        dump_yaml(suite.effective_config(), out / "config.yaml")
        files += [out / "summary.json", out / "config.yaml"]

    result = SuiteResult(
        summary=summary,
        outcomes=tuple(outcomes),
        skipped=tuple(skipped),
        output_dir=out,
        numerical_failures=numerical,
        precondition_errors=errors - numerical,
        files=tuple(files),
    )
    logger.info(f"suite finished: {summary!r}")
    return result

