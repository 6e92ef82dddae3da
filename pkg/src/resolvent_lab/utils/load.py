from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

from linkml_runtime.loaders import yaml_loader
from pydantic import ValidationError

from ..base import CheckName
from ..errors import ConfigError
from ..runtime.generator import AtomicHerglotz, GeneratorSpec, SchwarzFunction, SchwarzHerglotz
from ..runtime.grid import SamplingGrid
from ..runtime.resolvent import SolverConfig
from ..schema.generated_models.resolvent_lab import GeneratorDocument, SuiteConfig
from .paths import GENERATOR_DIR, SUITE_DIR

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LoadOptions:
    # If True, run domain-level checks (grid inside the disk, unique labels, ...) after schema validation.
    validate: bool = True
    # If True, unknown check names are errors; if False they are dropped with a warning.
    strict_checks: bool = True


@dataclass(frozen=True)
class LoadedSuite:
    """A validated suite configuration with every document turned into runtime objects."""

    config: SuiteConfig
    generators: tuple[GeneratorSpec, ...]
    r_values: tuple[float, ...]
    checks: tuple[CheckName, ...]
    grid: SamplingGrid
    solver: SolverConfig
    slack: float
    output_dir: Path
    skip_inapplicable: bool
    source: Path | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    def effective_config(self) -> dict[str, Any]:
        """The configuration as run, with every default filled in."""
        data = self.config.model_dump(mode="json", exclude_none=True)
        data["generators"] = [generator_to_document(g) for g in self.generators]
        data.pop("generator_files", None)
        data["output_dir"] = str(self.output_dir)
        return data

    def __repr__(self) -> str:
        return (
            f"<LoadedSuite generators={len(self.generators)} r={list(self.r_values)} "
            f"checks={[c.value for c in self.checks]} grid={self.grid!r}>"
        )


def _validation_error(exc: ValidationError, where: str) -> ConfigError:
    err = exc.errors()[0]
    loc = ".".join(str(p) for p in err.get("loc", ()))
    path = f"{where}:{loc}" if loc else where
    more = f" (+{exc.error_count() - 1} more)" if exc.error_count() > 1 else ""
    return ConfigError(f"{err.get('msg', 'invalid value')}{more}", path=path)


def _read(path: Path) -> Any:
    if not path.exists():
        raise ConfigError("file not found", path=str(path))
    try:
        return yaml_loader.load_as_dict(str(path))
    except Exception as exc:  # parser errors from the YAML layer
        raise ConfigError(f"could not parse document: {exc}", path=str(path)) from exc


def _pair(values: Sequence[float] | None, path: str) -> complex:
    if values is None or len(values) != 2:
        raise ConfigError(f"expected [re, im], got {values!r}", path=path)
    return complex(values[0], values[1])


def generator_from_document(doc: GeneratorDocument, *, where: str = "generator") -> GeneratorSpec:
    """
    Build a GeneratorSpec from a validated document.

    Exactly one of ``herglotz.atoms`` or ``herglotz.q`` must be given; an
    absent ``omega`` means omega = 0, i.e. the constant Herglotz part p = q.
    """
    h = doc.herglotz
    tau = _pair(doc.tau, f"{where}.tau")
    try:
        if h.atoms is not None and h.q is not None:
            raise ConfigError("give either atoms or q, not both", path=f"{where}.herglotz")
        if h.atoms is not None:
            if h.omega is not None:
                raise ConfigError("omega only applies to the q form", path=f"{where}.herglotz.omega")
            herglotz: AtomicHerglotz | SchwarzHerglotz = AtomicHerglotz(
                atoms=tuple((a.angle, a.mass) for a in h.atoms), gamma=h.gamma or 0.0
            )
        elif h.q is not None:
            if h.gamma is not None:
                raise ConfigError("gamma only applies to the atoms form", path=f"{where}.herglotz.gamma")
            q = _pair(h.q, f"{where}.herglotz.q")
            if h.omega is None:
                omega = SchwarzFunction.zero()
            else:
                zeros = tuple(
                    _pair(a, f"{where}.herglotz.omega.zeros[{i}]") for i, a in enumerate(h.omega.zeros or [])
                )
                omega = SchwarzFunction.from_angle(h.omega.rotation_angle or 0.0, power=h.omega.power or 1, zeros=zeros)
            herglotz = SchwarzHerglotz(q=q, omega=omega)
        else:
            raise ConfigError("herglotz needs atoms or q", path=f"{where}.herglotz")
        return GeneratorSpec(herglotz=herglotz, tau=tau, label=doc.label)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc), path=f"{where}.herglotz") from exc


def generator_to_document(g: GeneratorSpec) -> dict[str, Any]:
    out: dict[str, Any] = {}
    if g.label:
        out["label"] = g.label
    out["tau"] = [g.tau.real, g.tau.imag]
    h = g.herglotz
    if isinstance(h, AtomicHerglotz):
        out["herglotz"] = {"atoms": [{"angle": a, "mass": m} for a, m in h.atoms], "gamma": h.gamma}
    else:
        herg: dict[str, Any] = {"q": [h.q.real, h.q.imag]}
        w = h.omega
        if not w.vanishing:
            herg["omega"] = {
                "rotation_angle": float(cmath.phase(w.rotation)),
                "power": w.power,
                "zeros": [[a.real, a.imag] for a in w.zeros],
            }
        out["herglotz"] = herg
    return out


def _resolve_generator_path(ref: str, base_dir: Path | None) -> Path:
    candidate = Path(ref)
    if not candidate.is_absolute() and base_dir is not None:
        candidate = base_dir / candidate
    if candidate.exists():
        return candidate
    for suffix in (".json", ".yaml"):
        bundled = GENERATOR_DIR / f"{ref}{suffix}"
        if bundled.exists():
            return bundled
    raise ConfigError(f"no generator document or bundled generator named '{ref}'", path="generator_files")


def load_generator(path: str | Path) -> GeneratorSpec:
    """
    Load a generator document (JSON or YAML) or a bundled generator by name
    (``linear``, ``koebe``, ``atomic_a`` ...).
    """
    p = _resolve_generator_path(str(path), Path.cwd())
    raw = _read(p)
    try:
        doc = GeneratorDocument.model_validate(raw)
    except ValidationError as exc:
        raise _validation_error(exc, str(p)) from exc
    if doc.label is None:
        doc = doc.model_copy(update={"label": p.stem})
    g = generator_from_document(doc, where=str(p))
    logger.info(f"loaded generator {g.name} from {p}")
    return g


def bundled_generator_names() -> list[str]:
    return sorted(p.stem for p in GENERATOR_DIR.glob("*.json"))


def default_suite_path() -> Path:
    return SUITE_DIR / "default.yaml"


def suite_from_mapping(
    raw: Mapping[str, Any],
    *,
    base_dir: Path | None = None,
    options: LoadOptions = LoadOptions(),
    source: Path | None = None,
) -> LoadedSuite:
    where = str(source) if source else "config"
    try:
        cfg = SuiteConfig.model_validate(dict(raw))
    except ValidationError as exc:
        raise _validation_error(exc, where) from exc

    generators: list[GeneratorSpec] = []
    for i, doc in enumerate(cfg.generators or []):
        label = doc.label or f"generator_{i}"
        generators.append(generator_from_document(doc.model_copy(update={"label": label}), where=f"{where}:generators.{i}"))
    for ref in cfg.generator_files or []:
        p = _resolve_generator_path(ref, base_dir)
        try:
            doc = GeneratorDocument.model_validate(_read(p))
        except ValidationError as exc:
            raise _validation_error(exc, str(p)) from exc
        if doc.label is None:
            doc = doc.model_copy(update={"label": p.stem})
        generators.append(generator_from_document(doc, where=str(p)))

    notes: list[str] = []
    checks: list[CheckName] = []
    for i, name in enumerate(cfg.checks):
        if CheckName.has(name):
            checks.append(CheckName(name))
        elif options.strict_checks:
            raise ConfigError(f"unknown check '{name}'; registered: {sorted(CheckName.values())}", path=f"{where}:checks.{i}")
        else:
            logger.warning(f"dropping unknown check '{name}'")
            notes.append(f"dropped unknown check {name}")

    grid_spec = cfg.grid
    tol = cfg.tolerances
    try:
        grid = SamplingGrid(
            radii=grid_spec.radii if grid_spec and grid_spec.radii else 64,
            angles=grid_spec.angles if grid_spec and grid_spec.angles else 256,
            outer_radius=grid_spec.outer_radius if grid_spec and grid_spec.outer_radius is not None else 0.999,
        )
        solver = SolverConfig(tol=tol.solver if tol and tol.solver is not None else 1e-13)
    except ValueError as exc:
        raise ConfigError(str(exc), path=f"{where}:grid") from exc
    slack = tol.check_slack if tol and tol.check_slack is not None else 1e-9

    if options.validate:
        if not generators:
            raise ConfigError("at least one generator is required", path=f"{where}:generators")
        if grid.outer_radius >= 1.0:
            raise ConfigError(f"outer_radius must be < 1, got {grid.outer_radius}", path=f"{where}:grid.outer_radius")
        labels = [g.name for g in generators]
        dupes = sorted({x for x in labels if labels.count(x) > 1})
        if dupes:
            raise ConfigError(f"duplicate generator labels {dupes}", path=f"{where}:generators")
        bad_r = [r for r in cfg.r_values if not r > 0.0]
        if bad_r:
            raise ConfigError(f"r values must be positive, got {bad_r}", path=f"{where}:r_values")
        if not slack >= 0.0:
            raise ConfigError(f"check_slack must be >= 0, got {slack}", path=f"{where}:tolerances.check_slack")

    out_dir = Path(cfg.output_dir or "reports")
    return LoadedSuite(
        config=cfg,
        generators=tuple(generators),
        r_values=tuple(float(r) for r in cfg.r_values),
        checks=tuple(checks),
        grid=grid,
        solver=solver,
        slack=float(slack),
        output_dir=out_dir,
        skip_inapplicable=cfg.on_inapplicable == "skip",
        source=source,
        notes=tuple(notes),
    )


def load_suite_config(path: str | Path, options: LoadOptions = LoadOptions()) -> LoadedSuite:
    """
    Load and validate a suite configuration (YAML or JSON).

    Relative ``generator_files`` are resolved against the directory of the
    configuration file; a relative ``output_dir`` against the working directory.

    Raises
    ------
    ConfigError
        With the dotted path of the first offending field.
    """
    p = Path(path)
    raw = _read(p)
    if not isinstance(raw, Mapping):
        raise ConfigError("suite configuration must be a mapping", path=str(p))
    suite = suite_from_mapping(raw, base_dir=p.parent, options=options, source=p)
    logger.info(f"loaded suite {p}: {suite!r}")
    return suite
