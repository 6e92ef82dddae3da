from .generator import GeneratorSpec, AtomicHerglotz, SchwarzHerglotz, SchwarzFunction, generator_eval, herglotz_eval
from .grid import SamplingGrid
from .resolvent import SolverConfig, ResolventEval, ResolventBatch, resolve, resolve_many, resolve_continued, resolve_in_disk
from .geometry import ClassParams, OrderReport, radii_general, radii_resolvent, orders, find_r0, spirallike_order
from .semigroup import SectorSpec, FlowPoint, evolve_ode, evolve_expo
from .renderers import ImageCurve, render_image_curves
from .suite import default_registry, run_suite, SuiteResult

__all__ = [
    "GeneratorSpec",
    "AtomicHerglotz",
    "SchwarzHerglotz",
    "SchwarzFunction",
    "generator_eval",
    "herglotz_eval",
    "SamplingGrid",
    "SolverConfig",
    "ResolventEval",
    "ResolventBatch",
    "resolve",
    "resolve_many",
    "resolve_continued",
    "resolve_in_disk",
    "ClassParams",
    "OrderReport",
    "radii_general",
    "radii_resolvent",
    "orders",
    "find_r0",
    "spirallike_order",
    "SectorSpec",
    "FlowPoint",
    "evolve_ode",
    "evolve_expo",
    "ImageCurve",
    "render_image_curves",
    "default_registry",
    "run_suite",
    "SuiteResult",
]
