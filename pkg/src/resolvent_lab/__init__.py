from .api import (
    load_generator,
    load_suite_config,
    LoadOptions,
    CheckRegistry,
    CheckDefinition,
    CheckReport,
    SuiteSummary,
    GeneratorSpec,
    SamplingGrid,
    SolverConfig,
    resolve,
    resolve_many,
    resolve_in_disk,
    orders,
    find_r0,
    radii_resolvent,
    default_registry,
    run_suite,
    BASE_DIR,
    SCHEMA_DIR,
    INSTANCE_DIR,
)
from .cli import main

__all__ = [
    "load_generator",
    "load_suite_config",
    "LoadOptions",
    "CheckRegistry",
    "CheckDefinition",
    "CheckReport",
    "SuiteSummary",
    "GeneratorSpec",
    "SamplingGrid",
    "SolverConfig",
    "resolve",
    "resolve_many",
    "resolve_in_disk",
    "orders",
    "find_r0",
    "radii_resolvent",
    "default_registry",
    "run_suite",
    "main",
    "BASE_DIR",
    "SCHEMA_DIR",
    "INSTANCE_DIR",
]
