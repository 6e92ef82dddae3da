from .utils import load_generator, load_suite_config, LoadOptions, BASE_DIR, SCHEMA_DIR, INSTANCE_DIR
from .schema.registry import CheckRegistry, CheckDefinition
from .schema.schema_model import CheckReport, SuiteSummary
from .runtime import (
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
)
