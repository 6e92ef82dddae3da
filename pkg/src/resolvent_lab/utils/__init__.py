from .load import load_generator, load_suite_config, LoadOptions
from .paths import BASE_DIR, SCHEMA_DIR, INSTANCE_DIR

__all__ = [
    "load_generator",
    "load_suite_config",
    "LoadOptions",
    "BASE_DIR",
    "SCHEMA_DIR",
    "INSTANCE_DIR",
]
