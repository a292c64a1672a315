"""Instance files, random generation, experiment runs and the command line."""

from .generate import GENERATOR, Shape, content_hash, gen_random
from .instance import (
    DIMENSION_OVERFLOW,
    DUPLICATE_COEFF,
    MALFORMED_INSTANCE,
    MALFORMED_MULTIINDEX,
    InstanceError,
    InstanceSpec,
    SpaceSpec,
    load_instances,
    normalize_instance_text,
    parse_instance,
    parse_instances,
    serialize_instance,
    serialize_instances,
)
from .run import RunConfig, RunResult, lifting_csv, relations_json, run, snumber_csv, write_outputs
