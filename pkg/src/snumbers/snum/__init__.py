"""s-numbers of homogeneous polynomials and the relations between them."""

from .numbers import (
    GELFAND_VARIANTS,
    KINDS,
    SNumberResult,
    UnsupportedVariant,
    approx_number,
    apply_cummin,
    clear_caches,
    gelfand_number,
    kolmogorov_number,
    s_number,
    s_numbers,
)
