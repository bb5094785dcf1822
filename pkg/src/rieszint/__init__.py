"""Certified Riemann-type integration of Riesz-space-valued functions and set functions."""

from .errors import ContractViolation, DSLError, ResourceExhausted, RieszIntError, StructuralError
from .lattice import ProductKind, ProductRule, RieszValue, apply_product
from .integrators import (
    IntegralReport,
    IntegralVerdict,
    UniformRegulatorSequence,
    abstract_lebesgue_integral,
    choquet_integral,
    henstock_integral,
    net_riemann_integral,
    pavlakos_elementary_integral,
    pavlakos_integral,
    riemann_sum,
    s_star_partition_integral,
    saks_integral,
    sion_integral,
)
from .laws import verify_integral_laws, verify_uniform_convergence
from .measures import Capacity, CountingMeasure, LengthMeasure, VectorMeasure

__version__ = "0.1.0"

__all__ = [
    "Capacity",
    "CountingMeasure",
    "LengthMeasure",
    "VectorMeasure",
    "ContractViolation",
    "DSLError",
    "IntegralReport",
    "IntegralVerdict",
    "ProductKind",
    "ProductRule",
    "ResourceExhausted",
    "RieszIntError",
    "RieszValue",
    "StructuralError",
    "UniformRegulatorSequence",
    "abstract_lebesgue_integral",
    "apply_product",
    "choquet_integral",
    "henstock_integral",
    "net_riemann_integral",
    "pavlakos_elementary_integral",
    "pavlakos_integral",
    "riemann_sum",
    "s_star_partition_integral",
    "saks_integral",
    "sion_integral",
    "verify_integral_laws",
    "verify_uniform_convergence",
]
