"""Sidon sets in [n]^d: enumeration, counting machinery, constructions,
and a Monte Carlo lab for random grid subsets."""

from .grid import GridParams, SidonWitness, is_sidon, rank, sum_multiset, unrank
from .constructions import (
    DifferenceSetCertificate,
    dense_sidon_in_grid,
    dense_sidon_in_interval,
    lift_sidon,
    phi_d,
    singer_sidon,
)
from .enumeration import (
    CountProfile,
    CountTooLargeError,
    MaxSidonResult,
    count_of_size,
    count_profile,
    max_sidon_exact,
    max_sidon_subset,
)

__all__ = [
    "GridParams",
    "SidonWitness",
    "is_sidon",
    "rank",
    "unrank",
    "sum_multiset",
    "DifferenceSetCertificate",
    "phi_d",
    "lift_sidon",
    "singer_sidon",
    "dense_sidon_in_interval",
    "dense_sidon_in_grid",
    "CountProfile",
    "CountTooLargeError",
    "MaxSidonResult",
    "count_profile",
    "count_of_size",
    "max_sidon_exact",
    "max_sidon_subset",
]

__version__ = "0.1.0"
