"""smclab: a laboratory for secure multiplex coding over wiretap channels.

Finite-field affine message mixing on top of superposition codebooks,
closed-form information-leakage bounds and error/secrecy exponents, and
exhaustive brute-force oracles that verify the bounds on tiny instances.
"""

__version__ = "0.1.0"

from . import affine, capacity, exponents, gallager, oracle, probability, renyi, smc_codec
from .errors import SmclabError

__all__ = [
    "__version__",
    "SmclabError",
    "affine",
    "capacity",
    "exponents",
    "gallager",
    "oracle",
    "probability",
    "renyi",
    "smc_codec",
]
