"""
resym - Legendre, Redei triple and 4-th multiple residue symbols.

Exports used by callers:
  - legendre_symbol, redei_symbol, symbol4
  - magnus, mu2, fox_mu2
  - verify_n4_presentation
"""

from resym.arith import legendre_symbol
from resym.magnus import fox_mu2, magnus, mu2
from resym.nilgroup import verify_n4_presentation
from resym.redei import redei_symbol
from resym.symbol4 import symbol4

__all__ = [
    "legendre_symbol",
    "redei_symbol",
    "symbol4",
    "magnus",
    "mu2",
    "fox_mu2",
    "verify_n4_presentation",
]
