"""polystab: a numerical laboratory for polynomial semigroup stability.

Constructs finite-section generators with prescribed resolvent growth,
measures resolvent envelopes and orbit decay against interpolation and
fractional-domain norms, and verifies the supporting Besov/multiplier
machinery with refinement-stability checks.
"""

__version__ = "0.1.0"

from . import errors, fitting, funcspace, harness, linalg, resolvent, semigroup, zoo
from .errors import PolystabError
from .zoo import GeneratorModel

__all__ = [
    "GeneratorModel",
    "PolystabError",
    "__version__",
    "errors",
    "fitting",
    "funcspace",
    "harness",
    "linalg",
    "resolvent",
    "semigroup",
    "zoo",
]
