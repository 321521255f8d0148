"""qlq: quasilinear quadratic forms over characteristic-2 function fields.

Layering, bottom up: f2poly (GF(2) polynomial/rational arithmetic and
GF(2^k) evaluation), field_tower (inseparable square-root towers),
linalg2 (rank and membership over the square subfield, randomized and
exact), forms (the quadratic form calculus), function_field (isotropy over
function fields of quadrics), invariants (norm degree, splitting towers,
P_r / Delta / c), theorems (integer-logic checkers), constructions
(optimality witnesses), cli.
"""

from .field_tower import (
    FieldElement,
    FieldTower,
    extend_rational,
    extend_sqrt,
    rational_tower,
)
from .forms import QuasilinearForm, binary, orth_sum, pfister, scale, tensor
from .linalg2 import RankMode

__all__ = [
    "FieldElement",
    "FieldTower",
    "QuasilinearForm",
    "RankMode",
    "binary",
    "extend_rational",
    "extend_sqrt",
    "orth_sum",
    "pfister",
    "rational_tower",
    "scale",
    "tensor",
]

__version__ = "0.1.0"
