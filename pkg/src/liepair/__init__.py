"""Exact Atiyah classes of Lie algebra pairs, PBW maps, and finite groupoid tools."""

from .atiyah import (
    AtiyahReport,
    ConnectionExtension,
    atiyah_class,
    atiyah_cocycle,
    compatible_connection,
    extend_action,
    is_compatible,
    reductive_certificate,
    semisimple_certificate,
)
from .catalog import example, examples_list
from .cohomology import Cochain, differential, h_dim, solve_coboundary
from .envelope import (
    EnvelopeElement,
    QuotientClass,
    SymElement,
    coproduct,
    counit,
    envelope,
    left_multiply,
    multiply,
    project_quotient,
    quotient_coproduct,
    symmetrize,
)
from .lie import (
    LieAlgebra,
    LiePair,
    Representation,
    bott_module,
    heisenberg,
    make_pair,
    sl2,
    so3,
    solvable2d,
    validate_algebra,
)
from .linalg import Matrix
from .pbw import PbwMap, check_coalgebra, check_equivariance, pbw_build

__version__ = "0.1.0"
