"""Finite block Toeplitz asymptotics for symbols in generalized Krein algebras."""

from .catalog import catalog, list_catalog
from .errors import (
    AliasingError,
    BoundPreconditionError,
    ContourError,
    ConvergenceError,
    NumericalRejection,
    PhaseResolutionError,
    SingularSymbolError,
    WindingError,
)
from .functions import AnalyticFunction, Contour
from .linalg import (
    DenseOperator,
    determinant,
    hankel_section,
    schatten_norm,
    toeplitz_section,
    trace_f,
    truncated_hankel_product,
)
from .symbols import FourierSymbol, KreinIndex, krein_norm, membership_check, multiply, invert
from .szego import BOReport, E_of, G_of, bo_verify
from .trace_formula import Ef, Gf, RateFit, contour_validate, error_sequence, rate_fit, trace_f_Tn
from .wiener_hopf import CanonicalFactorization, bo_pair, canonical_factorization

__version__ = "0.1.0"
