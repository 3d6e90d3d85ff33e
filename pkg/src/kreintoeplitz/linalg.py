"""Finite sections of Toeplitz and Hankel operators and their dense linear algebra."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ContourError
from .functions import AnalyticFunction, Contour
from .symbols import FourierSymbol, coefficient_norms

LABELS = ("toeplitz-section", "hankel", "hankel-reflected", "product-truncation", "generic")
LOG_DET_SIDE = 2000


@dataclass(frozen=True, eq=False)
class DenseOperator:
    """A finite complex matrix with a semantic tag.

    ``tail_bound`` and ``certified`` are only meaningful for product
    truncations: the bound on the neglected part of every entry and whether it
    is below the requested fraction of the entry scale.
    """

    entries: np.ndarray
    label: str = "generic"
    tail_bound: float = 0.0
    certified: bool = True

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2:
            raise ValueError("entries must be a 2-D array")
        if self.label not in LABELS:
            raise ValueError(f"unknown label {self.label!r}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols


@dataclass
class SchattenReport:
    trace_norm: float
    hilbert_schmidt_norm: float
    operator_norm: float
    singular_values: np.ndarray


def _assemble(blocks: np.ndarray) -> np.ndarray:
    # (R, C, N, N) -> (R N, C N)
    R, C, N, _ = blocks.shape
    return blocks.transpose(0, 2, 1, 3).reshape(R * N, C * N)


def toeplitz_section(sym: FourierSymbol, n: int) -> DenseOperator:
    """``T_n(a) = (a_{j-k})_{j,k=0}^n`` as a dense ``(n+1)N`` square matrix."""
    if n < 0:
        raise ValueError("order n must be nonnegative")
    idx = np.subtract.outer(np.arange(n + 1), np.arange(n + 1))
    return DenseOperator(_assemble(sym.take(idx)), "toeplitz-section")


def hankel_section(sym: FourierSymbol, m: int, mp: int, reflected: bool = False) -> DenseOperator:
    """Block ``(i, j)`` is ``a_{i+j+1}``, or ``a_{-i-j-1}`` when ``reflected``."""
    if m < 1 or mp < 1:
        raise ValueError("Hankel sections need at least one block row and column")
    idx = np.add.outer(np.arange(m), np.arange(mp)) + 1
    if reflected:
        idx = -idx
    return DenseOperator(_assemble(sym.take(idx)), "hankel-reflected" if reflected else "hankel")


def _tail_l2(norms_from_one: np.ndarray) -> np.ndarray:
    # T[m] = sqrt(sum_{k >= m} norms[k]^2), norms indexed by k = 0, 1, ...
    sq = norms_from_one**2
    return np.sqrt(np.concatenate([np.cumsum(sq[::-1])[::-1], [0.0]]))


def hankel_product_block(b: FourierSymbol, c: FourierSymbol, first: int, stop: int, inner: int) -> np.ndarray:
    """Rows/cols ``first..stop-1`` of ``H(b) H(c~)`` with inner sum over ``l < inner``."""
    rows = np.arange(first, stop)
    ls = np.arange(inner)
    Hb = _assemble(b.take(np.add.outer(rows, ls) + 1))
    Hc = _assemble(c.take(-(np.add.outer(ls, rows) + 1)))
    return Hb @ Hc


def truncated_hankel_product(b: FourierSymbol, c: FourierSymbol, n: int, M: int | None = None,
                             inner: int | None = None, rel_tol: float = 1e-13) -> DenseOperator:
    """The block of ``H(b) H(c~)`` with row/column indices ``n+1 .. M-1``.

    This is the finite part of ``Q_n H(b) H(c~) Q_n`` seen by the stored
    coefficient bands.  Entry ``(i, j)`` is ``sum_{l < inner} b_{i+l+1} c_{-l-j-1}``.
    By default ``M`` and ``inner`` cover the bands exactly.  A shorter inner
    sum is certified only if the Cauchy-Schwarz bound on the neglected terms is
    below ``rel_tol`` times the largest entry.
    """
    if b.N != c.N:
        raise ValueError("b and c must have the same matrix size")
    if M is None:
        M = max(b.band, c.band, n + 2)
    if M <= n + 1:
        raise ValueError(f"cutoff M={M} must exceed n+1={n + 1}")
    exact_inner = max(0, min(b.band, c.band) - n - 1)
    if inner is None:
        inner = exact_inner
    inner = max(inner, 0)
    if inner == 0:
        prod = np.zeros(((M - n - 1) * b.N,) * 2, dtype=complex)
    else:
        prod = hankel_product_block(b, c, n + 1, M, inner)
    bound = 0.0
    if inner < exact_inner:
        Kb, Kc = b.band, c.band
        nb = coefficient_norms(b)[Kb:]  # k = 0..Kb
        nc = coefficient_norms(c)[Kc::-1]  # |c_{-k}|, k = 0..Kc
        start = n + inner + 2
        tb, tc = _tail_l2(nb), _tail_l2(nc)
        bound = float(tb[min(start, len(tb) - 1)] * tc[min(start, len(tc) - 1)])
    scale = float(np.max(np.abs(prod))) if prod.size else 0.0
    certified = bound == 0.0 or bound < rel_tol * max(scale, np.finfo(float).tiny)
    return DenseOperator(prod, "product-truncation", tail_bound=bound, certified=certified)


def jacobi_singular_values(a: np.ndarray, tol: float = 1e-15, max_sweeps: int = 80) -> np.ndarray:
    """Singular values by one-sided (Hestenes) Jacobi with round-robin pair ordering.

    Every round rotates n/2 disjoint column pairs at once; sweeps repeat until
    all pairs are orthogonal to ``tol`` relative to their norms.
    """
    A = np.array(a, dtype=complex)
    if A.shape[0] < A.shape[1]:
        A = A.conj().T
    m, n = A.shape
    if n == 0:
        return np.zeros(0)
    if n == 1:
        return np.array([np.linalg.norm(A)])
    n_even = n + (n % 2)
    if n_even > n:
        A = np.concatenate([A, np.zeros((m, 1), dtype=complex)], axis=1)
    players = np.arange(n_even)
    half = n_even // 2
    for _ in range(max_sweeps):
        off = 0.0
        order = players.copy()
        for _ in range(n_even - 1):
            P, Q = order[:half], order[::-1][:half]
            ap, aq = A[:, P], A[:, Q]
            alpha = np.sum(np.abs(ap) ** 2, axis=0)
            beta = np.sum(np.abs(aq) ** 2, axis=0)
            gamma = np.sum(np.conj(ap) * aq, axis=0)
            g = np.abs(gamma)
            denom = np.sqrt(alpha * beta)
            rel = np.divide(g, denom, out=np.zeros_like(g), where=denom > 0)
            off = max(off, float(rel.max()))
            act = rel > tol
            if np.any(act):
                phase = np.where(g > 0, gamma / np.where(g > 0, g, 1), 1)
                zeta = np.divide(beta - alpha, 2 * g, out=np.zeros_like(g), where=g > 0)
                t = np.where(act, np.sign(zeta + (zeta == 0)) / (np.abs(zeta) + np.sqrt(1 + zeta**2)), 0.0)
                cs = 1 / np.sqrt(1 + t**2)
                sn = cs * t
                aq_rot = aq * np.conj(phase)
                A[:, P] = cs * ap - sn * aq_rot
                A[:, Q] = sn * ap + cs * aq_rot
            order = np.concatenate([order[:1], np.roll(order[1:], 1)])
        if off <= tol:
            break
    s = np.linalg.norm(A[:, :n] if n_even > n else A, axis=0)
    return np.sort(s)[::-1]


def singular_values(op, method: str = "lapack") -> np.ndarray:
    a = op.entries if isinstance(op, DenseOperator) else np.asarray(op, dtype=complex)
    if a.size == 0:
        return np.zeros(0)
    if method == "jacobi":
        return jacobi_singular_values(a)
    if method == "lapack":
        return scipy.linalg.svdvals(a)
    raise ValueError(f"unknown singular value method {method!r}")


def schatten_norm(op, method: str = "lapack") -> SchattenReport:
    """Trace, Hilbert-Schmidt and operator norms from the singular values."""
    s = singular_values(op, method)
    # ascending-order sums keep small singular values from being swamped
    asc = s[::-1]
    return SchattenReport(
        trace_norm=float(np.sum(asc)),
        hilbert_schmidt_norm=float(math.sqrt(np.sum(asc**2))),
        operator_norm=float(s[0]) if s.size else 0.0,
        singular_values=s,
    )


def _lu(a):
    # exactly singular input is a legitimate case here (determinant 0), not a warning
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        return scipy.linalg.lu_factor(a, check_finite=False)


def log_determinant(op) -> tuple[float, float]:
    """``(log |det|, arg det)`` from LU with partial pivoting."""
    a = op.entries if isinstance(op, DenseOperator) else np.asarray(op, dtype=complex)
    if a.shape[0] != a.shape[1]:
        raise ValueError("determinant of a non-square matrix")
    if a.shape[0] == 0:
        return 0.0, 0.0
    lu, piv = _lu(a)
    d = np.diag(lu)
    if np.any(d == 0):
        return -math.inf, 0.0
    swaps = int(np.count_nonzero(piv != np.arange(len(piv))))
    logabs = float(np.sum(np.log(np.abs(d))))
    arg = float(np.sum(np.angle(d))) + math.pi * swaps
    arg = math.remainder(arg, 2 * math.pi)
    return logabs, arg


def determinant(op) -> complex:
    """Product of LU pivots with the permutation sign.

    Sides above 2000 go through the log form; overflow then shows up as inf.
    """
    a = op.entries if isinstance(op, DenseOperator) else np.asarray(op, dtype=complex)
    if a.shape[0] != a.shape[1]:
        raise ValueError("determinant of a non-square matrix")
    if a.shape[0] == 0:
        return 1.0 + 0j
    if a.shape[0] > LOG_DET_SIDE:
        logabs, arg = log_determinant(a)
        return complex(math.exp(logabs) * complex(math.cos(arg), math.sin(arg))) if logabs > -math.inf else 0j
    lu, piv = _lu(a)
    sign = -1.0 if np.count_nonzero(piv != np.arange(len(piv))) % 2 else 1.0
    return complex(sign * np.prod(np.diag(lu)))


def trace_f(op, f: AnalyticFunction, contour: Contour | None = None, tau: float = 1e-8) -> complex:
    """``trace f(A)``.

    With a contour: ``(1/2 pi i) oint f(lambda) trace (lambda I - A)^{-1} d lambda``.
    Without: polynomial part by repeated multiplication, pole terms by LU
    solves against ``A - p I``; a pole within ``tau`` of the spectrum (smallest
    singular value of ``A - p I``) is rejected.
    """
    a = op.entries if isinstance(op, DenseOperator) else np.asarray(op, dtype=complex)
    n = a.shape[0]
    eye = np.eye(n)
    if contour is not None:
        vals = np.empty(len(contour), dtype=complex)
        for j, lam in enumerate(contour.nodes):
            vals[j] = f(lam) * np.trace(np.linalg.solve(lam * eye - a, eye))
        return contour.integral(vals)
    total = 0j
    power = eye.astype(complex)
    for k, c in enumerate(f.poly):
        if k > 0:
            power = power @ a
        if c != 0:
            total += c * np.trace(power)
    for p, rs in f.poles:
        shifted = a - p * eye
        dist = float(scipy.linalg.svdvals(shifted)[-1])
        if dist <= tau:
            raise ContourError(f"pole {p} is within {dist:.3g} of the spectrum (tolerance {tau:g})")
        lu = scipy.linalg.lu_factor(shifted)
        acc = eye.astype(complex)
        for r in rs:
            acc = scipy.linalg.lu_solve(lu, acc)
            total += r * np.trace(acc)
    return complex(total)
