"""Canonical Wiener-Hopf factorizations ``a = u_- u_+ = v_+ v_-``.

Normalization: ``u_+(0) = I`` and ``v_-(0) = I``.  The constant part of the
symbol is carried by ``u_-`` and ``v_+``, so for a constant symbol ``c`` one
gets ``u_- = v_+ = c`` and ``b = c = 1``.

Two constructions are provided:

* :func:`scalar_canonical` splits ``log a`` into its analytic and co-analytic
  parts on a grid (scalar symbols, winding number zero);
* :func:`matrix_canonical_right` reads the coefficients of ``u_+^{-1}`` off
  the first block column of ``T_n(a)^{-1}`` and doubles ``n`` until they
  stabilize.  The left factorization is obtained from the right one of the
  reflected symbol ``a(1/t)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, SingularSymbolError, WindingError
from .linalg import hankel_product_block, toeplitz_section
from .symbols import (
    INVERT_TOL,
    FourierSymbol,
    continuous_log,
    default_grid,
    fourier_from_samples,
    invert,
    multiply,
    reflect,
    samples,
)

log = logging.getLogger(__name__)

NORMALIZATION = "u_plus(0) = I, v_minus(0) = I; constants carried by u_minus and v_plus"


@dataclass
class CanonicalFactorization:
    symbol: FourierSymbol
    u_minus: FourierSymbol
    u_plus: FourierSymbol
    v_plus: FourierSymbol
    v_minus: FourierSymbol
    b: FourierSymbol | None = None
    c: FourierSymbol | None = None
    right_residual: float = float("nan")
    left_residual: float = float("nan")
    leakage: dict = field(default_factory=dict)
    identity_residual: float | None = None
    method: str = ""
    order: int | None = None
    normalization: str = NORMALIZATION

    @property
    def max_residual(self) -> float:
        return max(self.right_residual, self.left_residual)

    @property
    def flagged(self) -> bool:
        return not self.max_residual < 1e-8


def _split_log_coefficients(Lhat: np.ndarray):
    # Lhat: DFT coefficients of a periodic function on G nodes (index k mod G)
    G = Lhat.shape[0]
    plus = np.zeros_like(Lhat)
    minus = np.zeros_like(Lhat)
    plus[1:G // 2] = Lhat[1:G // 2]
    minus[G // 2 + 1:] = Lhat[G // 2 + 1:]
    plus[G // 2] = minus[G // 2] = Lhat[G // 2] / 2
    return Lhat[0], plus, minus


def scalar_canonical(sym: FourierSymbol, band: int | None = None, grid: int | None = None,
                     force: bool = False) -> CanonicalFactorization:
    """Factorize a scalar symbol through the additive split of ``log a``.

    With ``L = c0 + L_+ + L_-`` (``L_+`` strictly analytic, ``L_-`` strictly
    co-analytic) the factors are ``u_+ = exp(L_+)``, ``u_- = exp(c0 + L_-)``,
    ``v_+ = exp(c0 + L_+)``, ``v_- = exp(L_-)``, sampled on the grid and
    re-expanded to ``band`` coefficients.

    Raises
    ------
    WindingError
        If ``a`` winds around the origin (nonzero partial index); pass
        ``force=True`` to build the (meaningless) factors anyway.
    """
    if sym.N != 1:
        raise ValueError("scalar_canonical needs a scalar symbol")
    G, L, wind = continuous_log(sym, grid or default_grid(sym.band))
    if np.min(np.abs(samples(sym, G))) <= INVERT_TOL:
        raise SingularSymbolError(f"symbol {sym.label!r} is not invertible on the grid")
    if wind != 0 and not force:
        raise WindingError(wind)
    if band is None:
        band = min(G // 2 - 1, max(64, 4 * sym.band))
    c0, plus, minus = _split_log_coefficients(np.fft.fft(L) / G)
    Lp = np.fft.ifft(plus) * G
    Lm = np.fft.ifft(minus) * G
    lab = sym.label
    fact = CanonicalFactorization(
        symbol=sym,
        u_minus=fourier_from_samples(np.exp(c0 + Lm), band, f"u_-({lab})"),
        u_plus=fourier_from_samples(np.exp(Lp), band, f"u_+({lab})"),
        v_plus=fourier_from_samples(np.exp(c0 + Lp), band, f"v_+({lab})"),
        v_minus=fourier_from_samples(np.exp(Lm), band, f"v_-({lab})"),
        method="scalar-log-split",
    )
    _attach_residuals(fact, G)
    return fact


def _first_column_coefficients(sym: FourierSymbol, n: int) -> np.ndarray:
    T = toeplitz_section(sym, n).entries
    N = sym.N
    E0 = np.zeros(((n + 1) * N, N), dtype=complex)
    E0[:N] = np.eye(N)
    try:
        X = scipy.linalg.solve(T, E0)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise SingularSymbolError(f"finite section T_{n}({sym.label}) is singular: {exc}") from None
    X = X.reshape(n + 1, N, N)
    D = X[0]
    if np.linalg.cond(D) > 1 / INVERT_TOL:
        raise SingularSymbolError(f"leading block of T_{n}^-1 is singular for {sym.label!r}")
    return X @ np.linalg.inv(D)


def matrix_canonical_right(sym: FourierSymbol, n: int | None = None, band: int | None = None,
                           tol: float = 1e-8, max_side: int = 4096):
    """Right factorization ``a = u_- u_+`` from finite sections.

    Since ``T(a)^{-1} = T(u_+^{-1}) T(u_-^{-1})``, the first block column of
    ``T_n(a)^{-1}`` is ``(u_+^{-1})_j (u_-^{-1})_0``.  Normalizing by the top
    block gives the coefficients of ``u_+^{-1}``; the order is doubled until
    two successive orders agree to ``tol``.

    Returns
    -------
    u_minus, u_plus : FourierSymbol
    order : int
        The section order whose coefficients were accepted.
    """
    n = n or 8 * max(sym.band, 1)
    prev = _first_column_coefficients(sym, n)
    while True:
        if (2 * n + 1) * sym.N > max_side:
            raise ConvergenceError(
                f"coefficients of u_+^-1 did not stabilize to {tol:g} before section side {max_side}",
                previous=prev, current=None,
            )
        cur = _first_column_coefficients(sym, 2 * n)
        change = float(np.max(np.abs(cur[:n + 1] - prev)))
        n *= 2
        if change < tol:
            break
        log.debug("order %d: coefficient change %.3g", n, change)
        prev = cur
    upi = np.concatenate([np.zeros_like(cur[:0:-1]), cur])  # k = -n..n, zero for k < 0
    u_plus_inv = FourierSymbol(upi, label=f"u_+^-1({sym.label})")
    K = band or n
    u_plus = invert(u_plus_inv, K)
    u_minus = multiply(sym, u_plus_inv, K)
    return (FourierSymbol(u_minus.coeffs, label=f"u_-({sym.label})"),
            FourierSymbol(u_plus.coeffs, label=f"u_+({sym.label})"), n)


def matrix_canonical_left(sym: FourierSymbol, n: int | None = None, band: int | None = None,
                          tol: float = 1e-8, max_side: int = 4096):
    """Left factorization ``a = v_+ v_-`` via the right factorization of ``a(1/t)``.

    ``a(1/t) = v_+(1/t) v_-(1/t)`` is a (minus)(plus) product, so its right
    factors reflected back are ``v_+`` and ``v_-``.
    """
    w_minus, w_plus, order = matrix_canonical_right(reflect(sym), n, band, tol, max_side)
    return (FourierSymbol(reflect(w_minus).coeffs, label=f"v_+({sym.label})"),
            FourierSymbol(reflect(w_plus).coeffs, label=f"v_-({sym.label})"), order)


def matrix_canonical(sym: FourierSymbol, n: int | None = None, band: int | None = None,
                     tol: float = 1e-8, grid: int | None = None) -> CanonicalFactorization:
    u_minus, u_plus, order_r = matrix_canonical_right(sym, n, band, tol)
    v_plus, v_minus, order_l = matrix_canonical_left(sym, n, band, tol)
    fact = CanonicalFactorization(sym, u_minus, u_plus, v_plus, v_minus, method="finite-section",
                                  order=max(order_r, order_l))
    _attach_residuals(fact, grid or default_grid(max(u_minus.band, u_plus.band, sym.band)))
    return fact


def _spectral_mismatch(a: np.ndarray, b: np.ndarray) -> float:
    d = a - b
    if d.shape[-1] == 1:
        return float(np.max(np.abs(d)))
    return float(np.max(np.linalg.norm(d, ord=2, axis=(1, 2))))


def leakage(fact: CanonicalFactorization) -> dict:
    """Largest coefficient of each factor on the side where it must vanish."""
    def side_max(s: FourierSymbol, positive: bool) -> float:
        part = s.coeffs[s.band + 1:] if positive else s.coeffs[:s.band]
        return float(np.max(np.abs(part))) if part.size else 0.0
    return {
        "u_plus": side_max(fact.u_plus, positive=False),
        "v_plus": side_max(fact.v_plus, positive=False),
        "u_minus": side_max(fact.u_minus, positive=True),
        "v_minus": side_max(fact.v_minus, positive=True),
    }


def residual(fact: CanonicalFactorization, grid: int | None = None) -> tuple[float, float]:
    """Max over the grid of ``||a - u_- u_+||`` and ``||a - v_+ v_-||`` (spectral norm)."""
    G = grid or default_grid(max(fact.u_minus.band, fact.u_plus.band, fact.symbol.band))
    a = samples(fact.symbol, G)
    right = samples(fact.u_minus, G) @ samples(fact.u_plus, G)
    left = samples(fact.v_plus, G) @ samples(fact.v_minus, G)
    return _spectral_mismatch(a, right), _spectral_mismatch(a, left)


def _attach_residuals(fact: CanonicalFactorization, grid: int):
    fact.right_residual, fact.left_residual = residual(fact, grid)
    fact.leakage = leakage(fact)
    if fact.flagged:
        log.warning("factorization of %s has residual %.3g", fact.symbol.label, fact.max_residual)


def bo_pair(fact: CanonicalFactorization, band: int | None = None, check_section: int = 64,
            residual_tol: float = 1e-8) -> tuple[FourierSymbol, FourierSymbol]:
    """``b = v_- u_+^{-1}`` and ``c = u_-^{-1} v_+``; also stored on ``fact``.

    ``T(b) T(c) = I - H(b) H(c~)`` is spot-checked on a ``check_section``
    block and the discrepancy recorded in ``fact.identity_residual``.
    """
    if not fact.max_residual < residual_tol:
        raise ConvergenceError(f"factorization residual {fact.max_residual:.3g} exceeds {residual_tol:g}")
    K = band or max(fact.u_plus.band, fact.u_minus.band, fact.v_plus.band, fact.v_minus.band)
    lab = fact.symbol.label
    b = multiply(fact.v_minus, invert(fact.u_plus, K), K)
    c = multiply(invert(fact.u_minus, K), fact.v_plus, K)
    b = FourierSymbol(b.coeffs, label=f"b({lab})", truncated=b.truncated)
    c = FourierSymbol(c.coeffs, label=f"c({lab})", truncated=c.truncated)
    fact.b, fact.c = b, c
    if check_section:
        fact.identity_residual = toeplitz_product_identity_residual(b, c, check_section)
    return b, c


def toeplitz_product_identity_residual(b: FourierSymbol, c: FourierSymbol, m: int) -> float:
    """Max entry of ``P_m T(b) T(c) P_m - (I - P_m H(b) H(c~) P_m)``."""
    N = b.N
    inner = m + max(b.band, c.band) + 1
    j = np.arange(m)
    ls = np.arange(inner)
    from .linalg import _assemble
    Tb = _assemble(b.take(np.subtract.outer(j, ls)))
    Tc = _assemble(c.take(np.subtract.outer(ls, j)))
    lhs = Tb @ Tc
    hank_inner = min(b.band, c.band) + 1
    rhs = np.eye(m * N) - hankel_product_block(b, c, 0, m, hank_inner)
    return float(np.max(np.abs(lhs - rhs)))


def canonical_factorization(sym: FourierSymbol, method: str = "auto", band: int | None = None,
                            grid: int | None = None, n: int | None = None,
                            with_pair: bool = True) -> CanonicalFactorization:
    """Both factorizations plus (optionally) the pair ``b, c``."""
    if method == "auto":
        method = "scalar" if sym.N == 1 else "matrix"
    if method == "scalar":
        fact = scalar_canonical(sym, band, grid)
    elif method == "matrix":
        fact = matrix_canonical(sym, n, band, grid=grid)
    else:
        raise ValueError(f"unknown factorization method {method!r}")
    if with_pair:
        bo_pair(fact, band)
    return fact
