"""Matrix-valued symbols on the unit circle.

A symbol ``a`` is stored through its Laurent coefficients ``a_k`` on a finite
band ``-K..K``; every coefficient is an ``N x N`` complex matrix.  Values on
the circle are ``a(e^{i theta}) = sum_k a_k e^{i k theta}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.signal import fftconvolve

from .errors import AliasingError, PhaseResolutionError, SingularSymbolError

Side = Literal["minus", "plus"]

DEFAULT_GRID_EXPONENT = 12
MAX_GRID = 2**18
INVERT_TOL = 1e-10


def _trim(c: np.ndarray) -> np.ndarray:
    K = (c.shape[0] - 1) // 2
    nz = np.flatnonzero(np.any(c != 0, axis=(1, 2)))
    if nz.size == 0:
        return c[K:K + 1]
    band = int(np.max(np.abs(nz - K)))
    return c[K - band:K + band + 1]


@dataclass(frozen=True, eq=False)
class FourierSymbol:
    """Laurent coefficients ``a_k``, ``|k| <= band``, of an N x N symbol.

    ``coeffs`` has shape ``(2K+1, N, N)`` with ``coeffs[k + K] = a_k``; a 1-D
    array is read as a scalar symbol.  Trailing zero coefficients are trimmed
    so ``band`` is always the smallest bound containing every nonzero entry.
    """

    coeffs: np.ndarray
    label: str = ""
    hermitian: bool = False
    truncated: bool = False

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim == 1:
            c = c[:, None, None]
        if c.ndim != 3 or c.shape[1] != c.shape[2] or c.shape[1] == 0:
            raise ValueError(f"coefficients must have shape (2K+1, N, N), got {c.shape}")
        if c.shape[0] % 2 == 0:
            raise ValueError("coefficient band must be symmetric (odd length)")
        c = _trim(c)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        if self.hermitian:
            mismatch = np.max(np.abs(c[::-1] - np.conj(np.swapaxes(c, 1, 2))))
            if mismatch > 1e-12 * max(1.0, float(np.max(np.abs(c)))):
                raise ValueError(f"symbol tagged hermitian-valued violates a_(-k) = a_k^*: {mismatch:.3g}")

    # construction helpers

    @classmethod
    def from_dict(cls, coeffs: dict, N: int | None = None, **kw) -> "FourierSymbol":
        if not coeffs:
            N = N or 1
            return cls(np.zeros((1, N, N)), **kw)
        mats = {int(k): np.atleast_2d(np.asarray(v, dtype=complex)) for k, v in coeffs.items()}
        N = N or next(iter(mats.values())).shape[0]
        K = max(abs(k) for k in mats)
        c = np.zeros((2 * K + 1, N, N), dtype=complex)
        for k, m in mats.items():
            if m.shape != (N, N):
                raise ValueError(f"coefficient {k} has shape {m.shape}, expected {(N, N)}")
            c[k + K] = m
        return cls(c, **kw)

    @classmethod
    def constant(cls, value, N: int = 1, **kw) -> "FourierSymbol":
        m = np.asarray(value, dtype=complex)
        if m.ndim == 0:
            m = m * np.eye(N)
        return cls(m[None], **kw)

    @classmethod
    def diag(cls, *entries: "FourierSymbol", label: str = "") -> "FourierSymbol":
        if any(e.N != 1 for e in entries):
            raise ValueError("diag expects scalar entries")
        K = max(e.band for e in entries)
        N = len(entries)
        c = np.zeros((2 * K + 1, N, N), dtype=complex)
        for i, e in enumerate(entries):
            c[K - e.band:K + e.band + 1, i, i] = e.coeffs[:, 0, 0]
        return cls(c, label=label, hermitian=all(e.hermitian for e in entries))

    @classmethod
    def from_blocks(cls, blocks, label: str = "") -> "FourierSymbol":
        """Assemble an N x N symbol from a nested list of scalar symbols."""
        N = len(blocks)
        K = max(b.band for row in blocks for b in row)
        c = np.zeros((2 * K + 1, N, N), dtype=complex)
        for i, row in enumerate(blocks):
            if len(row) != N:
                raise ValueError("block layout must be square")
            for j, b in enumerate(row):
                c[K - b.band:K + b.band + 1, i, j] = b.coeffs[:, 0, 0]
        return cls(c, label=label)

    # basic accessors

    @property
    def N(self) -> int:
        return self.coeffs.shape[1]

    @property
    def band(self) -> int:
        return (self.coeffs.shape[0] - 1) // 2

    def __getitem__(self, k: int) -> np.ndarray:
        if abs(k) > self.band:
            return np.zeros((self.N, self.N), dtype=complex)
        return self.coeffs[k + self.band]

    def coeff_range(self, kmin: int, kmax: int) -> np.ndarray:
        """Coefficients for ``k = kmin..kmax`` (inclusive), zero-padded."""
        out = np.zeros((max(kmax - kmin + 1, 0), self.N, self.N), dtype=complex)
        lo, hi = max(kmin, -self.band), min(kmax, self.band)
        if lo <= hi:
            out[lo - kmin:hi - kmin + 1] = self.coeffs[lo + self.band:hi + self.band + 1]
        return out

    def take(self, ks) -> np.ndarray:
        """Coefficients at an integer index array (any shape); zero outside the band."""
        ks = np.asarray(ks)
        inside = np.abs(ks) <= self.band
        idx = np.where(inside, ks + self.band, 0)
        out = self.coeffs[idx]
        out[~inside] = 0
        return out

    def entry(self, i: int, j: int) -> "FourierSymbol":
        return FourierSymbol(self.coeffs[:, i, j].copy(), label=f"{self.label}[{i},{j}]")

    def with_band(self, K: int) -> "FourierSymbol":
        """Truncate (or zero-pad) to band ``K``; flags truncation if nonzeros are lost."""
        lost = self.band > K and bool(np.any(self.coeffs[:self.band - K] != 0) or np.any(self.coeffs[self.band + K + 1:] != 0))
        return FourierSymbol(self.coeffs_padded(K), label=self.label, truncated=self.truncated or lost)

    def coeffs_padded(self, K: int) -> np.ndarray:
        return self.coeff_range(-K, K)

    # pointwise algebra with constants

    def __add__(self, other):
        if isinstance(other, FourierSymbol):
            K = max(self.band, other.band)
            return FourierSymbol(self.coeffs_padded(K) + other.coeffs_padded(K), label=f"({self.label})+({other.label})",
                                 truncated=self.truncated or other.truncated)
        m = np.asarray(other, dtype=complex)
        c = self.coeffs.copy()
        c[self.band] = c[self.band] + (m * np.eye(self.N) if m.ndim == 0 else m)
        return FourierSymbol(c, label=self.label, truncated=self.truncated)

    def __sub__(self, other):
        if isinstance(other, FourierSymbol):
            return self + (-other)
        return self + (-np.asarray(other, dtype=complex))

    def __neg__(self):
        return FourierSymbol(-self.coeffs, label=f"-{self.label}", hermitian=self.hermitian, truncated=self.truncated)

    def scale(self, s) -> "FourierSymbol":
        return FourierSymbol(s * self.coeffs, label=self.label, truncated=self.truncated)

    def transpose(self) -> "FourierSymbol":
        return FourierSymbol(np.swapaxes(self.coeffs, 1, 2), label=f"{self.label}^T", truncated=self.truncated)

    def plus_part(self, include_zero: bool = True) -> "FourierSymbol":
        c = self.coeffs.copy()
        c[:self.band + (0 if include_zero else 1)] = 0
        return FourierSymbol(c, label=f"P({self.label})")

    def minus_part(self, include_zero: bool = False) -> "FourierSymbol":
        c = self.coeffs.copy()
        c[self.band + (1 if include_zero else 0):] = 0
        return FourierSymbol(c, label=f"Q({self.label})")

    def is_scalar(self) -> bool:
        return self.N == 1

    def __repr__(self):
        return f"FourierSymbol(N={self.N}, band={self.band}, label={self.label!r})"

    # evaluation

    def samples(self, grid: int) -> np.ndarray:
        """Exact values ``a(e^{i theta_j})`` at ``theta_j = 2 pi j / grid``, shape (grid, N, N)."""
        return samples(self, grid)

    def __call__(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        ks = np.arange(-self.band, self.band + 1)
        ph = np.exp(1j * np.multiply.outer(theta, ks))
        return np.tensordot(ph, self.coeffs, axes=(-1, 0))


@dataclass(frozen=True)
class KreinIndex:
    """Smoothness pair (alpha, beta) of a generalized Krein algebra."""

    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise ValueError(f"{name} must lie in (0, 1), got {v!r}")

    @property
    def excess(self) -> float:
        """alpha + beta - 1, the exponent of the refined error term."""
        return self.alpha + self.beta - 1.0


@dataclass
class MembershipReport:
    krein_norm: float  # math.inf when a tail series is judged divergent
    minus_exponent: float | None  # None: fewer than 8 nonzero coefficients
    plus_exponent: float | None
    invertible_on_grid: bool
    winding_number: int | None
    min_abs_det: float
    sup_norm: float
    member: bool
    notes: list[str] = field(default_factory=list)


def grid_angles(grid: int) -> np.ndarray:
    return 2 * np.pi * np.arange(grid) / grid


def samples(sym: FourierSymbol, grid: int) -> np.ndarray:
    """Evaluate on the uniform grid by wrapping coefficients modulo the grid size."""
    if grid < 1:
        raise ValueError("grid must be positive")
    wrapped = np.zeros((grid, sym.N, sym.N), dtype=complex)
    ks = np.arange(-sym.band, sym.band + 1)
    if 2 * sym.band + 1 <= grid:
        wrapped[ks % grid] = sym.coeffs
    else:
        np.add.at(wrapped, ks % grid, sym.coeffs)
    return np.fft.ifft(wrapped, axis=0) * grid


def fourier_from_samples(values, band: int, label: str = "") -> FourierSymbol:
    """Discrete Fourier coefficients of samples on a uniform grid.

    Parameters
    ----------
    values : array_like, shape (G,), (G, N) or (G, N, N)
        ``a(e^{i theta_j})`` for ``theta_j = 2 pi j / G``.
    band : int
        Largest ``|k|`` to return.  Requires ``G > 2 * band``.

    Returns
    -------
    FourierSymbol
        ``a_k = (1/G) sum_j a(e^{i theta_j}) e^{-i k theta_j}``, exact for
        Laurent polynomials of degree ``<= band``.
    """
    v = np.asarray(values, dtype=complex)
    if v.shape[0] == 0:
        raise ValueError("no samples")
    if v.ndim == 1:
        v = v[:, None, None]
    G = v.shape[0]
    if G <= 2 * band:
        raise AliasingError(
            f"grid of {G} points cannot resolve band {band}: coefficients k and k-{G} would alias "
            f"(need more than {2 * band} points)"
        )
    F = np.fft.fft(v, axis=0) / G
    ks = np.arange(-band, band + 1)
    return FourierSymbol(F[ks % G], label=label)


def default_grid(band: int, minimum: int = 2**DEFAULT_GRID_EXPONENT) -> int:
    return max(minimum, 1 << math.ceil(math.log2(4 * band + 4)))


def coefficient_norms(sym: FourierSymbol) -> np.ndarray:
    """Spectral norm of every stored coefficient (``abs`` for scalar symbols)."""
    if sym.N == 1:
        return np.abs(sym.coeffs[:, 0, 0])
    return np.linalg.norm(sym.coeffs, ord=2, axis=(1, 2))


def sup_norm(sym: FourierSymbol, grid_exponent: int = DEFAULT_GRID_EXPONENT) -> float:
    """Max of the spectral norm of ``a`` over a ``2^m`` grid (an estimate of the L-infinity norm)."""
    v = samples(sym, 2**grid_exponent)
    if sym.N == 1:
        return float(np.max(np.abs(v)))
    return float(np.max(np.linalg.norm(v, ord=2, axis=(1, 2))))


def _weighted_series(mags: np.ndarray, weight: float) -> float:
    # mags[k] = |a_(+-k)| for k = 0, 1, ...
    k = np.arange(mags.size)
    return float(math.sqrt(np.sum(mags**2 * (k + 1.0) ** (2 * weight))))


def krein_norm(sym: FourierSymbol, idx: KreinIndex, grid_exponent: int = DEFAULT_GRID_EXPONENT) -> float:
    """``||a||_inf + (sum_{k>=0} |a_-k|^2 (k+1)^{2 alpha})^{1/2} + (sum_{k>=0} |a_k|^2 (k+1)^{2 beta})^{1/2}``.

    The k = 0 coefficient enters both series.  Matrix symbols use the
    max-over-entries norm.
    """
    if sym.N > 1:
        return max(krein_norm(sym.entry(i, j), idx, grid_exponent) for i in range(sym.N) for j in range(sym.N))
    c = sym.coeffs[:, 0, 0]
    K = sym.band
    minus = np.abs(c[K::-1])
    plus = np.abs(c[K:])
    return sup_norm(sym, grid_exponent) + _weighted_series(minus, idx.alpha) + _weighted_series(plus, idx.beta)


def tail(sym: FourierSymbol, n: int, side: Side, idx: KreinIndex) -> float:
    """Weighted coefficient tail ``(sum_{k>n} ||a_(-+k)||^2 (k+1)^{2w})^{1/2}``.

    ``side="minus"`` uses negative indices and weight alpha, ``"plus"`` positive
    indices and weight beta.  Coefficient size is the spectral norm.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    norms = coefficient_norms(sym)
    K = sym.band
    if n >= K:
        return 0.0
    ks = np.arange(n + 1, K + 1)
    if side == "minus":
        mags, w = norms[K - ks], idx.alpha
    elif side == "plus":
        mags, w = norms[K + ks], idx.beta
    else:
        raise ValueError(f"side must be 'minus' or 'plus', got {side!r}")
    # summed from the far end so small terms accumulate first
    terms = (mags**2 * (ks + 1.0) ** (2 * w))[::-1]
    return float(math.sqrt(np.sum(terms)))


def tails(sym: FourierSymbol, ns, side: Side, idx: KreinIndex) -> np.ndarray:
    return np.array([tail(sym, int(n), side, idx) for n in ns])


def _convolve(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if x.size * y.size <= 5e7:
        return np.convolve(x, y)
    return fftconvolve(x, y)


def multiply(a: FourierSymbol, b: FourierSymbol, band: int | None = None) -> FourierSymbol:
    """Cauchy product of two coefficient bands, truncated to ``band``.

    The exact product lives on band ``a.band + b.band``; asking for less sets
    ``truncated`` on the result when nonzero coefficients are dropped.
    """
    if a.N != b.N:
        raise ValueError(f"dimension mismatch: {a.N} vs {b.N}")
    N = a.N
    full = a.band + b.band
    band = full if band is None else band
    out = np.zeros((2 * full + 1, N, N), dtype=complex)
    for i in range(N):
        for j in range(N):
            for l in range(N):
                out[:, i, j] += _convolve(a.coeffs[:, i, l], b.coeffs[:, l, j])
    res = FourierSymbol(out, label=f"({a.label})*({b.label})", truncated=a.truncated or b.truncated)
    if band >= res.band:
        return res
    dropped = np.concatenate([res.coeffs[:res.band - band], res.coeffs[res.band + band + 1:]])
    scale = max(float(np.max(np.abs(res.coeffs))), 1e-300)
    lost = bool(np.max(np.abs(dropped)) > 1e-14 * scale)
    return FourierSymbol(res.coeffs_padded(band), label=res.label, truncated=res.truncated or lost)


def invert(sym: FourierSymbol, band: int, grid: int | None = None, tol: float = INVERT_TOL,
           residual_tol: float = 1e-10) -> FourierSymbol:
    """Coefficients of ``a^{-1}`` up to ``band`` by pointwise inversion on a grid.

    Raises :class:`SingularSymbolError` if the smallest singular value of
    ``a(e^{i theta})`` drops below ``tol`` at any node.  When the band-limited
    result fails to reproduce the pointwise inverse on the grid to
    ``residual_tol`` the result is flagged ``truncated``.
    """
    G = grid or default_grid(max(band, sym.band))
    v = samples(sym, G)
    smin = np.linalg.svd(v, compute_uv=False)[:, -1]
    j = int(np.argmin(smin))
    if smin[j] <= tol:
        theta = 2 * np.pi * j / G
        raise SingularSymbolError(
            f"symbol {sym.label!r} is (nearly) singular at theta={theta:.6g} (smallest singular value {smin[j]:.3g})",
            theta=theta,
        )
    inv = np.linalg.inv(v)
    res = fourier_from_samples(inv, band, label=f"({sym.label})^-1")
    back = samples(res, G)
    err = float(np.max(np.abs(np.einsum("gij,gjk->gik", v, back) - np.eye(sym.N))))
    return FourierSymbol(res.coeffs, label=res.label, truncated=sym.truncated or err > residual_tol)


def reflect(sym: FourierSymbol) -> FourierSymbol:
    """``a~(t) = a(1/t)``: coefficient ``k`` becomes coefficient ``-k``."""
    return FourierSymbol(sym.coeffs[::-1], label=f"~{sym.label}", hermitian=sym.hermitian, truncated=sym.truncated)


def det_samples(sym: FourierSymbol, grid: int) -> np.ndarray:
    v = samples(sym, grid)
    return v[:, 0, 0] if sym.N == 1 else np.linalg.det(v)


def continuous_log(sym: FourierSymbol, grid: int | None = None, max_grid: int = MAX_GRID,
                   threshold: float = np.pi / 2):
    """Logarithm of ``det a`` on a grid with continuously tracked phase.

    The grid is doubled until no phase increment between neighbouring nodes
    exceeds ``threshold``.

    Returns
    -------
    grid : int
    log_values : ndarray, shape (grid,)
    winding : int
    """
    G = grid or default_grid(sym.band)
    while True:
        d = det_samples(sym, G)
        mags = np.abs(d)
        j = int(np.argmin(mags))
        if mags[j] == 0 or not np.isfinite(mags).all():
            raise SingularSymbolError(f"det a vanishes at theta={2 * np.pi * j / G:.6g}", theta=2 * np.pi * j / G)
        inc = np.angle(np.roll(d, -1) / d)
        if np.max(np.abs(inc)) <= threshold:
            break
        if 2 * G > max_grid:
            raise PhaseResolutionError(
                f"phase increment {np.max(np.abs(inc)):.3g} exceeds {threshold:.3g} even on {G} nodes"
            )
        G *= 2
    phase = np.angle(d[0]) + np.concatenate([[0.0], np.cumsum(inc[:-1])])
    winding = int(round(float(np.sum(inc)) / (2 * np.pi)))
    return G, np.log(mags) + 1j * phase, winding


def winding_number(sym: FourierSymbol, grid: int | None = None) -> int:
    """Winding number of ``det a`` about the origin (argument principle on the grid)."""
    return continuous_log(sym, grid)[2]


def exponent_fit(sym: FourierSymbol, side: Side) -> float | None:
    """Least-squares slope of ``log ||a_(+-k)||`` against ``log k`` over the stored band."""
    norms = coefficient_norms(sym)
    K = sym.band
    ks = np.arange(1, K + 1)
    mags = norms[K - ks] if side == "minus" else norms[K + ks]
    keep = mags > 0
    if np.count_nonzero(keep) < 8:
        return None
    slope, _ = np.polyfit(np.log(ks[keep]), np.log(mags[keep]), 1)
    return float(slope)


def membership_check(sym: FourierSymbol, idx: KreinIndex, grid_exponent: int = DEFAULT_GRID_EXPONENT,
                     tol: float = INVERT_TOL) -> MembershipReport:
    """Heuristic K^{alpha,beta} membership and grid invertibility.

    A side with a fitted decay exponent ``s`` is judged square-summable against
    weight ``w`` when ``w < -s - 1/2``.  Sides with fewer than 8 nonzero
    coefficients are finite sums and always pass.
    """
    notes = []
    fm, fp = exponent_fit(sym, "minus"), exponent_fit(sym, "plus")
    ok_minus = fm is None or idx.alpha < -fm - 0.5
    ok_plus = fp is None or idx.beta < -fp - 0.5
    for side, f, w, ok in (("minus", fm, idx.alpha, ok_minus), ("plus", fp, idx.beta, ok_plus)):
        if f is None:
            notes.append(f"{side} side: insufficient data for exponent fit (finite sum)")
        elif not ok:
            notes.append(f"{side} side: fitted exponent {f:.4f} makes the weight-{w} series divergent")
    sup = sup_norm(sym, grid_exponent)
    member = ok_minus and ok_plus
    norm = krein_norm(sym, idx, grid_exponent) if member else math.inf
    G = 2**grid_exponent
    d = np.abs(det_samples(sym, G))
    min_det = float(np.min(d))
    invertible = min_det > tol
    wind = None
    if invertible:
        try:
            wind = winding_number(sym, G)
        except PhaseResolutionError as exc:
            notes.append(str(exc))
    return MembershipReport(
        krein_norm=norm, minus_exponent=fm, plus_exponent=fp, invertible_on_grid=invertible,
        winding_number=wind, min_abs_det=min_det, sup_norm=sup, member=member, notes=notes,
    )
