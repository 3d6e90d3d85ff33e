"""Szegő-Widom trace asymptotics ``trace f(T_n(a)) = (n+1) G_f(a) + E_f(a) + eps_n``.

``E_f`` is obtained from ``D(lambda) = det T(a - lambda) T((a - lambda)^{-1})``
along a contour enclosing the spectrum, through

    E_f = -(1 / 2 pi i) oint f'(lambda) log D(lambda) d lambda,

which is the defining integral after integration by parts (``log D`` is
single valued on the contour when its net phase change vanishes).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ContourError, PhaseResolutionError, WindingError
from .functions import AnalyticFunction, Contour
from .linalg import toeplitz_section, trace_f
from .symbols import (
    FourierSymbol,
    KreinIndex,
    continuous_log,
    default_grid,
    reflect,
    samples,
    tail,
    winding_number,
)

log = logging.getLogger(__name__)

DEFAULT_NS = (16, 23, 32, 45, 64, 91, 128, 181, 256)
ROUNDOFF_FLOOR = 1e-13
SLOPE_SLACK = 0.15
SERIES_BAND = 128
MAX_CONTOUR_NODES = 4096


def _shift(sym: FourierSymbol, lam: complex) -> FourierSymbol:
    return sym - lam * np.eye(sym.N) if sym.N > 1 else sym - lam


def Gf(sym: FourierSymbol, f: AnalyticFunction, grid: int | None = None, tau: float = 1e-8) -> complex:
    """Mean of ``trace f(a(e^{i theta}))`` over a uniform grid.

    For a polynomial ``f`` of degree ``d`` the integrand is a Laurent
    polynomial of degree ``d * band``; the default grid resolves it exactly.
    """
    G = grid or default_grid(max(f.degree, 1) * sym.band + 1)
    vals = samples(sym, G)
    if f.poles:
        eigs = np.linalg.eigvals(vals).ravel()
        for p, _ in f.poles:
            d = float(np.min(np.abs(eigs - p)))
            if d <= tau:
                raise ContourError(f"pole {p} lies on the sampled range of the symbol (distance {d:.3g})")
    return complex(np.mean(f.trace_of(vals)))


def trace_f_Tn(sym: FourierSymbol, f: AnalyticFunction, n: int, contour: Contour | None = None) -> complex:
    return trace_f(toeplitz_section(sym, n), f, contour)


# --- D(lambda) by three independent routes ---------------------------------

def log_D_series(sym: FourierSymbol, lam: complex, grid: int | None = None) -> complex:
    """``log D = sum_{k >= 1} k L_k L_{-k}`` with ``L = log(a - lambda)`` (scalar symbols)."""
    if sym.N != 1:
        raise ValueError("the log series route needs a scalar symbol")
    shifted = _shift(sym, lam)
    G, L, wind = continuous_log(shifted, grid or default_grid(2 * sym.band))
    if wind != 0:
        raise WindingError(wind)
    Lhat = np.fft.fft(L) / G
    k = np.arange(1, G // 2)
    terms = k * Lhat[k] * Lhat[G - k]
    return complex(np.sum(terms[::-1]))


def D_hankel(sym: FourierSymbol, lam: complex, inverse_band: int | None = None) -> complex:
    """``det(I - H(a - lambda) H((a - lambda)~^{-1}))`` on an exact section."""
    from .szego import E_symbol_route
    shifted = _shift(sym, lam)
    w = winding_number(shifted)
    if w != 0:
        raise WindingError(w)
    return E_symbol_route(shifted, inverse_band)


def D_factor(sym: FourierSymbol, lam: complex) -> complex:
    """``1 / det T(b) T(c)`` from a canonical factorization of ``a - lambda``."""
    from .szego import E_factor_route
    from .wiener_hopf import canonical_factorization
    fact = canonical_factorization(_shift(sym, lam))
    return E_factor_route(fact.b, fact.c)[0]


def _auto_method(sym: FourierSymbol) -> str:
    return "series" if sym.N == 1 and sym.band > SERIES_BAND else "hankel"


def log_D_values(sym: FourierSymbol, contour: Contour, method: str = "auto") -> np.ndarray:
    """``log D`` at every contour node with continuously tracked phase.

    Raises
    ------
    ContourError
        When neighbouring nodes differ in phase by more than ``pi / 2`` (the
        caller refines) or the phase does not return to its start.
    """
    if method == "auto":
        method = _auto_method(sym)
    if method == "series":
        vals = np.array([log_D_series(sym, lam) for lam in contour.nodes])
        inc = np.diff(np.concatenate([vals.imag, vals.imag[:1]]))
    elif method in ("hankel", "factor"):
        fn = D_hankel if method == "hankel" else D_factor
        D = np.array([fn(sym, lam) for lam in contour.nodes])
        if np.any(D == 0):
            raise ContourError("D(lambda) vanishes at a contour node")
        inc = np.angle(np.roll(D, -1) / D)
        phase = np.angle(D[0]) + np.concatenate([[0.0], np.cumsum(inc[:-1])])
        vals = np.log(np.abs(D)) + 1j * phase
    else:
        raise ValueError(f"unknown D(lambda) method {method!r}")
    if np.max(np.abs(inc)) > math.pi / 2:
        raise PhaseResolutionError(f"phase of D jumps by {np.max(np.abs(inc)):.3g} between contour nodes")
    net = float(np.sum(inc))
    if abs(net) > math.pi:
        raise ContourError(
            f"log D(lambda) changes by {net:.4g} around the contour; the contour likely crosses the spectrum"
        )
    return vals


def Ef(sym: FourierSymbol, f: AnalyticFunction, contour: Contour, method: str = "auto",
       max_nodes: int = MAX_CONTOUR_NODES) -> complex:
    """``E_f(a) = -(1 / 2 pi i) oint f'(lambda) log D(lambda) d lambda``.

    ``method`` selects how ``D`` is evaluated per node: ``"hankel"`` (dense
    determinant, exact section), ``"series"`` (scalar log series, suited to
    wide bands) or ``"factor"`` (per-node Wiener-Hopf factorization).  Nodes
    are doubled while the phase of ``D`` jumps by more than ``pi / 2``.
    """
    fp = f.derivative()
    while True:
        try:
            logD = log_D_values(sym, contour, method)
            break
        except PhaseResolutionError:
            if 2 * len(contour) > max_nodes:
                raise ContourError(f"phase of D unresolved with {len(contour)} nodes") from None
            contour = contour.refined()
    return -contour.integral(fp(contour.nodes) * logD)


# --- error sequence and rate -----------------------------------------------

@dataclass
class ErrorRow:
    n: int
    trace: complex
    linear: complex
    Ef: complex
    eps: complex
    sup_tail_b_plus: float | None = None
    sup_tail_c_minus: float | None = None


def error_sequence(sym: FourierSymbol, f: AnalyticFunction, contour: Contour | None, ns,
                   idx: KreinIndex | None = None, Gf_value: complex | None = None,
                   Ef_value: complex | None = None, method: str = "auto",
                   node_tails: bool = False) -> list[ErrorRow]:
    """``eps_n = trace f(T_n(a)) - (n+1) G_f(a) - E_f(a)`` for each ``n``.

    With ``node_tails`` (needs ``idx``) every contour node is factorized and
    the sup over nodes of ``R_n^+(b(lambda))`` and ``R_n^-(c(lambda))`` is
    attached to each row.
    """
    g = Gf(sym, f) if Gf_value is None else Gf_value
    if Ef_value is None:
        if contour is None:
            raise ValueError("a contour is needed to compute E_f")
        Ef_value = Ef(sym, f, contour, method)
    pairs = None
    if node_tails:
        if idx is None or contour is None:
            raise ValueError("node tails need a Krein index and a contour")
        from .wiener_hopf import canonical_factorization
        pairs = []
        for lam in contour.nodes:
            fact = canonical_factorization(_shift(sym, lam))
            pairs.append((fact.b, fact.c))
    rows = []
    for n in ns:
        tr = trace_f_Tn(sym, f, int(n))
        lin = (n + 1) * g
        row = ErrorRow(int(n), tr, lin, Ef_value, tr - lin - Ef_value)
        if pairs is not None:
            row.sup_tail_b_plus = max(tail(b, int(n), "plus", idx) for b, _ in pairs)
            row.sup_tail_c_minus = max(tail(c, int(n), "minus", idx) for _, c in pairs)
        rows.append(row)
    return rows


@dataclass
class RateFit:
    ns: np.ndarray
    errors: np.ndarray
    slope: float
    intercept: float
    r_squared: float
    target: float
    verdict: str
    passed: bool
    used: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))


def rate_fit(ns, errors, idx: KreinIndex, window=None, floor: float = ROUNDOFF_FLOOR,
             slack: float = SLOPE_SLACK) -> RateFit:
    """Least-squares slope of ``log |eps_n|`` against ``log n``.

    Verdicts: ``"pass"`` when the slope is at most ``1 - alpha - beta +
    slack``; ``"exact regime"`` (a pass) when every error is below the
    roundoff floor; ``"insufficient data"`` with fewer than four usable points.
    When ``alpha + beta = 1`` no rate is claimed and the verdict only asks
    the errors to decrease (``"o(1)"``).
    """
    ns = np.asarray(ns, dtype=float)
    err = np.abs(np.asarray(errors))
    mask = err >= floor
    if window is not None:
        lo, hi = window
        mask &= (ns >= lo) & (ns <= hi)
    target = 1.0 - idx.alpha - idx.beta
    nan = float("nan")
    if not np.any(err >= floor):
        return RateFit(ns, err, nan, nan, nan, target, "exact regime", True, mask)
    if np.count_nonzero(mask) < 4:
        return RateFit(ns, err, nan, nan, nan, target, "insufficient data", False, mask)
    x, y = np.log(ns[mask]), np.log(err[mask])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss if ss > 0 else 1.0
    if abs(idx.excess) < 1e-12:
        ok = bool(err[mask][-1] < err[mask][0])
        verdict = "o(1)" if ok else "fail"
    else:
        ok = bool(slope <= target + slack)
        verdict = "pass" if ok else "fail"
    return RateFit(ns, err, float(slope), float(intercept), r2, target, verdict, ok, mask)


# --- contours ----------------------------------------------------------------

@dataclass
class ContourReport:
    min_sv_T: float
    min_sv_T_reflected: float
    min_range_distance: float
    poles_inside: list
    tau: float
    probe_order: int
    passed: bool


def range_cloud(sym: FourierSymbol, grid: int | None = None) -> np.ndarray:
    """Eigenvalues of ``a(e^{i theta})`` over a grid."""
    vals = samples(sym, grid or default_grid(sym.band))
    if sym.N == 1:
        return vals[:, 0, 0]
    return np.linalg.eigvals(vals).ravel()


def _min_distance(points: np.ndarray, cloud: np.ndarray, chunk: int = 64) -> float:
    best = math.inf
    for i in range(0, len(points), chunk):
        d = np.abs(points[i:i + chunk, None] - cloud[None, :])
        best = min(best, float(d.min()))
    return best


def _probe_min_sv(T: np.ndarray, nodes: np.ndarray, hermitian: bool) -> float:
    if hermitian:
        ev = scipy.linalg.eigvalsh(T)
        return _min_distance(nodes, ev.astype(complex))
    eye = np.eye(T.shape[0])
    return min(float(scipy.linalg.svdvals(T - lam * eye)[-1]) for lam in nodes)


def contour_validate(sym: FourierSymbol, contour: Contour, m: int = 512, tau: float = 1e-3,
                     f: AnalyticFunction | None = None, grid: int | None = None) -> ContourReport:
    """Check that the contour keeps clear of a finite-section spectrum probe and the range.

    ``T_m(a) - lambda`` and ``T_m(a~) - lambda`` must have smallest singular
    value above ``tau`` at every node, and every node must be ``tau`` away
    from the eigenvalues of ``a`` sampled on the circle.  The finite section
    only stands in for the spectrum of ``T(a)``.  Poles of ``f`` enclosed by
    the contour are listed and fail the check.
    """
    nodes = contour.nodes
    T = toeplitz_section(sym, m).entries
    Tr = toeplitz_section(reflect(sym), m).entries
    herm = sym.hermitian
    s1 = _probe_min_sv(T, nodes, herm)
    s2 = _probe_min_sv(Tr, nodes, herm)
    dist = _min_distance(nodes, range_cloud(sym, grid))
    inside = []
    if f is not None:
        for p, _ in f.poles:
            if contour.encloses(p)[0] != 0:
                inside.append(p)
    ok = s1 > tau and s2 > tau and dist > tau and not inside
    return ContourReport(s1, s2, dist, inside, tau, m, bool(ok))


def auto_contour(sym: FourierSymbol, nodes: int = 256, margin: float | None = None,
                 grid: int | None = None) -> Contour:
    """A circle around the sampled range that also encloses ``sp T(a)`` and ``sp T(a~)``.

    With ``c`` the centre of the range's bounding box, both spectra lie in the
    disk of radius ``sup ||a - c||``; the circle adds ``margin`` (default a
    quarter of that radius, at least 0.5).
    """
    cloud = range_cloud(sym, grid)
    c = complex((cloud.real.min() + cloud.real.max()) / 2, (cloud.imag.min() + cloud.imag.max()) / 2)
    vals = samples(_shift(sym, c), grid or default_grid(sym.band))
    if sym.N == 1:
        rad = float(np.max(np.abs(vals)))
    else:
        rad = float(np.max(np.linalg.norm(vals, ord=2, axis=(1, 2))))
    margin = max(0.5, rad / 4) if margin is None else margin
    return Contour.circle(c, rad + margin, nodes)
