"""Numerical checks of the quantitative inequalities behind the trace-formula rate.

* ``|log det(I - A)| <= 2 ||A||_1`` for ``||A||_1 < 1``;
* ``||AB||_1 <= ||A||_2 ||B||_2``;
* weighted Hilbert-Schmidt bounds for ``H(c~) Q_n`` and ``Q_n H(b)`` with the
  explicit constant ``M``;
* the trace-norm decay of ``Q_n H(b) H(c~) Q_n``.

Weighted spaces: ``l2^gamma`` has norm ``(sum |x_k|^2 (k+1)^{2 gamma})^{1/2}``
and orthonormal basis ``e_k / (k+1)^gamma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundPreconditionError
from .linalg import DenseOperator, log_determinant, schatten_norm, truncated_hankel_product
from .symbols import FourierSymbol, KreinIndex, tail

PASS_SLACK = 1e-12
AUDIT_SEED = 20240611
BOUNDARY_TOL = 1e-14


@dataclass(frozen=True)
class WeightedSpaceParams:
    gamma: float

    def __post_init__(self):
        if not -0.5 < self.gamma < 0.5:
            raise ValueError(f"gamma must lie in (-1/2, 1/2), got {self.gamma}")

    @classmethod
    def for_trace_norm(cls, beta: float) -> "WeightedSpaceParams":
        """The weight that splits ``Q_n H(b) H(c~) Q_n`` evenly: ``gamma = 1/2 - beta``."""
        return cls(0.5 - beta)


@dataclass
class BoundCheck:
    name: str
    lhs: float
    rhs: float
    context: dict = field(default_factory=dict)
    verdict: str = ""

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs + PASS_SLACK

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def __post_init__(self):
        if not self.verdict:
            self.verdict = "pass" if self.passed else "fail"


def _is_boundary(weight: float, gamma: float, side: str) -> bool:
    g = gamma if side == "minus" else -gamma
    return abs(1 + 2 * g - 2 * weight) <= BOUNDARY_TOL


def _A(weight: float, gamma: float, side: str) -> float:
    g = gamma if side == "minus" else -gamma
    return (2 * g + 1) / (2 * weight - 2 * g - 1)


def constant_M(weight: float, gamma: float, side: str = "minus") -> float:
    """Constant of the weighted Hilbert-Schmidt bound.

    For the minus side (weight alpha) with ``A = (2 gamma + 1) / (2 alpha - 2 gamma - 1)``,
    ``M = (1 + 2 gamma)^{-1/2} A^{1/2 + gamma} (A + 1)^{-alpha}``, and
    ``M = (2 alpha)^{-1/2}`` when ``1 + 2 gamma = 2 alpha``.  The plus side
    (weight beta) is the same with ``gamma`` replaced by ``-gamma``.

    Raises
    ------
    BoundPreconditionError
        If ``alpha < gamma + 1/2`` (minus) or ``beta < 1/2 - gamma`` (plus).
    """
    if side not in ("minus", "plus"):
        raise ValueError(f"side must be 'minus' or 'plus', got {side!r}")
    WeightedSpaceParams(gamma)
    g = gamma if side == "minus" else -gamma
    if _is_boundary(weight, gamma, side):
        return (2 * weight) ** -0.5
    if weight < g + 0.5:
        raise BoundPreconditionError(
            f"{side} side needs weight >= {g + 0.5:g} for gamma={gamma:g}, got {weight:g}"
        )
    A = _A(weight, gamma, side)
    return (1 + 2 * g) ** -0.5 * A ** (0.5 + g) * (A + 1) ** -weight


def threshold_n(weight: float, gamma: float, side: str = "minus") -> int:
    """Smallest order for which the general-case bound is proved (``n >= 2/A``); 1 on the boundary."""
    if _is_boundary(weight, gamma, side):
        return 1
    return max(1, math.ceil(2 / _A(weight, gamma, side) - 1e-12))


def partial_power_sums(m: int, gamma: float) -> np.ndarray:
    """``S[j] = sum_{i=1}^{j} i^{2 gamma}`` for ``j = 0..m``."""
    return np.concatenate([[0.0], np.cumsum(np.arange(1, m + 1, dtype=float) ** (2 * gamma))])


def _side_magnitudes(sym: FourierSymbol, side: str) -> np.ndarray:
    # mags[k] = Frobenius norm of the coefficient at -k (minus) or +k (plus), k = 0..K
    K = sym.band
    fro = np.sqrt(np.sum(np.abs(sym.coeffs) ** 2, axis=(1, 2)))
    return fro[K::-1] if side == "minus" else fro[K:]


def weighted_hs_series(sym: FourierSymbol, n: int, gamma: float, side: str = "minus") -> float:
    """Hilbert-Schmidt norm of ``H(c~) Q_n : l2 -> l2^gamma`` (minus) or ``Q_n H(b) : l2^gamma -> l2`` (plus).

    ``sum_{k >= n+2} ||a_(-+k)||^2 sum_{j=1}^{k-n-1} j^{+-2 gamma}``, squared-rooted.
    """
    mags = _side_magnitudes(sym, side)
    K = len(mags) - 1
    if K < n + 2:
        return 0.0
    g = gamma if side == "minus" else -gamma
    S = partial_power_sums(K - n - 1, g)
    ks = np.arange(n + 2, K + 1)
    terms = mags[ks] ** 2 * S[ks - n - 1]
    return float(math.sqrt(np.sum(terms[::-1])))


def weighted_hs_direct(sym: FourierSymbol, n: int, gamma: float, side: str = "minus") -> float:
    """The same norm summed entry by entry over the sectioned operator matrix."""
    K = sym.band
    if K < n + 2:
        return 0.0
    rows = np.arange(K + 1)
    cols = np.arange(n + 1, K + 1)
    if side == "minus":
        # H(c~) Q_n: entry (i, j) = c_{-i-j-1}, j >= n+1; row i weighted by (i+1)^{2 gamma}
        ent = sym.take(-(np.add.outer(rows, cols) + 1))
        w = (rows + 1.0) ** (2 * gamma)
        sq = np.sum(np.abs(ent) ** 2, axis=(2, 3)) * w[:, None]
    else:
        # Q_n H(b): entry (i, j) = b_{i+j+1}, i >= n+1; column j weighted by (j+1)^{-2 gamma}
        ent = sym.take(np.add.outer(cols, rows) + 1)
        w = (rows + 1.0) ** (-2 * gamma)
        sq = np.sum(np.abs(ent) ** 2, axis=(2, 3)) * w[None, :]
    return float(math.sqrt(np.sum(np.sort(sq.ravel()))))


def _hs_check(sym: FourierSymbol, n: int, weight: float, gamma: float, side: str) -> BoundCheck:
    name = "hs_bound_minus" if side == "minus" else "hs_bound_plus"
    if n < 1:
        raise BoundPreconditionError("the weighted Hilbert-Schmidt bound needs n >= 1")
    M = constant_M(weight, gamma, side)
    idx = KreinIndex(weight, 0.5) if side == "minus" else KreinIndex(0.5, weight)
    r = tail(sym, n + 1, side, idx)
    g = gamma if side == "minus" else -gamma
    rhs = M * r / n ** (weight - g - 0.5)
    lhs = weighted_hs_series(sym, n, gamma, side)
    thr = threshold_n(weight, gamma, side)
    ctx = {"n": n, "weight": weight, "gamma": gamma, "side": side, "M": M, "tail": r, "threshold": thr}
    check = BoundCheck(name, lhs, rhs, ctx)
    if n < thr:
        check.verdict = "below threshold"
    return check


def hs_bound_check(c: FourierSymbol, n: int, alpha: float, gamma: float) -> BoundCheck:
    """``||H(c~) Q_n||_{C2(l2, l2^gamma)} <= M(alpha, gamma) r_{n+1}^-(c) / n^{alpha - gamma - 1/2}``.

    ``r_m^-(c)`` is the weighted tail over ``k > m``.  Orders below ``2/A``
    get the verdict ``"below threshold"`` (the comparison is still made).
    """
    return _hs_check(c, n, alpha, gamma, "minus")


def hs_bound_check_plus(b: FourierSymbol, n: int, beta: float, gamma: float) -> BoundCheck:
    """``||Q_n H(b)||_{C2(l2^gamma, l2)} <= M(beta, gamma) r_{n+1}^+(b) / n^{beta + gamma - 1/2}``."""
    return _hs_check(b, n, beta, gamma, "plus")


def _entries(A) -> np.ndarray:
    return A.entries if isinstance(A, DenseOperator) else np.asarray(A, dtype=complex)


def check_logdet_bound(A) -> BoundCheck:
    """``|log det(I - A)| <= 2 ||A||_1``; requires ``||A||_1 < 1``.

    Under the precondition every eigenvalue has modulus below one and the
    total argument of ``det(I - A)`` stays inside ``(-pi/2, pi/2)``, so the
    principal logarithm is the right branch.
    """
    a = _entries(A)
    tn = schatten_norm(a).trace_norm
    if not tn < 1:
        raise BoundPreconditionError(f"trace norm {tn:.6g} is not below 1")
    logabs, arg = log_determinant(np.eye(a.shape[0]) - a)
    return BoundCheck("logdet", abs(complex(logabs, arg)), 2 * tn, {"trace_norm": tn, "size": a.shape[0]})


def check_holder(A, B) -> BoundCheck:
    """``||AB||_1 <= ||A||_2 ||B||_2``."""
    a, b = _entries(A), _entries(B)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    lhs = schatten_norm(a @ b).trace_norm
    rhs = float(np.linalg.norm(a) * np.linalg.norm(b))
    return BoundCheck("holder", lhs, rhs, {"shapes": (a.shape, b.shape)})


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_logdet_audit(trials: int = 100, size: int = 6, trace_norm: float = 0.9,
                        seed: int = AUDIT_SEED) -> list[BoundCheck]:
    """Complex Gaussian matrices rescaled to the given trace norm; trial ``i`` uses the i-th spawned seed."""
    out = []
    for i, ss in enumerate(np.random.SeedSequence(seed).spawn(trials)):
        rng = np.random.default_rng(ss)
        a = _complex_gaussian(rng, (size, size))
        a *= trace_norm / schatten_norm(a).trace_norm
        chk = check_logdet_bound(a)
        chk.context.update(trial=i, seed=seed)
        out.append(chk)
    return out


def random_holder_audit(trials: int = 100, max_size: int = 12, seed: int = AUDIT_SEED + 1) -> list[BoundCheck]:
    out = []
    for i, ss in enumerate(np.random.SeedSequence(seed).spawn(trials)):
        rng = np.random.default_rng(ss)
        m, k, p = rng.integers(1, max_size + 1, size=3)
        chk = check_holder(_complex_gaussian(rng, (m, k)), _complex_gaussian(rng, (k, p)))
        chk.context.update(trial=i, seed=seed)
        out.append(chk)
    return out


def partial_sum_check(gamma: float, max_m: int = 10_000) -> BoundCheck:
    """``sum_{j=1}^{m} j^{2 gamma} <= (m+1)^{1+2 gamma} / (1 + 2 gamma)`` for every ``1 <= m <= max_m``.

    Reported as the worst ratio lhs / rhs against 1.
    """
    WeightedSpaceParams(gamma)
    S = partial_power_sums(max_m, gamma)[1:]
    m = np.arange(1, max_m + 1, dtype=float)
    rhs = (m + 1) ** (1 + 2 * gamma) / (1 + 2 * gamma)
    ratio = S / rhs
    j = int(np.argmax(ratio))
    return BoundCheck("partial_sum", float(ratio[j]), 1.0, {"gamma": gamma, "max_m": max_m, "worst_m": j + 1})


def maximizer_check(n: int, alpha: float, gamma: float, points: int = 200_001, rel_tol: float = 0.01) -> BoundCheck:
    """Grid search for the maximizer of ``(x - n)^{1+2 gamma} x^{-2 alpha}`` on ``[n+2, inf)``.

    Compares it with ``x_n = (A + 1) n``; ``lhs`` is the relative distance.
    """
    if _is_boundary(alpha, gamma, "minus") or alpha < gamma + 0.5:
        raise BoundPreconditionError("the interior maximizer exists only for alpha > gamma + 1/2")
    A = _A(alpha, gamma, "minus")
    xn = (A + 1) * n
    if xn < n + 2:
        raise BoundPreconditionError(f"x_n = {xn:g} lies left of n + 2 (need n >= 2/A = {2 / A:g})")
    x = np.geomspace(n + 2, 1000 * xn, points)
    logf = (1 + 2 * gamma) * np.log(x - n) - 2 * alpha * np.log(x)
    xs = float(x[int(np.argmax(logf))])
    return BoundCheck("maximizer", abs(xs - xn) / xn, rel_tol,
                      {"n": n, "alpha": alpha, "gamma": gamma, "x_n": xn, "grid_argmax": xs})


@dataclass
class TraceNormFit:
    empirical_L: float
    ratios: list
    per_n: list
    stable: bool
    theoretical_L: float


def tc_bound_fit(b: FourierSymbol, c: FourierSymbol, ns, alpha: float, beta: float,
                 M: int | None = None, inner: int | None = None) -> TraceNormFit:
    """Trace norm of ``Q_n H(b) H(c~) Q_n`` against ``n^{1-alpha-beta} R_{n+1}^+(b) R_{n+1}^-(c)``.

    ``empirical_L`` is the largest ratio over ``ns``; ``stable`` asks that
    consecutive ratios past ``n = 16`` differ by at most a factor 2.  Each
    per-order check compares the trace norm with ``N^3 M(beta, gamma)
    M(alpha, gamma)`` times the tail product, ``gamma = 1/2 - beta``: this
    follows from the Hilbert-Schmidt bounds, Hölder, and summing the
    ``N^3`` entry products of the block product.
    """
    if alpha + beta < 1 - 1e-14:
        raise BoundPreconditionError(f"alpha + beta = {alpha + beta:g} < 1")
    idx = KreinIndex(alpha, beta)
    gamma = 0.5 - beta
    Lth = b.N**3 * constant_M(beta, gamma, "plus") * constant_M(alpha, gamma, "minus")
    thr = max(threshold_n(beta, gamma, "plus"), threshold_n(alpha, gamma, "minus"))
    checks, ratios = [], []
    for n in ns:
        n = int(n)
        K = truncated_hankel_product(b, c, n, M, inner)
        lhs = schatten_norm(K).trace_norm
        base = tail(b, n + 1, "plus", idx) * tail(c, n + 1, "minus", idx)
        base = base * n ** (1 - alpha - beta) if n > 0 else math.inf
        ratio = lhs / base if base > 0 and math.isfinite(base) else None
        ratios.append(ratio)
        rhs = Lth * base if math.isfinite(base) else math.inf
        chk = BoundCheck("trace_norm_truncation", lhs, rhs,
                         {"n": n, "alpha": alpha, "beta": beta, "rhs_without_L": base, "ratio": ratio,
                          "certified": K.certified, "tail_bound": K.tail_bound})
        if n < thr:
            chk.verdict = "below threshold"
        checks.append(chk)
    used = [(n, r) for n, r in zip(ns, ratios) if r is not None]
    emp = max((r for _, r in used), default=0.0)
    late = [r for n, r in used if n >= 16]
    stable = all(max(x, y) <= 2 * min(x, y) for x, y in zip(late, late[1:]))
    return TraceNormFit(emp, ratios, checks, bool(stable and math.isfinite(emp)), Lth)
