"""Deterministic test symbols.

======  ===============================================  ==========================
name    symbol                                           K^{alpha,beta} membership
======  ===============================================  ==========================
S1      (1 - r t)(1 - s/t)                               every alpha, beta
S2      constant c (optionally N x N identity multiple)  every alpha, beta
S3      3 + t + 1/t                                      every alpha, beta
S4      c0 + sum_{k=1}^K (k+1)^-p t^k + (k+1)^-q t^-k     requires alpha < q - 1/2,
                                                         beta < p - 1/2
S5      N = 2 block combinations of the above            as the blocks
chi     t^k                                              every; winding k
======  ===============================================  ==========================
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .symbols import FourierSymbol, samples


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    params: dict
    description: str
    membership: str
    build: Callable[..., FourierSymbol]


def s1(r: float = 0.5, s: float = 0.5) -> FourierSymbol:
    # (1 - r t)(1 - s t^{-1}) = -s t^{-1} + (1 + r s) - r t
    real = np.isrealobj(r) and np.isrealobj(s) and r == s
    return FourierSymbol(np.array([-s, 1 + r * s, -r], dtype=complex), label=f"S1(r={r},s={s})", hermitian=real)


def s2(c: complex = 2.0, N: int = 1) -> FourierSymbol:
    return FourierSymbol.constant(c, N, label=f"S2(c={c})", hermitian=complex(c).imag == 0)


def s3() -> FourierSymbol:
    return FourierSymbol(np.array([1.0, 3.0, 1.0]), label="S3", hermitian=True)


def s4(p: float = 1.3, q: float = 1.3, K: int = 4096, c0: float | None = None) -> FourierSymbol:
    """Power-decay symbol with ``a_k = (k+1)^-p`` and ``a_-k = (k+1)^-q`` for ``1 <= k <= K``.

    When ``c0`` is omitted it is set to ``max |a - a_0| + 1`` over a grid that
    resolves the band, so ``min |a| >= 1`` there and the winding number is 0.
    """
    ks = np.arange(1, K + 1, dtype=float)
    c = np.zeros(2 * K + 1, dtype=complex)
    c[K + 1:] = (ks + 1) ** -p
    c[:K][::-1] = (ks + 1) ** -q
    if c0 is None:
        g = FourierSymbol(c)
        grid = max(4096, 1 << math.ceil(math.log2(8 * K + 8)))
        c0 = float(np.max(np.abs(samples(g, grid)))) + 1.0
    c[K] = c0
    return FourierSymbol(c, label=f"S4(p={p},q={q},K={K})", hermitian=(p == q))


def chi(k: int = 1) -> FourierSymbol:
    return FourierSymbol.from_dict({k: 1.0}, label=f"chi{k}")


def s5(kind: str = "diag_s1_s1", r: float = 0.5, s: float = 0.5) -> FourierSymbol:
    """2 x 2 block symbols.

    kinds: ``diag_s1_s1``, ``diag_s1_1``, ``diag_const`` (diag(2, 3)),
    ``diag_s1_s3``, ``upper_minus`` ([[1, 1/t], [0, 1]]),
    ``lower_plus`` ([[1, 0], [t, 1]]), ``triangular_s1`` ([[S1, 1/t], [0, S3]]).
    """
    one = FourierSymbol.constant(1.0)
    zero = FourierSymbol.constant(0.0)
    if kind == "diag_s1_s1":
        out = FourierSymbol.diag(s1(r, s), s1(r, s))
    elif kind == "diag_s1_1":
        out = FourierSymbol.diag(s1(r, s), one)
    elif kind == "diag_const":
        out = FourierSymbol.diag(FourierSymbol.constant(2.0), FourierSymbol.constant(3.0))
    elif kind == "diag_s1_s3":
        out = FourierSymbol.diag(s1(r, s), s3())
    elif kind == "upper_minus":
        out = FourierSymbol.from_blocks([[one, chi(-1)], [zero, one]])
    elif kind == "lower_plus":
        out = FourierSymbol.from_blocks([[one, zero], [chi(1), one]])
    elif kind == "triangular_s1":
        out = FourierSymbol.from_blocks([[s1(r, s), chi(-1)], [zero, s3()]])
    else:
        raise KeyError(f"unknown S5 kind {kind!r}")
    return FourierSymbol(out.coeffs, label=f"S5({kind})", hermitian=out.hermitian)


CATALOG: dict[str, CatalogEntry] = {
    e.name: e
    for e in [
        CatalogEntry("S1", {"r": 0.5, "s": 0.5}, "(1 - r t)(1 - s/t), scalar rational", "in every K^{alpha,beta}", s1),
        CatalogEntry("S2", {"c": 2.0, "N": 1}, "constant c times the N x N identity", "in every K^{alpha,beta}", s2),
        CatalogEntry("S3", {}, "3 + t + 1/t", "in every K^{alpha,beta}", s3),
        CatalogEntry("S4", {"p": 1.3, "q": 1.3, "K": 4096, "c0": None},
                     "c0 + sum_{k=1}^K (k+1)^-p t^k + (k+1)^-q t^-k, c0 = max|a - c0| + 1 by default",
                     "series limit requires alpha < q - 1/2 and beta < p - 1/2", s4),
        CatalogEntry("S5", {"kind": "diag_s1_s1", "r": 0.5, "s": 0.5},
                     "N = 2 blocks: diag_s1_s1, diag_s1_1, diag_const, diag_s1_s3, upper_minus, lower_plus, triangular_s1",
                     "as the scalar blocks", s5),
        CatalogEntry("chi", {"k": 1}, "t^k (winding number k)", "in every K^{alpha,beta}; no canonical factorization for k != 0", chi),
    ]
}


def catalog(name: str, **params) -> FourierSymbol:
    """Build a catalog symbol by name, e.g. ``catalog("S1", r=0.3, s=0.7)``."""
    try:
        entry = CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown catalog symbol {name!r}; known: {', '.join(CATALOG)}") from None
    unknown = set(params) - set(entry.params)
    if unknown:
        raise TypeError(f"{name} does not take parameters {sorted(unknown)}")
    return entry.build(**params)


def list_catalog() -> str:
    lines = []
    for e in CATALOG.values():
        schema = ", ".join(f"{k}={v}" for k, v in e.params.items()) or "(none)"
        lines.append(f"{e.name}: {e.description}")
        lines.append(f"    params: {schema}")
        lines.append(f"    membership: {e.membership}")
    return "\n".join(lines)
