"""Polynomial/rational functions of matrices and closed quadrature contours."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class AnalyticFunction:
    """``f(z) = sum_k poly[k] z^k + sum_j sum_m residues_j[m-1] / (z - pole_j)^m``.

    ``poles`` is a tuple of ``(pole, (r_1, ..., r_m))`` pairs.
    """

    poly: tuple = ()
    poles: tuple = ()
    description: str = ""

    def __post_init__(self):
        object.__setattr__(self, "poly", tuple(complex(c) for c in self.poly))
        object.__setattr__(self, "poles", tuple((complex(p), tuple(complex(r) for r in rs)) for p, rs in self.poles))

    @classmethod
    def polynomial(cls, coeffs, description: str = "") -> "AnalyticFunction":
        coeffs = tuple(coeffs)
        if not description:
            description = " + ".join(f"{complex(c):g}*z^{k}" for k, c in enumerate(coeffs) if c != 0) or "0"
        return cls(poly=coeffs, description=description)

    @classmethod
    def monomial(cls, k: int) -> "AnalyticFunction":
        return cls(poly=(0,) * k + (1,), description=f"z^{k}")

    @classmethod
    def rational(cls, poly=(), poles=(), description: str = "") -> "AnalyticFunction":
        return cls(poly=tuple(poly), poles=tuple(poles), description=description or "rational")

    @property
    def kind(self) -> str:
        return "rational" if self.poles else "polynomial"

    @property
    def degree(self) -> int:
        nz = [k for k, c in enumerate(self.poly) if c != 0]
        return max(nz) if nz else 0

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for c in reversed(self.poly):
            out = out * z + c
        for p, rs in self.poles:
            w = 1.0 / (z - p)
            wk = np.ones_like(z)
            for r in rs:
                wk = wk * w
                out = out + r * wk
        return out

    def derivative(self) -> "AnalyticFunction":
        dpoly = tuple(k * c for k, c in enumerate(self.poly))[1:]
        dpoles = []
        for p, rs in self.poles:
            # d/dz r (z-p)^{-m} = -m r (z-p)^{-m-1}
            drs = [0j] + [-(m + 1) * r for m, r in enumerate(rs)]
            dpoles.append((p, tuple(drs)))
        return AnalyticFunction(poly=dpoly, poles=tuple(dpoles), description=f"d/dz[{self.description}]")

    def of_matrices(self, mats: np.ndarray) -> np.ndarray:
        """Apply to a stack of square matrices, shape (..., n, n)."""
        mats = np.asarray(mats, dtype=complex)
        n = mats.shape[-1]
        eye = np.broadcast_to(np.eye(n), mats.shape)
        out = np.zeros_like(mats)
        for c in reversed(self.poly):
            out = out @ mats + c * eye
        for p, rs in self.poles:
            inv = np.linalg.inv(mats - p * eye)
            power = eye
            for r in rs:
                power = power @ inv
                out = out + r * power
        return out

    def trace_of(self, mats: np.ndarray) -> np.ndarray:
        return np.trace(self.of_matrices(mats), axis1=-2, axis2=-1)


@dataclass(frozen=True, eq=False)
class Contour:
    """Counterclockwise closed contour sampled for the trapezoid rule.

    ``weights[j]`` is the ``d lambda`` element at ``nodes[j]``, so
    ``sum_j weights[j] g(nodes[j])`` approximates ``oint g(lambda) d lambda``.
    """

    shape: str
    nodes: np.ndarray
    weights: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.nodes)
        if n < 4 or n & (n - 1):
            raise ValueError(f"node count must be a power of two >= 4, got {n}")

    @classmethod
    def circle(cls, center: complex, radius: float, nodes: int = 256) -> "Contour":
        phi = 2 * np.pi * np.arange(nodes) / nodes
        e = np.exp(1j * phi)
        return cls("circle", center + radius * e, 1j * radius * e * (2 * np.pi / nodes),
                   {"center": complex(center), "radius": float(radius)})

    @classmethod
    def ellipse(cls, center: complex, a: float, b: float, nodes: int = 256) -> "Contour":
        """Semi-axes ``a`` (real direction) and ``b`` (imaginary direction)."""
        phi = 2 * np.pi * np.arange(nodes) / nodes
        z = center + a * np.cos(phi) + 1j * b * np.sin(phi)
        dz = -a * np.sin(phi) + 1j * b * np.cos(phi)
        return cls("ellipse", z, dz * (2 * np.pi / nodes), {"center": complex(center), "a": float(a), "b": float(b)})

    @classmethod
    def polyline(cls, vertices, nodes: int = 256) -> "Contour":
        """Closed polygon through ``vertices`` (counterclockwise), nodes spread by arc length."""
        v = np.asarray(vertices, dtype=complex)
        seg = np.roll(v, -1) - v
        lengths = np.abs(seg)
        s = np.linspace(0, lengths.sum(), nodes, endpoint=False)
        cum = np.concatenate([[0.0], np.cumsum(lengths)])
        k = np.searchsorted(cum, s, side="right") - 1
        z = v[k] + seg[k] * ((s - cum[k]) / lengths[k])
        # closed composite trapezoid: w_j = (z_{j+1} - z_{j-1}) / 2
        w = (np.roll(z, -1) - np.roll(z, 1)) / 2
        return cls("polyline", z, w, {"vertices": [complex(x) for x in v]})

    @classmethod
    def from_params(cls, shape: str, nodes: int, **params) -> "Contour":
        if shape == "circle":
            return cls.circle(params["center"], params["radius"], nodes)
        if shape == "ellipse":
            return cls.ellipse(params["center"], params["a"], params["b"], nodes)
        if shape == "polyline":
            return cls.polyline(params["vertices"], nodes)
        raise ValueError(f"unknown contour shape {shape!r}")

    def __len__(self):
        return len(self.nodes)

    def refined(self) -> "Contour":
        return Contour.from_params(self.shape, 2 * len(self), **self.params)

    def integral(self, values) -> complex:
        """``(1 / 2 pi i) oint g``, with ``values[j] = g(nodes[j])``."""
        return complex(np.sum(np.asarray(values) * self.weights) / (2j * np.pi))

    def encloses(self, z) -> np.ndarray:
        """Winding number of the sampled polygon around each point (nonzero means inside)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        d = self.nodes[None, :] - z[:, None]
        inc = np.angle(np.roll(d, -1, axis=1) / d)
        return np.rint(inc.sum(axis=1) / (2 * np.pi)).astype(int)
