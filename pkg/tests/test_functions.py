import numpy as np
import pytest

from kreintoeplitz.functions import AnalyticFunction, Contour


def test_polynomial_evaluation_and_derivative():
    f = AnalyticFunction.polynomial([1, 0, 3])
    assert f(2.0) == pytest.approx(13)
    assert f.derivative()(2.0) == pytest.approx(12)
    assert f.kind == "polynomial" and f.degree == 2


def test_rational_derivative():
    f = AnalyticFunction.rational(poly=[1], poles=[(2.0, (1.0, 3.0))])
    z = 0.5 + 0.25j
    h = 1e-6
    fd = (f(z + h) - f(z - h)) / (2 * h)
    assert f.derivative()(z) == pytest.approx(fd, rel=1e-7)


def test_matrix_application_matches_eigen_decomposition(rng):
    a = rng.standard_normal((4, 4))
    a = a + a.T
    f = AnalyticFunction.rational(poly=[0, 1, 1], poles=[(20.0, (2.0,))])
    w, v = np.linalg.eigh(a)
    want = (v * f(w)) @ v.T
    assert np.allclose(f.of_matrices(a[None])[0], want)
    assert f.trace_of(a[None])[0] == pytest.approx(np.sum(f(w)))


@pytest.mark.parametrize("contour, tol", [(Contour.circle(1 + 1j, 2.0, 64), 1e-12),
                                          (Contour.ellipse(0, 3.0, 1.0, 128), 1e-10),
                                          # corners make the polygon rule second order only
                                          (Contour.polyline([-1 - 1j, 2 - 1j, 2 + 1j, -1 + 1j], 256), 1e-4)],
                         ids=["circle", "ellipse", "polyline"])
def test_cauchy_integrals(contour, tol):
    # (1/2 pi i) oint dz / (z - z0) = 1 for an enclosed z0
    assert contour.integral(1 / (contour.nodes - 0.5)) == pytest.approx(1, abs=tol)
    assert abs(contour.integral(contour.nodes**2)) < 1e-10
    assert contour.encloses(0.5)[0] == 1 and contour.encloses(10.0)[0] == 0


def test_node_count_must_be_power_of_two():
    with pytest.raises(ValueError):
        Contour.circle(0, 1, 100)
    assert len(Contour.circle(0, 1, 64).refined()) == 128
