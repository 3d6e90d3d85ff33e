import numpy as np
import pytest

from kreintoeplitz.catalog import chi, s1, s2, s3, s4, s5
from kreintoeplitz.errors import ConvergenceError, WindingError
from kreintoeplitz.symbols import FourierSymbol
from kreintoeplitz.szego import G_of
from kreintoeplitz.wiener_hopf import (
    bo_pair,
    canonical_factorization,
    matrix_canonical,
    matrix_canonical_left,
    matrix_canonical_right,
    residual,
    scalar_canonical,
)


def coeff_diff(a, b, K=None):
    K = K if K is not None else max(a.band, b.band)
    return float(np.max(np.abs(a.coeffs_padded(K) - b.coeffs_padded(K))))


def test_s1_factors_are_read_off():
    r, s = 0.3, 0.7
    f = scalar_canonical(s1(r, s))
    assert coeff_diff(f.u_minus, FourierSymbol.from_dict({0: 1, -1: -s})) < 1e-10
    assert coeff_diff(f.u_plus, FourierSymbol.from_dict({0: 1, 1: -r})) < 1e-10
    assert coeff_diff(f.v_plus, FourierSymbol.from_dict({0: 1, 1: -r})) < 1e-10
    assert coeff_diff(f.v_minus, FourierSymbol.from_dict({0: 1, -1: -s})) < 1e-10
    assert f.max_residual < 1e-9


def test_constant_symbol_convention():
    f = scalar_canonical(s2(4.0))
    assert f.u_minus[0][0, 0] == pytest.approx(4) and f.v_plus[0][0, 0] == pytest.approx(4)
    assert f.u_plus[0][0, 0] == pytest.approx(1) and f.v_minus[0][0, 0] == pytest.approx(1)
    b, c = bo_pair(f)
    assert b.band == 0 and c.band == 0
    assert b[0][0, 0] == pytest.approx(1) and c[0][0, 0] == pytest.approx(1)
    assert residual(f) == (0.0, 0.0)


def test_nonzero_winding_is_rejected():
    with pytest.raises(WindingError, match="winding 1"):
        scalar_canonical(chi(1))


def test_forced_factorization_of_winding_symbol_is_flagged():
    f = scalar_canonical(chi(1), force=True)
    assert f.flagged and f.max_residual > 1e-2


def test_upper_minus_block_is_its_own_minus_factor():
    a = s5("upper_minus")
    um, up, _ = matrix_canonical_right(a)
    assert coeff_diff(um, a) < 1e-10
    assert coeff_diff(up, FourierSymbol.constant(np.eye(2))) < 1e-10


def test_lower_plus_block_is_its_own_plus_factor():
    a = s5("lower_plus")
    vp, vm, _ = matrix_canonical_left(a)
    assert coeff_diff(vp, a) < 1e-10
    assert coeff_diff(vm, FourierSymbol.constant(np.eye(2))) < 1e-10


@pytest.mark.parametrize("kind", ["diag_s1_1", "diag_s1_s1", "diag_s1_s3"])
def test_block_diagonal_reduces_to_scalar(kind):
    a = s5(kind)
    f = matrix_canonical(a)
    for i in range(2):
        sc = scalar_canonical(a.entry(i, i))
        for name in ("u_minus", "u_plus", "v_plus", "v_minus"):
            assert coeff_diff(getattr(f, name).entry(i, i), getattr(sc, name), 16) < 1e-8
        assert coeff_diff(f.u_plus.entry(0, 1), FourierSymbol.constant(0.0), 16) < 1e-12
    assert f.max_residual < 1e-8


@pytest.mark.parametrize("sym", [s1(), s1(0.3, 0.7), s3(), s4(K=16)], ids=lambda s: s.label)
def test_scalar_and_matrix_routes_agree(sym):
    sc = scalar_canonical(sym)
    mc = matrix_canonical(sym)
    for name in ("u_minus", "u_plus", "v_plus", "v_minus"):
        assert coeff_diff(getattr(sc, name), getattr(mc, name), 32) < 1e-8


@pytest.mark.parametrize("sym", [s1(), s3(), s4(K=64), s5("triangular_s1"), s5("diag_s1_s3")], ids=lambda s: s.label)
def test_factor_supports_and_residuals(sym):
    f = canonical_factorization(sym)
    assert max(f.leakage.values()) < 1e-10
    assert f.max_residual < 1e-9
    assert f.identity_residual < 1e-10


def test_zeroth_coefficient_of_u_minus_is_geometric_mean():
    for sym in (s1(), s3(), s1(0.2, 0.9), s4(K=64)):
        f = scalar_canonical(sym)
        assert abs(f.u_minus[0][0, 0] - G_of(sym)) < 1e-8


def test_s1_pair_coefficients():
    r = s = 0.5
    b, c = bo_pair(scalar_canonical(s1(r, s)))
    for k in range(1, 8):
        assert b[k][0, 0] == pytest.approx(r**k * (1 - r * s), abs=1e-14)
        assert c[-k][0, 0] == pytest.approx(s**k * (1 - r * s), abs=1e-14)
    assert b[1][0, 0] == pytest.approx(0.375)


def test_diagonal_pair_is_diagonal():
    f = canonical_factorization(s5("diag_s1_s1"))
    assert np.max(np.abs(f.b.coeffs[:, 0, 1])) < 1e-12
    assert f.b[1][0, 0] == pytest.approx(0.375, abs=1e-12)
    assert f.c[-1][1, 1] == pytest.approx(0.375, abs=1e-12)


def test_perturbation_moves_factors_by_order_delta():
    delta = 1e-4
    a = s1()
    f0 = scalar_canonical(a)
    f1 = scalar_canonical(a + FourierSymbol.from_dict({2: delta}))
    for name in ("u_minus", "u_plus"):
        assert coeff_diff(getattr(f0, name), getattr(f1, name)) <= 100 * delta


def test_matrix_route_reports_non_stabilizing_coefficients():
    # a slowly decaying symbol cannot stabilize within a tiny section budget
    with pytest.raises(ConvergenceError) as info:
        matrix_canonical_right(s4(1.05, 1.05, 64), max_side=600, tol=1e-14)
    assert info.value.previous is not None


def test_bo_pair_refuses_bad_factorization():
    with pytest.raises(ConvergenceError):
        bo_pair(scalar_canonical(chi(1), force=True))
