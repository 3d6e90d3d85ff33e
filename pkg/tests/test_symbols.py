import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kreintoeplitz.catalog import chi, s1, s2, s3, s4, s5
from kreintoeplitz.errors import AliasingError, SingularSymbolError
from kreintoeplitz.symbols import (
    FourierSymbol,
    KreinIndex,
    default_grid,
    fourier_from_samples,
    grid_angles,
    invert,
    krein_norm,
    membership_check,
    multiply,
    reflect,
    samples,
    tail,
    winding_number,
)

IDX = KreinIndex(0.75, 0.75)


def test_band_is_trimmed_to_nonzero_support():
    sym = FourierSymbol(np.array([0, 0, 1.0, 2.0, 0]))
    assert sym.band == 1
    assert sym[1][0, 0] == 2.0
    assert sym[7][0, 0] == 0


def test_hermitian_tag_is_checked():
    with pytest.raises(ValueError):
        FourierSymbol(np.array([1.0, 3.0, 2.0]), hermitian=True)


def test_krein_index_rejects_endpoints():
    with pytest.raises(ValueError):
        KreinIndex(1.0, 0.5)
    assert KreinIndex(0.3, 0.9).alpha == 0.3


def test_dft_of_cosine_symbol():
    th = grid_angles(8)
    got = fourier_from_samples(3 + 2 * np.cos(th), 2)
    assert np.allclose(got.coeffs_padded(2)[:, 0, 0], [0, 1, 3, 1, 0], atol=1e-15)


def test_dft_of_constant():
    assert fourier_from_samples(np.full(4, 2.0), 0)[0][0, 0] == pytest.approx(2)


def test_dft_of_power_law_coefficients():
    th = grid_angles(512)
    k = np.arange(1, 65)
    vals = np.exp(1j * np.outer(th, k)) @ (k + 1.0) ** -1.3
    got = fourier_from_samples(vals, 64)
    assert abs(got[5][0, 0] - 0.0973651) < 1e-6
    assert abs(got[5][0, 0] - 6**-1.3) < 1e-14


def test_dft_rejects_aliasing_grid():
    with pytest.raises(AliasingError, match="alias"):
        fourier_from_samples(np.ones(8), 4)


@given(st.integers(0, 20), st.integers(0, 10_000))
def test_samples_then_dft_is_identity(K, seed):
    r = np.random.default_rng(seed)
    c = r.standard_normal(2 * K + 1) + 1j * r.standard_normal(2 * K + 1)
    sym = FourierSymbol(c)
    back = fourier_from_samples(samples(sym, default_grid(K, minimum=64)), K)
    assert np.max(np.abs(back.coeffs_padded(K) - sym.coeffs_padded(K))) < 1e-12


def test_krein_norm_single_coefficient():
    assert krein_norm(chi(1), KreinIndex(0.3, 0.5)) == pytest.approx(1 + math.sqrt(2), abs=1e-12)


def test_krein_norm_constant_counts_zero_coefficient_twice():
    assert krein_norm(s2(2.0), IDX) == pytest.approx(6.0)


def test_krein_norm_of_s4_grows_slowly_with_band():
    # the series with weight 0.75 against decay 1.3 converges like K^-0.1, so doubling K
    # still adds about 2 percent; the value stays finite and increases
    n1 = krein_norm(s4(K=4096), IDX)
    n2 = krein_norm(s4(K=8192), IDX)
    assert math.isfinite(n1) and n1 < n2 < 1.05 * n1


def test_krein_norm_dominates_sup_norm():
    for sym in (s1(), s3(), s4(K=64)):
        rep = membership_check(sym, IDX)
        assert rep.krein_norm >= rep.sup_norm


def test_tail_examples():
    assert tail(chi(1), 0, "plus", KreinIndex(0.5, 0.3)) == pytest.approx(2**0.3)
    assert tail(chi(1), 1, "plus", IDX) == 0
    c = FourierSymbol.from_dict({-5: 0.2})
    assert tail(c, 1, "minus", IDX) == pytest.approx(0.2 * 6**0.75)
    assert tail(c, 1, "minus", IDX) == pytest.approx(0.76673, abs=1e-5)
    assert tail(s1(), 3, "minus", IDX) == 0


def test_tail_is_nonincreasing_and_vanishes_at_band():
    sym = s4(K=128)
    vals = [tail(sym, n, "minus", IDX) for n in range(0, 130, 3)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert tail(sym, 128, "plus", IDX) == 0


def test_matrix_tail_uses_spectral_norm():
    sym = FourierSymbol.from_dict({2: np.array([[3.0, 0], [4.0, 0]])})
    assert tail(sym, 0, "plus", IDX) == pytest.approx(5 * 3**0.75)


def test_multiply_examples():
    one = multiply(chi(1), chi(-1), 2)
    assert one.band == 0 and one[0][0, 0] == 1
    prod = multiply(FourierSymbol.from_dict({0: 1, 1: -0.5}), FourierSymbol.from_dict({0: 1, -1: -0.5}), 2)
    assert np.allclose(prod.coeffs_padded(2)[:, 0, 0], [0, -0.5, 1.25, -0.5, 0])


def test_multiply_flags_truncation():
    assert multiply(s3(), s3(), 1).truncated
    assert not multiply(s3(), s3(), 2).truncated


def test_invert_examples():
    assert invert(s2(2.0), 4)[0][0, 0] == pytest.approx(0.5)
    assert invert(s1(), 256)[0][0, 0] == pytest.approx(4 / 3, abs=1e-14)
    d = invert(FourierSymbol.diag(s2(2.0), s2(4.0)), 2)
    assert np.allclose(d[0], np.diag([0.5, 0.25]))


def test_invert_reports_singular_angle():
    with pytest.raises(SingularSymbolError) as info:
        invert(FourierSymbol.from_dict({0: 1, 1: -1}), 8)
    assert info.value.theta == pytest.approx(0.0)


@pytest.mark.parametrize("sym", [s1(), s2(3.0), s3(), s1(0.3, 0.7), s4(K=32), s5("diag_s1_s3"), s5("triangular_s1"),
                                 s5("upper_minus")], ids=lambda s: s.label)
def test_inverse_times_symbol_is_identity(sym):
    prod = multiply(invert(sym, 256), sym)
    err = prod.coeffs_padded(prod.band).copy()
    err[prod.band] -= np.eye(sym.N)
    assert np.max(np.abs(err)) < 1e-10


def test_s1_times_its_inverse():
    prod = multiply(s1(), invert(s1(), 256), 256)
    err = prod.coeffs_padded(256)[:, 0, 0] - np.eye(1, 513, 256).ravel()
    assert np.max(np.abs(err)) < 1e-12


def test_reflect_examples():
    assert reflect(chi(1))[-1][0, 0] == 1
    assert np.allclose(reflect(s1(0.3, 0.7)).coeffs, s1(0.7, 0.3).coeffs)
    sym = s4(K=64)
    assert np.array_equal(reflect(reflect(sym)).coeffs, sym.coeffs)


def test_catalog_entries():
    assert np.allclose(s1().coeffs[:, 0, 0], [-0.5, 1.25, -0.5])
    assert np.allclose(s3().coeffs[:, 0, 0], [1, 3, 1])
    a = s4(K=4096)
    assert np.min(np.abs(samples(a, 16384))) > 0.5


def test_s4_membership_threshold():
    a = s4(1.3, 1.3, 4096)
    assert membership_check(a, KreinIndex(0.75, 0.75)).member
    rep = membership_check(a, KreinIndex(0.85, 0.75))
    assert not rep.member and rep.krein_norm == math.inf
    assert rep.plus_exponent == pytest.approx(-1.3, abs=0.05)


def test_winding_numbers():
    rep = membership_check(chi(1), IDX)
    assert rep.winding_number == 1 and rep.invertible_on_grid
    assert winding_number(s1()) == 0
    assert winding_number(chi(-2)) == -2
    assert membership_check(s1(), IDX).minus_exponent is None


def test_symbol_arithmetic():
    a = s1() + 1
    assert a[0][0, 0] == pytest.approx(2.25)
    m = FourierSymbol.diag(s1(), s3()) - np.array([[1.0, 2.0], [0, 1.0]])
    assert np.allclose(m[0], [[0.25, -2], [0, 2]])
    assert np.allclose(s1().scale(2)[1], -1.0)
    assert np.allclose((-s3())[0], -3)


@given(st.floats(0.55, 0.95), st.floats(0.55, 0.95))
def test_krein_norm_is_submultiplicative_on_catalog(alpha, beta):
    # C frozen from a 5x5 sweep of alpha, beta over these products (worst ratio 0.430)
    C = 1.0
    idx = KreinIndex(alpha, beta)
    syms = [s1(), s3(), s1(0.3, 0.7), s4(K=64)]
    for a in syms:
        for b in syms:
            assert krein_norm(multiply(a, b), idx) <= C * krein_norm(a, idx) * krein_norm(b, idx)
