import numpy as np
import pytest

from kreintoeplitz.catalog import s1, s2, s3, s4, s5
from kreintoeplitz.errors import ContourError
from kreintoeplitz.functions import AnalyticFunction, Contour
from kreintoeplitz.symbols import FourierSymbol, KreinIndex
from kreintoeplitz.trace_formula import (
    D_factor,
    D_hankel,
    Ef,
    Gf,
    auto_contour,
    contour_validate,
    error_sequence,
    log_D_series,
    rate_fit,
    trace_f_Tn,
)

Z = AnalyticFunction.monomial(1)
Z2 = AnalyticFunction.monomial(2)
IDX = KreinIndex(0.75, 0.75)


def s3_circle(nodes=256):
    return Contour.circle(3, 2.5, nodes)


def ef_z2_oracle(sym):
    # for f = z^2: E_f = -2 sum_m m a(m) a(-m), from trace T_n(a)^2 = sum |j - k| terms
    K = sym.band
    m = np.arange(1, K + 1)
    c = sym.coeffs[:, 0, 0]
    return -2 * np.sum(m * c[K + m] * c[K - m])


def test_Gf_examples():
    assert Gf(s3(), Z) == pytest.approx(3)
    assert Gf(s3(), Z2) == pytest.approx(11)
    assert Gf(s5("diag_const"), Z) == pytest.approx(5)


def test_Gf_rejects_pole_on_range():
    f = AnalyticFunction.rational((), ((3.0, (1.0,)),))
    with pytest.raises(ContourError):
        Gf(s3(), f)


def test_trace_examples():
    assert trace_f_Tn(s3(), Z, 4) == pytest.approx(15)
    assert trace_f_Tn(s3(), Z2, 4) == pytest.approx(53)
    assert trace_f_Tn(s2(2.0), Z2, 3) == pytest.approx(16)


def test_Ef_examples():
    assert abs(Ef(s3(), Z2, s3_circle()) - (-2)) < 1e-10
    assert abs(Ef(s2(2.0), Z, Contour.circle(2, 1))) < 1e-14


@pytest.mark.parametrize("method", ["hankel", "series", "factor"])
def test_Ef_routes_match_band_oracle(method):
    sym = s4(K=16)
    ef = Ef(sym, Z2, auto_contour(sym), method=method)
    assert abs(ef - ef_z2_oracle(sym)) < 1e-8


def test_D_routes_agree_pointwise():
    sym = s1(0.3, 0.6)
    lam = 2.5 + 0.5j
    dh = D_hankel(sym, lam)
    df = D_factor(sym, lam)
    ds = np.exp(log_D_series(sym, lam))
    assert abs(dh - df) < 1e-10 and abs(dh - ds) < 1e-10


def test_contour_independence():
    circ = Ef(s3(), Z2, s3_circle())
    ell = Ef(s3(), Z2, Contour.ellipse(3, 2.6, 1.0))
    assert abs(circ - ell) < 1e-6 * abs(circ)


def test_node_refinement_is_converged():
    a = Ef(s3(), Z2, s3_circle(128))
    b = Ef(s3(), Z2, s3_circle(256))
    assert abs(a - b) < 1e-8


def test_contour_through_spectrum_is_rejected():
    with pytest.raises(ContourError):
        Ef(s3(), Z2, Contour.circle(3, 1.0, 256))


def test_s1_Ef_consistent_with_trace_limit():
    sym = s1()
    ef = Ef(sym, Z2, auto_contour(sym))
    assert abs(ef - ef_z2_oracle(sym)) < 1e-10
    n = 256
    limit = trace_f_Tn(sym, Z2, n) - (n + 1) * Gf(sym, Z2)
    assert abs(ef - limit) < 1e-10


def test_band_exactness():
    rng = np.random.default_rng(7)
    c = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    sym = FourierSymbol(c)
    f = AnalyticFunction.polynomial([0.5, -1.0, 0.25, 1.0])
    ef = Ef(sym, f, auto_contour(sym))
    K, d = sym.band, f.degree
    rows = error_sequence(sym, f, None, range(K * d, K * d + 6), Ef_value=ef)
    assert max(abs(r.eps) for r in rows) < 1e-10


def test_translation_consistency():
    sym, lam0 = s1(0.3, 0.6), 10.0
    for n in (3, 9):
        lhs = trace_f_Tn(sym, Z, n) - (n + 1) * lam0
        assert abs(lhs - trace_f_Tn(sym - lam0, Z, n)) < 1e-12


def test_error_sequence_exact_for_band_symbols():
    rows = error_sequence(s3(), Z2, s3_circle(), range(1, 9))
    assert all(abs(r.eps) < 1e-10 for r in rows)
    rows = error_sequence(s2(2.0), Z2, Contour.circle(2, 1), (1, 5, 9))
    assert all(abs(r.eps) < 1e-12 for r in rows)


def test_error_sequence_node_tails():
    sym = s1()
    rows = error_sequence(sym, Z2, Contour.circle(1.25, 2.5, 16), (2, 4), idx=IDX, node_tails=True)
    assert rows[0].sup_tail_b_plus > rows[1].sup_tail_b_plus > 0
    assert rows[0].sup_tail_c_minus > rows[1].sup_tail_c_minus > 0


def test_rate_fit_exact_power():
    ns = np.array([16, 23, 32, 45, 64, 91, 128])
    fit = rate_fit(ns, ns**-0.5, IDX)
    assert abs(fit.slope + 0.5) < 1e-12 and fit.passed and fit.r_squared == pytest.approx(1)


def test_rate_fit_wobble():
    # the wobble averages out only when the window spans several periods of cos(log n)
    ns = np.geomspace(16, 1e12, 80)
    fit = rate_fit(ns, ns**-0.5 * (2 + np.cos(np.log(ns))), IDX)
    assert -0.6 <= fit.slope <= -0.4
    short = np.array([16, 23, 32, 45, 64, 91, 128, 181, 256])
    assert rate_fit(short, short**-0.5 * (2 + np.cos(np.log(short))), IDX).slope > -0.4


def test_rate_fit_verdicts():
    ns = [16, 32, 64, 128]
    assert rate_fit(ns, np.zeros(4), IDX).verdict == "exact regime"
    assert rate_fit(ns, [1e-3, 1e-3, 1e-20, 1e-20], IDX).verdict == "insufficient data"
    assert rate_fit(ns, np.ones(4), IDX).verdict == "fail"
    boundary = KreinIndex(0.5, 0.5)
    assert rate_fit(ns, [4, 3, 2, 1], boundary).verdict == "o(1)"


def test_rate_fit_window():
    ns = np.array([4, 8, 16, 32, 64, 128])
    err = np.where(ns < 16, 1.0, ns**-1.0)
    fit = rate_fit(ns, err, IDX, window=(16, 128))
    assert abs(fit.slope + 1) < 1e-12


def test_contour_validate_examples():
    rep = contour_validate(s2(2.0), Contour.circle(2, 1), m=64)
    assert rep.min_range_distance == pytest.approx(1) and rep.passed
    rep = contour_validate(s3(), s3_circle(), m=128)
    assert rep.min_range_distance == pytest.approx(0.5, abs=1e-9) and rep.passed
    rep = contour_validate(s3(), Contour.circle(3, 1.5), m=64)
    assert not rep.passed


def test_contour_validate_s1_probe():
    rep = contour_validate(s1(), Contour.circle(1.25, 1.1, 64), m=512)
    # range of S1 is [0.25, 2.25]; a radius 1.1 circle about 1.25 clears it by 0.1
    assert rep.min_range_distance == pytest.approx(0.1, abs=1e-3)
    assert rep.passed


def test_contour_validate_flags_enclosed_pole():
    f = AnalyticFunction.rational((), ((3.0, (1.0,)),))
    assert contour_validate(s3(), s3_circle(), m=32, f=f).poles_inside == [3.0]
