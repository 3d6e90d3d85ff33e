import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kreintoeplitz.bounds import (
    BoundCheck,
    WeightedSpaceParams,
    check_holder,
    check_logdet_bound,
    constant_M,
    hs_bound_check,
    hs_bound_check_plus,
    maximizer_check,
    partial_sum_check,
    random_holder_audit,
    random_logdet_audit,
    tc_bound_fit,
    threshold_n,
    weighted_hs_direct,
    weighted_hs_series,
)
from kreintoeplitz.catalog import s1, s2, s4
from kreintoeplitz.errors import BoundPreconditionError
from kreintoeplitz.symbols import FourierSymbol
from kreintoeplitz.wiener_hopf import canonical_factorization


def test_weighted_space_params():
    assert WeightedSpaceParams.for_trace_norm(0.75).gamma == pytest.approx(-0.25)
    with pytest.raises(ValueError):
        WeightedSpaceParams(0.5)


def test_constant_M_examples():
    assert constant_M(0.5, 0.0) == pytest.approx(1)
    assert constant_M(0.75, 0.0) == pytest.approx(2**0.5 * 3**-0.75)
    assert constant_M(0.75, 0.0) == pytest.approx(0.620403, abs=1e-6)
    assert constant_M(0.75, 0.25) == pytest.approx(1.5**-0.5)
    assert constant_M(0.75, -0.25, "plus") == pytest.approx(constant_M(0.75, 0.25, "minus"))


def test_constant_M_rejects_bad_region():
    with pytest.raises(BoundPreconditionError):
        constant_M(0.4, 0.0)
    with pytest.raises(BoundPreconditionError):
        constant_M(0.6, -0.25, "plus")


def test_threshold():
    assert threshold_n(0.75, 0.0) == 1  # A = 2
    assert threshold_n(1.5, 0.0) == 4  # A = 1/2
    assert threshold_n(0.75, 0.25) == 1


def test_single_coefficient_minus_and_plus():
    c = FourierSymbol.from_dict({-5: 1.0})
    chk = hs_bound_check(c, 1, 0.75, 0.0)
    assert chk.lhs == pytest.approx(math.sqrt(3))
    assert chk.rhs == pytest.approx(2.378414230005442, rel=1e-12)
    assert chk.passed
    plus = hs_bound_check_plus(FourierSymbol.from_dict({5: 1.0}), 1, 0.75, 0.0)
    assert plus.lhs == pytest.approx(chk.lhs) and plus.rhs == pytest.approx(chk.rhs)


def test_empty_sides():
    a = FourierSymbol.from_dict({0: 2.0, 3: 1.0})
    chk = hs_bound_check(a, 1, 0.75, 0.0)
    assert chk.lhs == 0 and chk.rhs == 0 and chk.passed
    chk = hs_bound_check_plus(FourierSymbol.from_dict({-3: 1.0}), 1, 0.75, 0.0)
    assert chk.lhs == 0 and chk.rhs == 0 and chk.passed


@pytest.mark.parametrize("n", [8, 16, 32])
def test_s4_sides(n):
    a = s4(1.3, 1.3, 4096)
    assert hs_bound_check(a, n, 0.75, 0.0).passed
    assert hs_bound_check_plus(a, n, 0.75, 0.0).passed


@pytest.mark.parametrize("side", ["minus", "plus"])
@pytest.mark.parametrize("gamma", [-0.3, 0.0, 0.2])
def test_series_and_direct_norms_agree(side, gamma):
    rng = np.random.default_rng(3)
    a = FourierSymbol(rng.standard_normal((41, 2, 2)) + 1j * rng.standard_normal((41, 2, 2)))
    for n in (1, 5, 12):
        x, y = weighted_hs_series(a, n, gamma, side), weighted_hs_direct(a, n, gamma, side)
        assert abs(x - y) < 1e-10 * max(1.0, y)


def test_logdet_examples():
    chk = check_logdet_bound(np.diag([0.5, 0.0]))
    assert chk.lhs == pytest.approx(math.log(2)) and chk.rhs == pytest.approx(1) and chk.passed
    chk = check_logdet_bound(np.zeros((3, 3)))
    assert chk.lhs == 0 and chk.rhs == 0 and chk.passed
    with pytest.raises(BoundPreconditionError):
        check_logdet_bound(np.eye(2) * 0.5)


def test_holder_examples():
    chk = check_holder(np.eye(2), np.eye(2))
    assert chk.lhs == pytest.approx(2) and chk.rhs == pytest.approx(2) and chk.passed
    e00 = np.zeros((2, 2))
    e00[0, 0] = 1
    e01 = np.zeros((2, 2))
    e01[0, 1] = 1
    chk = check_holder(e00, e01)
    assert chk.lhs == pytest.approx(1) and chk.rhs == pytest.approx(1)
    with pytest.raises(ValueError):
        check_holder(np.eye(2), np.eye(3))


def test_random_audits_pass_and_repeat():
    a = random_logdet_audit()
    assert len(a) == 100 and all(c.passed for c in a)
    assert [c.lhs for c in a] == [c.lhs for c in random_logdet_audit()]
    h = random_holder_audit()
    assert len(h) == 100 and all(c.passed for c in h)


@given(st.integers(1, 8), st.integers(1, 8), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_holder_property(m, k, p, seed):
    rng = np.random.default_rng(seed)
    assert check_holder(rng.standard_normal((m, k)), rng.standard_normal((k, p))).passed


@given(st.integers(1, 8), st.floats(0.0, 0.99), st.integers(0, 2**32 - 1))
def test_logdet_property(size, tn, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    a *= tn / np.linalg.svd(a, compute_uv=False).sum()
    assert check_logdet_bound(a).passed


@pytest.mark.parametrize("gamma", [-0.4, -0.2, 0.0, 0.2, 0.4])
def test_partial_sum_inequality(gamma):
    chk = partial_sum_check(gamma)
    assert chk.passed and chk.context["max_m"] == 10_000


@pytest.mark.parametrize("n", [8, 64, 512])
def test_maximizer(n):
    assert maximizer_check(n, 0.75, 0.0).passed


def test_boundcheck_pass_is_recomputable():
    c = BoundCheck("x", 1.0, 1.0 - 5e-13)
    assert c.passed and c.verdict == "pass"
    c = BoundCheck("x", 1.0, 0.9)
    assert not c.passed and c.verdict == "fail" and c.slack == pytest.approx(-0.1)


def test_trace_norm_fit_s1_rank_one():
    r = s = 0.5
    f = canonical_factorization(s1(r, s))
    fit = tc_bound_fit(f.b, f.c, [0, 1, 2, 4], 0.75, 0.75)
    expected = [(1 - r * s) * (r * s) ** (n + 2) / math.sqrt((1 - r**2) * (1 - s**2)) for n in (0, 1, 2, 4)]
    lhs = [c.lhs for c in fit.per_n]
    assert lhs[0] == pytest.approx(0.0625, abs=1e-12)
    assert np.allclose(lhs, expected, rtol=1e-9, atol=1e-16)
    assert all(c.passed for c in fit.per_n[1:])


def test_trace_norm_fit_constant_pair():
    f = canonical_factorization(s2(3.0))
    fit = tc_bound_fit(f.b, f.c, [1, 2, 4], 0.75, 0.75)
    assert all(c.lhs == 0 for c in fit.per_n)
    assert all(r is None for r in fit.ratios)


def test_trace_norm_fit_s4_stable():
    f = canonical_factorization(s4(K=256))
    fit = tc_bound_fit(f.b, f.c, [16, 32, 64], 0.75, 0.75)
    assert fit.stable and math.isfinite(fit.empirical_L)
    assert all(c.passed for c in fit.per_n)
    assert fit.empirical_L <= fit.theoretical_L


def test_trace_norm_fit_requires_excess():
    f = canonical_factorization(s1())
    with pytest.raises(BoundPreconditionError):
        tc_bound_fit(f.b, f.c, [1], 0.4, 0.4)
