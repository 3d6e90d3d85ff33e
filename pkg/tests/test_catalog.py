import numpy as np
import pytest

from kreintoeplitz.catalog import CATALOG, catalog, list_catalog, s4
from kreintoeplitz.symbols import samples, winding_number


def test_listing_names_and_membership():
    text = list_catalog()
    assert "S1" in text
    s4_block = text[text.index("S4:"):text.index("S5:")]
    assert "requires alpha < q - 1/2" in s4_block


def test_listing_order_is_stable():
    assert list_catalog() == list_catalog()
    names = [ln.split(":")[0] for ln in list_catalog().splitlines() if not ln.startswith(" ")]
    assert names == list(CATALOG)


def test_unknown_name_and_parameter():
    with pytest.raises(KeyError, match="unknown catalog symbol"):
        catalog("S9")
    with pytest.raises(TypeError):
        catalog("S3", r=1)


def test_s4_c0_keeps_symbol_away_from_zero():
    a = s4(K=256)
    vals = samples(a, 8192)
    assert np.min(np.abs(vals)) >= 1 - 1e-12
    assert winding_number(a) == 0


def test_s4_coefficients():
    a = s4(1.3, 1.5, K=8)
    assert a[3][0, 0] == pytest.approx(4 ** -1.3)
    assert a[-3][0, 0] == pytest.approx(4 ** -1.5)
    assert not a.hermitian and s4(K=8).hermitian
