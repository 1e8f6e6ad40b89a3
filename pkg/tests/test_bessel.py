"""Bessel evaluation against an independent ascending-series oracle."""

import numpy as np
import pytest

from combpassage import (ArgumentOutOfRange, OrderOutOfRange,
                         TruncationInsufficient, bessel_j, bessel_j_array,
                         truncation_order)

from _oracles import bessel_series

# frozen from the ascending-series oracle (mpmath, 60 significant digits);
# regenerated by test_frozen_values_match_series_oracle
FROZEN = {
    (0, 4.0): -0.39714980986384737229,
    (1, 4.0): -0.066043328023549136143,
    (5, 4.0): 0.13208665604709827229,
    (0, 1.0): 0.76519768655796655145,
    (2, 0.5): 0.030604023458682641307,
    (3, 2.5): 0.21660039103911352477,
    (10, 30.0): -0.12987689399858876819,
    (0, 64.0): 0.092590012216048114331,
    (25, 64.0): -0.084867138787968267819,
    (60, 64.0): 0.16462763076897638981,
    (7, 0.5): 1.2015867327763022876e-8,
    (12, 12.0): 0.19528018273883224329,
    (512, 64.0): 1.6863983294979917372e-397,
    (100, 1.0): 8.4318287896267085492e-189,
}


def test_frozen_values_match_series_oracle():
    for (n, a), expected in FROZEN.items():
        assert bessel_series(n, a) == pytest.approx(expected, rel=1e-15, abs=1e-300)


def test_values_against_frozen_oracle():
    for (n, a), expected in FROZEN.items():
        assert abs(bessel_j(n, a) - expected) <= 1e-12, (n, a)


def test_j0_at_zero_is_one():
    assert bessel_j(0, 0.0) == 1.0


def test_jn_at_zero_is_zero():
    assert bessel_j(3, 0.0) == 0.0
    assert bessel_j(-7, 0.0) == 0.0


def test_negative_order_symmetry_exact():
    for n in (1, 2, 5, 10, 37):
        for a in (0.3, 4.0, 17.5, 64.0):
            assert bessel_j(-n, a) == (-1.0) ** n * bessel_j(n, a)


def test_scipy_cross_check():
    from scipy.special import jv
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(0, 80))
        a = float(rng.uniform(0.0, 64.0))
        assert abs(bessel_j(n, a) - jv(n, a)) <= 1e-12


def test_array_consistent_with_scalar():
    # scalar calls recurse from an n-dependent start order, so agreement is
    # to accuracy, not bit-for-bit
    arr = bessel_j_array(30, 11.5)
    for n in range(31):
        assert abs(arr[n] - bessel_j(n, 11.5)) < 1e-14


def test_order_out_of_range():
    with pytest.raises(OrderOutOfRange):
        bessel_j(513, 1.0)
    with pytest.raises(OrderOutOfRange):
        bessel_j(-513, 1.0)


def test_argument_out_of_range():
    with pytest.raises(ArgumentOutOfRange):
        bessel_j(0, -0.5)
    with pytest.raises(ArgumentOutOfRange):
        bessel_j(0, 64.001)
    with pytest.raises(ArgumentOutOfRange):
        bessel_j(0, float("nan"))


@pytest.mark.parametrize("a", [0.0, 0.5, 4.0, 12.0, 64.0])
def test_closure_at_truncation(a):
    n_max = truncation_order(a)
    j = bessel_j_array(n_max, a)
    total = j[0] ** 2 + 2.0 * float(np.sum(j[1:] ** 2))
    assert 1.0 - 1e-10 <= total <= 1.0 + 1e-13


def test_truncation_order_bounds_tail():
    for a in (0.5, 4.0, 33.0):
        thr = 1e-12
        n_max = truncation_order(a, thr)
        j = np.abs(bessel_j_array(512, a))
        assert np.all(j[n_max + 1:] < thr)
        if n_max > 0:
            assert j[n_max] >= thr


def test_truncation_threshold_validation():
    with pytest.raises(TruncationInsufficient):
        truncation_order(4.0, threshold=0.0)
    with pytest.raises(TruncationInsufficient):
        truncation_order(4.0, threshold=2.0)
