import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boolcube.errors import DomainError, InvalidDistribution, ThetaOutOfRange
from boolcube.hypercube import BooleanFunction, dictator, parity
from boolcube.information import (
    binary_entropy,
    entropy,
    gap,
    joint_from_theta,
    mutual_information,
    source_mi,
    theta_limits,
    xi,
)
from boolcube.source import Joint2x2

from .strategies import function_pairs

# Reference values computed once with mpmath at 40 digits.
H_THREE_QUARTERS = 0.8112781244591328639
H_DSBS_HALF = 1.8112781244591328639
MI_SOURCE_HALF = 0.18872187554086713609
MI_XOR_HALF = 0.045565997075035035464
GAP_XOR_HALF = 0.14315587846583210063


def mp_xi(theta, a, b):
    """Independent high-precision evaluation of the 2x2 mutual information."""
    mpmath.mp.dps = 40
    theta, a, b = (mpmath.mpf(v) for v in (theta, a, b))
    cells = [a * b + theta, a * (1 - b) - theta, (1 - a) * b - theta, (1 - a) * (1 - b) + theta]
    margins = [a * b, a * (1 - b), (1 - a) * b, (1 - a) * (1 - b)]
    total = mpmath.mpf(0)
    for p, q in zip(cells, margins):
        if p > 0:
            total += p * mpmath.log(p / q, 2)
    return float(total)


def test_binary_entropy_values():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.75) == pytest.approx(H_THREE_QUARTERS, abs=1e-15)
    with pytest.raises(DomainError):
        binary_entropy(1.2)


def test_entropy_examples():
    assert entropy([0.25] * 4) == 2.0
    assert entropy([1, 0, 0, 0]) == 0.0
    assert entropy([0.375, 0.125, 0.125, 0.375]) == pytest.approx(H_DSBS_HALF, abs=1e-12)
    with pytest.raises(InvalidDistribution):
        entropy([0.5, 0.6])
    with pytest.raises(InvalidDistribution):
        entropy([1.2, -0.2])


def test_xi_dictator_pair():
    assert xi(0.125, 0.5, 0.5) == pytest.approx(MI_SOURCE_HALF, abs=1e-12)
    with pytest.raises(ThetaOutOfRange):
        xi(0.3, 0.5, 0.5)


@settings(max_examples=200)
@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.floats(0, 1))
def test_xi_matches_high_precision(a, b, t):
    lo, hi = theta_limits(a, b)
    theta = lo + t * (hi - lo)
    assert xi(theta, a, b) == pytest.approx(mp_xi(theta, a, b), abs=1e-12)


@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_xi_zero_at_independence(a, b):
    assert xi(0.0, a, b) == pytest.approx(0.0, abs=1e-15)


def test_mutual_information_examples():
    assert mutual_information(Joint2x2(0.28, 0.42, 0.12, 0.18)) == pytest.approx(0.0, abs=1e-15)
    assert mutual_information(Joint2x2(0.375, 0.125, 0.125, 0.375)) == pytest.approx(MI_SOURCE_HALF, abs=1e-12)
    assert mutual_information(Joint2x2(0.5, 0.0, 0.0, 0.5)) == 1.0


def test_source_mi_examples():
    assert source_mi(0.0) == 0.0
    assert source_mi(1.0) == 1.0
    assert source_mi(-1.0) == 1.0
    assert source_mi(0.5) == pytest.approx(MI_SOURCE_HALF, abs=1e-15)
    with pytest.raises(DomainError):
        source_mi(1.5)


@given(st.floats(-1, 1))
def test_source_mi_even(rho):
    assert source_mi(rho) == pytest.approx(source_mi(-rho), abs=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_gap_zero_for_dictators(n):
    for i in range(1, n + 1):
        f = dictator(n, i)
        for rho in np.arange(1, 10) / 10:
            assert abs(gap(f, f, rho)) <= 1e-12


def test_gap_xor():
    xor = parity(2, 0b11)
    assert gap(xor, xor, 0.5) == pytest.approx(GAP_XOR_HALF, abs=1e-12)
    assert source_mi(0.5) - gap(xor, xor, 0.5) == pytest.approx(MI_XOR_HALF, abs=1e-12)


@given(function_pairs(1, 4))
def test_gap_zero_at_rho_zero(pair):
    f, g = pair
    assert gap(f, g, 0.0) == pytest.approx(0.0, abs=1e-15)


@settings(max_examples=200)
@given(function_pairs(1, 4), st.floats(-1, 1))
def test_gap_nonnegative(pair, rho):
    f, g = pair
    assert gap(f, g, rho) >= -1e-9


def test_joint_from_theta_range():
    j = joint_from_theta(0.0625, 0.5, 0.5)
    assert j.as_array().tolist() == pytest.approx([0.3125, 0.1875, 0.1875, 0.3125])
    with pytest.raises(ThetaOutOfRange):
        joint_from_theta(0.5, 0.5, 0.5)
