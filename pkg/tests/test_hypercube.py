from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boolcube.errors import CoordinateOutOfRange, DimensionMismatch, DomainError, NotBoolean, ParseError
from boolcube.hypercube import (
    BooleanFunction,
    FourierExpansion,
    InputSymmetry,
    all_functions,
    apply_symmetry,
    butterfly,
    dictator,
    format_table,
    input_symmetries,
    inverse_wht,
    noise_operator,
    parity,
    parse_table,
    wht,
)

from .strategies import functions


def direct_coefficients(f):
    """O(4**n) evaluation of sum_x f(x) chi_S(x), one S at a time."""
    size = 1 << f.n
    vals = f.values
    out = []
    for s in range(size):
        chi = np.array([(-1) ** bin(s & m).count("1") for m in range(size)])
        out.append(int(vals @ chi))
    return out


def test_wht_dictator_n1():
    F = wht(BooleanFunction(1, [0, 1]))
    assert F.scaled_coeffs.tolist() == [0, 2]
    assert F.coefficient(0) == 0
    assert F.coefficient(1) == 1


def test_wht_constant():
    F = wht(BooleanFunction(2, [0, 0, 0, 0]))
    assert F.scaled_coeffs.tolist() == [4, 0, 0, 0]
    assert F.coefficient(0) == 1


def test_wht_xor_matches_direct_sum():
    f = BooleanFunction(2, [0, 1, 1, 0])
    assert wht(f).scaled_coeffs.tolist() == [0, 0, 0, 4]
    assert direct_coefficients(f) == [0, 0, 0, 4]


@given(functions(1, 5))
def test_wht_matches_direct_sum(f):
    assert wht(f).scaled_coeffs.tolist() == direct_coefficients(f)


@given(functions(1, 8))
def test_parseval_integer_equality(f):
    assert wht(f).parseval_sum() == 4**f.n


@given(functions(1, 8))
def test_inverse_round_trip(f):
    assert inverse_wht(wht(f)) == f


def test_inverse_of_constant():
    assert inverse_wht(FourierExpansion(2, [4, 0, 0, 0])) == BooleanFunction.constant(2, 1)


def test_inverse_rejects_non_boolean():
    with pytest.raises(NotBoolean):
        inverse_wht(FourierExpansion(2, [2, 0, 0, 0]))


def test_butterfly_is_involution_up_to_scale():
    rng = np.random.default_rng(1)
    x = rng.integers(-5, 5, size=(3, 32)).astype(np.int64)
    y = butterfly(butterfly(x.copy()))
    assert np.array_equal(y, 32 * x)


def test_butterfly_rejects_bad_length():
    with pytest.raises(DomainError):
        butterfly(np.zeros(6, dtype=np.int64))


def test_noise_operator_identity_and_expectation():
    F = wht(parse_table("n=3:e8"))
    assert np.allclose(noise_operator(F, 1.0), F.coeffs)
    zero = noise_operator(F, 0.0)
    assert zero[0] == pytest.approx(float(F.coeffs[0]))
    assert np.all(zero[1:] == 0)


def test_noise_operator_on_xor():
    out = noise_operator(wht(parity(2, 0b11)), 0.5)
    assert out.tolist() == pytest.approx([0, 0, 0, 0.25])


@pytest.mark.parametrize("rho", [-1.01, 1.5])
def test_noise_operator_domain(rho):
    with pytest.raises(DomainError):
        noise_operator(wht(dictator(2, 1)), rho)


def test_dictator_tables():
    assert dictator(1, 1).table.tolist() == [0, 1]
    assert dictator(3, 3).table.tolist() == [(m >> 2) & 1 for m in range(8)]
    with pytest.raises(CoordinateOutOfRange):
        dictator(3, 4)
    with pytest.raises(CoordinateOutOfRange):
        dictator(3, 0)


@given(st.integers(1, 6).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, (1 << n) - 1))))
def test_parity_has_single_coefficient(args):
    n, mask = args
    F = wht(parity(n, mask))
    expected = np.zeros(1 << n, dtype=np.int64)
    expected[mask] = 1 << n
    assert np.array_equal(F.scaled_coeffs, expected)


def test_identity_symmetry():
    f = parse_table("n=3:96")
    assert apply_symmetry(f, InputSymmetry.identity(3)) == f


def test_swap_maps_dictator():
    swap = InputSymmetry((1, 0), 0, False)
    assert apply_symmetry(dictator(2, 1), swap) == dictator(2, 2)


def test_flip_and_negate_cancel():
    s = InputSymmetry((0, 1), 0b01, True)
    assert apply_symmetry(dictator(2, 1), s) == dictator(2, 1)


def test_symmetry_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        apply_symmetry(dictator(3, 1), InputSymmetry.identity(2))


def test_symmetry_group_size():
    assert len(list(input_symmetries(3))) == 6 * 8


@settings(max_examples=50)
@given(functions(1, 3), st.data())
def test_symmetry_compose_and_inverse(f, data):
    group = list(input_symmetries(f.n))
    s = data.draw(st.sampled_from(group))
    t = data.draw(st.sampled_from(group))
    s = InputSymmetry(s.perm, s.flips, data.draw(st.booleans()))
    assert apply_symmetry(apply_symmetry(f, s), s.inverse()) == f
    assert apply_symmetry(f, s.compose(t)) == apply_symmetry(apply_symmetry(f, t), s)


@settings(max_examples=50)
@given(functions(1, 3), st.data())
def test_symmetry_preserves_spectrum_multiset(f, data):
    s = data.draw(st.sampled_from(list(input_symmetries(f.n))))
    before = sorted(np.abs(wht(f).scaled_coeffs).tolist())
    after = sorted(np.abs(wht(apply_symmetry(f, s)).scaled_coeffs).tolist())
    assert before == after


def test_text_format_examples():
    assert format_table(dictator(2, 1)) == "n=2:a"
    assert format_table(dictator(3, 3)) == "n=3:0f"
    assert parse_table("n=2:6") == parity(2, 0b11)
    assert str(BooleanFunction.constant(2, 1)) == "n=2:0"


@given(functions(1, 8))
def test_text_round_trip(f):
    assert parse_table(format_table(f)) == f


@pytest.mark.parametrize(
    "text, position",
    [("m=2:a", 0), ("n=2a", 4), ("n=x:a", 2), ("n=2:aa", 4), ("n=2:g", 4), ("n=0:0", 2), ("n=1:4", 4)],
)
def test_parse_errors_carry_position(text, position):
    with pytest.raises(ParseError) as info:
        parse_table(text)
    assert info.value.position == position


def test_bias_and_negation():
    f = parse_table("n=2:8")
    assert f.bias() == Fraction(3, 4)
    assert (-f).bias() == Fraction(1, 4)
    assert wht(f).bias() == Fraction(3, 4)


def test_all_functions_rows():
    table = all_functions(2)
    assert table.shape == (16, 4)
    for k in range(16):
        assert BooleanFunction(2, table[k]).to_int() == k


def test_boolean_function_validation():
    with pytest.raises(DomainError):
        BooleanFunction(2, [0, 1, 0])
    with pytest.raises(DomainError):
        BooleanFunction(1, [0, 2])
    with pytest.raises(DomainError):
        BooleanFunction.from_values([1, 0])
    assert BooleanFunction.from_values([1, -1]) == dictator(1, 1)
