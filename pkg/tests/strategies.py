"""Hypothesis strategies shared by the test modules."""
from hypothesis import strategies as st

from boolcube.hypercube import BooleanFunction


def functions(min_n=1, max_n=6):
    return st.integers(min_n, max_n).flatmap(lambda n: functions_of(n))


def functions_of(n):
    return st.integers(0, (1 << (1 << n)) - 1).map(lambda bits: BooleanFunction.from_int(n, bits))


def function_pairs(min_n=1, max_n=5):
    return st.integers(min_n, max_n).flatmap(lambda n: st.tuples(functions_of(n), functions_of(n)))


rhos = st.floats(-1.0, 1.0, allow_nan=False)
open_rhos = st.floats(0.01, 0.99)
