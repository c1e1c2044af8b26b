"""Truth tables on {-1, 1}^n, the Walsh-Hadamard transform and the symmetry group.

Encoding conventions used throughout the package:

* A point of the cube is an index ``m`` in ``[0, 2**n)``; bit ``i`` of ``m`` is
  set iff coordinate ``x_{i+1} = -1``.  ``m = 0`` is the all-(+1) point.
* A subset ``S`` of ``{1..n}`` is a mask with bit ``i`` set iff ``i+1 in S``.
* A table bit of 0 encodes the value +1, a bit of 1 encodes -1, so the
  all-zero table is the constant +1 function.

With these conventions ``chi_S(x(m)) = (-1)**popcount(S & m)`` and the
transform is a pure butterfly over the index bits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

import numpy as np

from .errors import (
    CoordinateOutOfRange,
    DimensionMismatch,
    DimensionTooLarge,
    DomainError,
    NotBoolean,
    ParseError,
)

MAX_N = 20


def _check_n(n):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"dimension must be a positive integer, got {n!r}")
    if n > MAX_N:
        raise DimensionTooLarge(f"n={n} exceeds the cap of {MAX_N}")
    return int(n)


def popcounts(n):
    """``|S|`` for every mask ``S`` in ``[0, 2**n)``."""
    idx = np.arange(1 << n, dtype=np.int64)
    counts = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        counts += (idx >> i) & 1
    return counts


def _frozen(arr):
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class BooleanFunction:
    """A Boolean function ``{-1,1}^n -> {-1,1}`` stored as a bit table."""

    n: int
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = _check_n(self.n)
        table = np.asarray(self.table)
        if table.shape != (1 << n,):
            raise DomainError(f"table must have length 2**{n} = {1 << n}, got shape {table.shape}")
        if table.size and (table.min() < 0 or table.max() > 1):
            raise DomainError("table bits must be 0 or 1")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "table", _frozen(table.astype(np.uint8)))

    @classmethod
    def from_values(cls, values):
        """Build from a sequence of +1/-1 values indexed by point."""
        values = np.asarray(values)
        if not np.all(np.abs(values) == 1):
            raise DomainError("values must all be +1 or -1")
        n = int(values.size).bit_length() - 1
        if values.size != 1 << n:
            raise DomainError("number of values must be a power of two")
        return cls(n, (values < 0).astype(np.uint8))

    @classmethod
    def from_int(cls, n, bits):
        """Build from an integer whose bit ``m`` is the table bit at point ``m``."""
        n = _check_n(n)
        size = 1 << n
        if bits < 0 or bits >> size:
            raise DomainError(f"integer table does not fit in 2**{n} bits")
        raw = int(bits).to_bytes((size + 7) // 8, "little")
        table = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:size]
        return cls(n, table)

    @classmethod
    def constant(cls, n, value=1):
        if value not in (1, -1):
            raise DomainError("constant value must be +1 or -1")
        return cls(n, np.full(1 << _check_n(n), 0 if value == 1 else 1, dtype=np.uint8))

    @property
    def values(self):
        """The +1/-1 values as an int64 array."""
        return 1 - 2 * self.table.astype(np.int64)

    def __call__(self, m):
        return 1 - 2 * int(self.table[m])

    def to_int(self):
        packed = np.packbits(self.table, bitorder="little")
        return int.from_bytes(packed.tobytes(), "little")

    def bias(self):
        """``P(f(X) = 1)`` as an exact fraction, by counting table bits."""
        return Fraction(int((self.table == 0).sum()), 1 << self.n)

    def __neg__(self):
        return BooleanFunction(self.n, 1 - self.table)

    def __eq__(self, other):
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.n, self.table.tobytes()))

    def __str__(self):
        return format_table(self)


@dataclass(frozen=True, eq=False)
class FourierExpansion:
    """Integer-scaled Fourier coefficients: ``scaled_coeffs[S] = 2**n * fhat(S)``."""

    n: int
    scaled_coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = _check_n(self.n)
        coeffs = np.asarray(self.scaled_coeffs)
        if coeffs.shape != (1 << n,):
            raise DomainError(f"expected {1 << n} coefficients, got shape {coeffs.shape}")
        if not np.issubdtype(coeffs.dtype, np.integer):
            if not np.all(coeffs == np.round(coeffs)):
                raise DomainError("scaled coefficients must be integers")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "scaled_coeffs", _frozen(coeffs.astype(np.int64)))

    @property
    def coeffs(self):
        """``fhat(S)`` as floats."""
        return self.scaled_coeffs / float(1 << self.n)

    def coefficient(self, mask):
        """``fhat(S)`` for a subset mask, as an exact fraction."""
        return Fraction(int(self.scaled_coeffs[mask]), 1 << self.n)

    def bias(self):
        """``a = (1 + fhat(empty)) / 2`` as an exact fraction."""
        return (1 + self.coefficient(0)) / 2

    def parseval_sum(self):
        """``sum_S scaled_coeffs[S]**2`` as an exact Python integer."""
        return sum(int(c) * int(c) for c in self.scaled_coeffs)

    def __eq__(self, other):
        if not isinstance(other, FourierExpansion):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.scaled_coeffs, other.scaled_coeffs)

    def __hash__(self):
        return hash((self.n, self.scaled_coeffs.tobytes()))


def butterfly(values, axis=-1):
    """Unnormalized Walsh-Hadamard transform along ``axis`` (length a power of two).

    Works on integer arrays exactly and on float arrays; stacked inputs are
    transformed independently.
    """
    x = np.ascontiguousarray(np.moveaxis(np.array(values, copy=True), axis, -1))
    size = x.shape[-1]
    if size & (size - 1):
        raise DomainError("transform length must be a power of two")
    lead = x.shape[:-1]
    h = 1
    while h < size:
        blocks = x.reshape(*lead, size // (2 * h), 2, h)
        lo = blocks[..., 0, :].copy()
        hi = blocks[..., 1, :]
        blocks[..., 0, :] += hi
        blocks[..., 1, :] = lo - hi
        h *= 2
    return np.moveaxis(x, -1, axis)


def wht(f):
    """Fourier expansion of ``f`` with exact integer coefficients, O(N log N)."""
    return FourierExpansion(f.n, butterfly(f.values))


def inverse_wht(expansion):
    """Reconstruct the Boolean function whose expansion is ``expansion``.

    Raises NotBoolean when some reconstructed value is not +1 or -1.
    """
    n = expansion.n
    size = 1 << n
    sums = butterfly(expansion.scaled_coeffs)
    if not np.all(np.abs(sums) == size):
        bad = int(np.flatnonzero(np.abs(sums) != size)[0])
        raise NotBoolean(
            f"reconstructed value at point {bad} is {Fraction(int(sums[bad]), size)}, not +1 or -1"
        )
    return BooleanFunction(n, (sums < 0).astype(np.uint8))


def noise_operator(expansion, rho):
    """Coefficients of ``T_rho f``: ``fhat(S) * rho**|S|`` (floats)."""
    rho = float(rho)
    if not -1.0 <= rho <= 1.0:
        raise DomainError(f"rho must lie in [-1, 1], got {rho}")
    weights = rho ** popcounts(expansion.n).astype(float)
    return expansion.coeffs * weights


def dictator(n, i):
    """The dictator ``chi_i(x) = x_i`` for a 1-based coordinate ``i``."""
    n = _check_n(n)
    if not 1 <= i <= n:
        raise CoordinateOutOfRange(f"coordinate {i} not in 1..{n}")
    idx = np.arange(1 << n)
    return BooleanFunction(n, ((idx >> (i - 1)) & 1).astype(np.uint8))


def parity(n, mask):
    """The character ``chi_S`` for a subset mask."""
    n = _check_n(n)
    if not 0 <= mask < 1 << n:
        raise CoordinateOutOfRange(f"subset mask {mask} out of range for n={n}")
    idx = np.arange(1 << n, dtype=np.int64)
    bits = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        if mask >> i & 1:
            bits ^= (idx >> i) & 1
    return BooleanFunction(n, bits.astype(np.uint8))


@dataclass(frozen=True)
class InputSymmetry:
    """An element of the hyperoctahedral group extended by output negation.

    ``perm`` is a tuple of 0-based coordinate indices.  The action is::

        (s . f)(x) = (-1)**negate_output * f(z),
        w_j = -x_j if bit j of flips else x_j,
        z_i = w_{perm[i]}.
    """

    perm: tuple
    flips: int = 0
    negate_output: bool = False

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        if sorted(perm) != list(range(len(perm))):
            raise DomainError(f"perm {perm} is not a permutation of 0..{len(perm) - 1}")
        if not 0 <= self.flips < 1 << len(perm):
            raise DomainError("flips mask has bits outside the dimension")
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "negate_output", bool(self.negate_output))

    @property
    def n(self):
        return len(self.perm)

    @classmethod
    def identity(cls, n):
        return cls(tuple(range(n)))

    def point_map(self):
        """Index array ``idx`` with ``(s . f).table[m] = f.table[idx[m]] ^ negate_output``."""
        w = np.arange(1 << self.n, dtype=np.int64) ^ self.flips
        out = np.zeros_like(w)
        for i, p in enumerate(self.perm):
            out |= ((w >> p) & 1) << i
        return out

    def inverse(self):
        inv = [0] * self.n
        for i, p in enumerate(self.perm):
            inv[p] = i
        flips = 0
        for j in range(self.n):
            if self.flips >> self.perm[j] & 1:
                flips |= 1 << j
        return InputSymmetry(tuple(inv), flips, self.negate_output)

    def compose(self, other):
        """The symmetry acting as ``self`` applied after ``other``."""
        if other.n != self.n:
            raise DimensionMismatch("cannot compose symmetries of different dimension")
        combined = other.point_map()[self.point_map()]
        return _symmetry_from_point_map(
            self.n, combined, self.negate_output ^ other.negate_output
        )


def _symmetry_from_point_map(n, point_map, negate_output):
    origin = int(point_map[0])
    perm = [0] * n
    for j in range(n):
        # flipping x_j moves exactly the z coordinate i with perm[i] == j
        moved = int(point_map[1 << j]) ^ origin
        perm[moved.bit_length() - 1] = j
    flips = 0
    for i in range(n):
        if origin >> i & 1:
            flips |= 1 << perm[i]
    return InputSymmetry(tuple(perm), flips, negate_output)


def apply_symmetry(f, s):
    if s.n != f.n:
        raise DimensionMismatch(f"symmetry acts on n={s.n}, function has n={f.n}")
    table = f.table[s.point_map()]
    if s.negate_output:
        table = 1 - table
    return BooleanFunction(f.n, table)


def input_symmetries(n):
    """All ``n! * 2**n`` input symmetries (no output negation)."""
    for perm in permutations(range(n)):
        for flips in range(1 << n):
            yield InputSymmetry(perm, flips, False)


def symmetry_point_maps(n):
    """Stacked point maps of every input symmetry, shape ``(n! * 2**n, 2**n)``."""
    return np.stack([s.point_map() for s in input_symmetries(n)])


def hex_digits(n):
    return max(1, math.ceil((1 << n) / 4))


def format_table(f):
    """Serialize as ``n=<K>:<hex>``, hex digit ``j`` holding table bits ``4j..4j+3``."""
    bits = f.to_int()
    digits = "".join("0123456789abcdef"[(bits >> (4 * j)) & 0xF] for j in range(hex_digits(f.n)))
    return f"n={f.n}:{digits}"


def parse_table(text):
    """Inverse of :func:`format_table`; raises ParseError with a character offset."""
    text = text.strip()
    if not text.startswith("n="):
        raise ParseError("truth table must start with 'n='", 0)
    colon = text.find(":")
    if colon < 0:
        raise ParseError("missing ':' separator", len(text))
    try:
        n = int(text[2:colon])
    except ValueError:
        raise ParseError(f"bad dimension {text[2:colon]!r}", 2) from None
    if not 1 <= n <= MAX_N:
        raise ParseError(f"dimension {n} outside 1..{MAX_N}", 2)
    digits = text[colon + 1:]
    expected = hex_digits(n)
    if len(digits) != expected:
        raise ParseError(
            f"expected {expected} hex digits for n={n}, got {len(digits)}", colon + 1
        )
    bits = 0
    for j, ch in enumerate(digits):
        try:
            bits |= int(ch, 16) << (4 * j)
        except ValueError:
            raise ParseError(f"invalid hex digit {ch!r}", colon + 1 + j) from None
    if bits >> (1 << n):
        raise ParseError(f"table has bits set beyond 2**{n} points", len(text) - 1)
    return BooleanFunction.from_int(n, bits)


def all_functions(n):
    """Bit tables of every Boolean function on n variables, shape ``(2**2**n, 2**n)``.

    Row ``k`` is the function whose integer encoding is ``k``.
    """
    size = 1 << n
    if size > 16:
        raise DimensionTooLarge("enumerating all functions is limited to n <= 4")
    k = np.arange(1 << size, dtype=np.int64)[:, None]
    return ((k >> np.arange(size)) & 1).astype(np.uint8)
