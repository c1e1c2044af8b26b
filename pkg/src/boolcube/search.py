"""Exhaustive and symmetry-reduced scans of I(f(X); g(Y)) over Boolean function pairs.

The scan engine works on blocks of ``f`` truth tables against a pool of ``g``
tables.  Correlations come from exact integer degree sums, so each entry of a
block is computed by the same fixed sequence of floating operations no matter
how blocks are distributed over workers.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._parallel import ordered_map
from .errors import (
    BudgetExceeded,
    DimensionTooLarge,
    DomainError,
    NonDictatorMaximizer,
    NumericalInconsistency,
)
from .hypercube import (
    BooleanFunction,
    all_functions,
    butterfly,
    dictator,
    format_table,
    hex_digits,
    parse_table,
    popcounts,
    symmetry_point_maps,
)
from .information import TOL, plogp, source_mi
from .source import degree_sums, theta_from_degree_sums

MAXIMIZER_TOL = 1e-9
BLOCK_ROWS = 16
MODE_LIMITS = {"exhaustive": 3, "canonical": 4, "sampled": 8}
CANONICAL_MAX_N = 6
CONJECTURE_MAX_N = 4
MAX_SAMPLED_PAIRS = 10_000_000


# --- canonical forms ---------------------------------------------------------------


@dataclass(frozen=True, order=True)
class CanonicalKey:
    """Smallest integer table in the orbit of a function.

    The orbit is taken under coordinate permutations, coordinate sign flips
    and output negation.  ``bytes`` is the big-endian encoding of that integer,
    so byte order and integer order agree.
    """

    n: int
    value: int

    @property
    def bytes(self):
        return self.value.to_bytes(max(1, (1 << self.n) // 8), "big")

    def function(self):
        return BooleanFunction.from_int(self.n, self.value)

    def __str__(self):
        return format_table(self.function())


@lru_cache(maxsize=None)
def _orbit_maps(n):
    maps = symmetry_point_maps(n)
    maps.flags.writeable = False
    return maps


def _pack(bits):
    """Integer encodings of bit rows (last axis is the table), as uint64."""
    place = np.left_shift(np.uint64(1), np.arange(bits.shape[-1], dtype=np.uint64))
    return bits.astype(np.uint64) @ place


def _table_ints(bits):
    """Python-int encodings of bit rows, valid for any table width."""
    if bits.shape[-1] <= 64:
        return [int(v) for v in _pack(bits)]
    packed = np.packbits(bits, axis=-1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def canonicalize(f):
    if f.n > CANONICAL_MAX_N:
        raise DimensionTooLarge(f"canonicalization limited to n <= {CANONICAL_MAX_N}")
    images = _pack(f.table[_orbit_maps(f.n)])
    full = np.uint64((1 << (1 << f.n)) - 1)
    best = min(images.min(), (images ^ full).min())
    return CanonicalKey(f.n, int(best))


@lru_cache(maxsize=None)
def canonical_table(n):
    """Canonical integer for every function on n <= 4 variables, indexed by its integer."""
    bits = all_functions(n)
    full = np.uint64((1 << (1 << n)) - 1)
    best = np.full(bits.shape[0], np.iinfo(np.uint64).max, dtype=np.uint64)
    for point_map in _orbit_maps(n):
        images = _pack(bits[:, point_map])
        np.minimum(best, images, out=best)
        np.minimum(best, images ^ full, out=best)
    best.flags.writeable = False
    return best


def class_representatives(n):
    """Sorted canonical integers, one per orbit."""
    return sorted(int(v) for v in np.unique(canonical_table(n)))


# --- dictator predicate ------------------------------------------------------------


def dictator_ints(n):
    """Integers of the 2n functions +-chi_i."""
    full = (1 << (1 << n)) - 1
    out = set()
    for i in range(1, n + 1):
        v = dictator(n, i).to_int()
        out.update((v, v ^ full))
    return out


def is_dictator_pair(f, g):
    """``f = +-g`` and ``f`` is a (possibly negated) dictator."""
    if f.n != g.n:
        return False
    return f.to_int() in dictator_ints(f.n) and (f == g or f == -g)


# --- report ------------------------------------------------------------------------


@dataclass
class VerificationReport:
    n: int
    rho_grid: list
    mode: str
    pairs_scanned: int
    max_mi: float
    max_gap_violation: float
    maximizers: list
    tolerance: float
    maximizer_tolerance: float
    max_mi_by_rho: list
    min_nondictator_gap_by_rho: list
    elapsed_ms: float = 0.0
    workers: int = 1
    extra: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.max_gap_violation >= -self.tolerance

    def summary(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} pairs={self.pairs_scanned} maxviol={self.max_gap_violation:.3e}"

    def to_dict(self, timing=False):
        out = {
            "schema": 1,
            "n": self.n,
            "rho_grid": list(self.rho_grid),
            "mode": self.mode,
            "pairs_scanned": self.pairs_scanned,
            "max_mi": self.max_mi,
            "max_gap_violation": self.max_gap_violation,
            "maximizers": self.maximizers,
            "tolerance": self.tolerance,
            "maximizer_tolerance": self.maximizer_tolerance,
            "max_mi_by_rho": self.max_mi_by_rho,
            "min_nondictator_gap_by_rho": self.min_nondictator_gap_by_rho,
            "passed": self.passed,
        }
        out.update(self.extra)
        if timing:
            out["elapsed_ms"] = self.elapsed_ms
            out["workers"] = self.workers
        return out

    def to_json(self, timing=False):
        return json.dumps(self.to_dict(timing=timing), indent=2, sort_keys=False) + "\n"


def _table_str(n, value):
    digits = "".join("0123456789abcdef"[(value >> (4 * j)) & 0xF] for j in range(hex_digits(n)))
    return f"n={n}:{digits}"


# --- scan engine -------------------------------------------------------------------


def _spectra(bits):
    values = 1 - 2 * bits.astype(np.int64)
    return butterfly(values, axis=-1)


def _entropy4(cells):
    if any(np.any(c < -1e-12) for c in cells):
        raise NumericalInconsistency("negative joint probability in scan")
    return sum(plogp(np.clip(c, 0.0, None)) for c in cells)


def _mi_from_theta(theta, a, b):
    cells = (a * b + theta, a * (1 - b) - theta, (1 - a) * b - theta, (1 - a) * (1 - b) + theta)
    return plogp(a) + plogp(1 - a) + plogp(b) + plogp(1 - b) - _entropy4(cells)


def _scan_block(args):
    """Scan one block of f rows; ``pairwise`` pairs row k with g row k."""
    n, f_bits, g_bits, rho_grid, maximizer_tol, pairwise = args
    size = 1 << n
    full = (1 << size) - 1
    F = _spectra(f_bits)
    G = _spectra(g_bits)
    f_int = _table_ints(f_bits)
    g_int = _table_ints(g_bits)
    a = (1 + F[:, 0] / size) / 2
    b = (1 + G[:, 0] / size) / 2
    if pairwise:
        deg = popcounts(n)
        sums = np.stack([(F[:, deg == k] * G[:, deg == k]).sum(axis=1) for k in range(n + 1)])
        a_b, b_b = a, b
    else:
        sums = degree_sums(F, G)
        a_b, b_b = a[:, None], b[None, :]

    dicts = dictator_ints(n)
    f_dict = np.array([v in dicts for v in f_int])
    g_arr = np.array(g_int, dtype=object)
    if pairwise:
        f_arr = np.array(f_int, dtype=object)
        dict_pair = f_dict & ((g_arr == f_arr) | (g_arr == (f_arr ^ full)))
    else:
        dict_pair = np.zeros((len(f_int), len(g_int)), dtype=bool)
        for r, v in enumerate(f_int):
            if f_dict[r]:
                dict_pair[r] = (g_arr == v) | (g_arr == (v ^ full))

    out = {"min_gap": [], "max_mi": [], "min_nondict": [], "maximizers": []}
    for rho in rho_grid:
        theta = theta_from_degree_sums(sums, rho, n)
        mi = _mi_from_theta(theta, a_b, b_b)
        gap = source_mi(rho) - mi
        out["min_gap"].append(float(gap.min()))
        out["max_mi"].append(float(mi.max()))
        rest = gap[~dict_pair]
        out["min_nondict"].append(float(rest.min()) if rest.size else math.inf)
        if 0 < abs(rho) < 1:
            hits = np.argwhere(np.abs(gap) <= maximizer_tol)
            for idx in hits:
                if pairwise:
                    r = c = int(idx[0])
                else:
                    r, c = int(idx[0]), int(idx[1])
                out["maximizers"].append((rho, f_int[r], g_int[c], float(mi[tuple(idx)])))
    return out


def _check_mode(n, mode):
    if mode not in MODE_LIMITS:
        raise DomainError(f"unknown mode {mode!r}; expected one of {sorted(MODE_LIMITS)}")
    if not isinstance(n, int) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if n > MODE_LIMITS[mode]:
        raise DimensionTooLarge(f"{mode} mode is limited to n <= {MODE_LIMITS[mode]}, got n={n}")


def _check_grid(rho_grid):
    grid = [float(r) for r in rho_grid]
    if not grid:
        raise DomainError("rho grid is empty")
    for r in grid:
        if not -1.0 <= r <= 1.0:
            raise DomainError(f"rho={r} outside [-1, 1]")
    return grid


def _int_bits(n, ints):
    ints = np.asarray(ints, dtype=np.int64)[:, None]
    return ((ints >> np.arange(1 << n)) & 1).astype(np.uint8)


def verify_theorem(n, rho_grid, tolerance=TOL, mode="exhaustive", budget=None, *,
                   seed=0, workers=1, maximizer_tolerance=MAXIMIZER_TOL,
                   check_maximizers=True):
    """Scan ``gap(f, g, rho)`` over pairs and aggregate a :class:`VerificationReport`.

    ``exhaustive``: all pairs (n <= 3).  ``canonical``: f over orbit
    representatives, g over all functions (n <= 4).  ``sampled``: ``budget``
    uniformly random pairs (n <= 8).  In the enumerating modes ``budget``, if
    given, caps the number of pairs.

    With ``check_maximizers`` every pair within ``maximizer_tolerance`` of the
    source mutual information at ``0 < |rho| < 1`` must be a dictator pair,
    otherwise NonDictatorMaximizer is raised.
    """
    _check_mode(n, mode)
    grid = _check_grid(rho_grid)
    start = time.perf_counter()
    size = 1 << n

    if mode == "sampled":
        if budget is None:
            raise DomainError("sampled mode needs a budget (number of pairs)")
        budget = int(budget)
        if budget < 1 or budget > MAX_SAMPLED_PAIRS:
            raise BudgetExceeded(f"sampled budget must be in 1..{MAX_SAMPLED_PAIRS}, got {budget}")
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        f_bits = rng.integers(0, 2, size=(budget, size), dtype=np.uint8)
        g_bits = rng.integers(0, 2, size=(budget, size), dtype=np.uint8)
        pairs = budget
        block = 4096
        jobs = [(n, f_bits[i:i + block], g_bits[i:i + block], grid, maximizer_tolerance, True)
                for i in range(0, budget, block)]
    else:
        g_bits = all_functions(n)
        if mode == "exhaustive":
            f_bits = g_bits
        else:
            f_bits = _int_bits(n, class_representatives(n))
        pairs = f_bits.shape[0] * g_bits.shape[0]
        if budget is not None and pairs > budget:
            raise BudgetExceeded(f"{pairs} pairs exceed the budget of {budget}")
        jobs = [(n, f_bits[i:i + BLOCK_ROWS], g_bits, grid, maximizer_tolerance, False)
                for i in range(0, f_bits.shape[0], BLOCK_ROWS)]

    parts = ordered_map(_scan_block, jobs, workers)

    min_gap = [min(p["min_gap"][k] for p in parts) for k in range(len(grid))]
    max_mi = [max(p["max_mi"][k] for p in parts) for k in range(len(grid))]
    min_nondict = [min(p["min_nondict"][k] for p in parts) for k in range(len(grid))]
    order = {rho: k for k, rho in enumerate(grid)}
    found = sorted((m for p in parts for m in p["maximizers"]),
                   key=lambda m: (order[m[0]], m[1], m[2]))

    dicts = dictator_ints(n)
    full = (1 << size) - 1
    bad = [m for m in found if not (m[1] in dicts and m[2] in (m[1], m[1] ^ full))]
    maximizers = [
        {"f": _table_str(n, f), "g": _table_str(n, g), "rho": rho, "mi": mi}
        for rho, f, g, mi in found
    ]
    report = VerificationReport(
        n=n,
        rho_grid=grid,
        mode=mode,
        pairs_scanned=pairs,
        max_mi=max(max_mi),
        max_gap_violation=min(min_gap),
        maximizers=maximizers,
        tolerance=tolerance,
        maximizer_tolerance=maximizer_tolerance,
        max_mi_by_rho=max_mi,
        min_nondictator_gap_by_rho=[None if math.isinf(v) else v for v in min_nondict],
        elapsed_ms=(time.perf_counter() - start) * 1000.0,
        workers=workers,
    )
    if check_maximizers and bad:
        raise NonDictatorMaximizer(
            f"{len(bad)} maximizing pairs are not dictator pairs, first: "
            f"f={_table_str(n, bad[0][1])} g={_table_str(n, bad[0][2])} rho={bad[0][0]}",
            pairs=[(BooleanFunction.from_int(n, f), BooleanFunction.from_int(n, g)) for _, f, g, _ in bad],
        )
    return report


def find_maximizers(n, rho, tolerance=MAXIMIZER_TOL, workers=1):
    """All pairs with ``gap <= tolerance`` at a fixed ``0 < |rho| < 1``.

    Exhaustive for n <= 3, over orbit representatives of f for n = 4.
    Raises NonDictatorMaximizer if any of them is not ``f = +-g = +-chi_i``.
    """
    rho = float(rho)
    if not 0 < abs(rho) < 1:
        raise DomainError(f"maximizers are only characterized for 0 < |rho| < 1, got {rho}")
    mode = "exhaustive" if n <= MODE_LIMITS["exhaustive"] else "canonical"
    report = verify_theorem(n, [rho], tolerance=tolerance, mode=mode, workers=workers,
                            maximizer_tolerance=tolerance, check_maximizers=True)
    return [(parse_table(m["f"]), parse_table(m["g"])) for m in report.maximizers]


def expected_maximizer_count(n):
    """Size of the dictator-pair set ``{(f, g): f = +-g = +-chi_i}``: 2n choices of f, 2 of g."""
    return 4 * n


# --- one-sided check ---------------------------------------------------------------


def one_sided_mi(F_scaled, rho, n):
    """``I(f(X); Y)`` for each row of scaled spectra, via ``E[f(X) | Y = y] = (T_rho f)(y)``."""
    size = 1 << n
    weights = float(rho) ** popcounts(n).astype(float)
    noisy = butterfly(F_scaled * weights / size, axis=-1)
    p = np.clip((1 + noisy) / 2, 0.0, 1.0)
    cond = (plogp(p) + plogp(1 - p)).mean(axis=-1)
    a = (1 + F_scaled[..., 0] / size) / 2
    return plogp(a) + plogp(1 - a) - cond


def verify_conjecture_one_sided(n, rho_grid, tolerance=TOL, *, canonical=True,
                                maximizer_tolerance=MAXIMIZER_TOL):
    """Check ``I(f(X); Y) <= I(x; y)`` for every (canonical) function on n <= 4 variables."""
    if n > CONJECTURE_MAX_N:
        raise DimensionTooLarge(f"one-sided check limited to n <= {CONJECTURE_MAX_N}")
    if n < 1:
        raise DomainError("n must be >= 1")
    grid = _check_grid(rho_grid)
    start = time.perf_counter()
    if canonical:
        ints = class_representatives(n)
        bits = _int_bits(n, ints)
    else:
        bits = all_functions(n)
        ints = list(range(bits.shape[0]))
    F = _spectra(bits).astype(float)
    max_mi, min_gap, min_nondict, maximizers = [], [], [], []
    dicts = dictator_ints(n)
    is_dict = np.array([v in dicts for v in ints])
    for rho in grid:
        mi = one_sided_mi(F, rho, n)
        gap = source_mi(rho) - mi
        max_mi.append(float(mi.max()))
        min_gap.append(float(gap.min()))
        rest = gap[~is_dict]
        min_nondict.append(float(rest.min()) if rest.size else None)
        if 0 < abs(rho) < 1:
            for k in np.flatnonzero(np.abs(gap) <= maximizer_tolerance):
                maximizers.append({"f": _table_str(n, ints[k]), "g": None, "rho": rho, "mi": float(mi[k])})
    return VerificationReport(
        n=n,
        rho_grid=grid,
        mode="one-sided-canonical" if canonical else "one-sided-exhaustive",
        pairs_scanned=len(ints),
        max_mi=max(max_mi),
        max_gap_violation=min(min_gap),
        maximizers=maximizers,
        tolerance=tolerance,
        maximizer_tolerance=maximizer_tolerance,
        max_mi_by_rho=max_mi,
        min_nondictator_gap_by_rho=min_nondict,
        elapsed_ms=(time.perf_counter() - start) * 1000.0,
    )
