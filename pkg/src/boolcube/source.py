"""The rho-correlated Rademacher source and the joint law of (f(X), g(Y)).

The joint law is available three ways: from Fourier coefficients
(:func:`joint_distribution`), by summing over all ``4**n`` point pairs
(:func:`brute_force_joint`), and by sampling (:func:`monte_carlo_joint`).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ._parallel import ordered_map
from .errors import (
    DimensionMismatch,
    DimensionTooLarge,
    DomainError,
    NumericalInconsistency,
)
from .hypercube import FourierExpansion, popcounts, wht

CLAMP_TOL = 1e-12
BRUTE_FORCE_MAX_N = 13
MC_BLOCK = 1 << 16


def _check_rho(rho):
    rho = float(rho)
    if not -1.0 <= rho <= 1.0 or math.isnan(rho):
        raise DomainError(f"rho must lie in [-1, 1], got {rho}")
    return rho


@dataclass(frozen=True)
class SourceModel:
    """Single-letter law of a pair of Rademacher variables with ``E[xy] = rho``."""

    rho: float

    def __post_init__(self):
        object.__setattr__(self, "rho", _check_rho(self.rho))

    @property
    def pmf(self):
        """``(P(+,+), P(+,-), P(-,+), P(-,-))``."""
        same = (1 + self.rho) / 4
        diff = (1 - self.rho) / 4
        return (same, diff, diff, same)

    def joint(self):
        return Joint2x2(*self.pmf)


@dataclass(frozen=True)
class Joint2x2:
    """Joint law of two +-1 variables; ``pm`` is ``P(first = +1, second = -1)``."""

    pp: float
    pm: float
    mp: float
    mm: float
    clamped: bool = False

    def as_array(self):
        return np.array([self.pp, self.pm, self.mp, self.mm])

    @property
    def a(self):
        return self.pp + self.pm

    @property
    def b(self):
        return self.pp + self.mp

    def transpose(self):
        return Joint2x2(self.pp, self.mp, self.pm, self.mm, self.clamped)

    def max_abs_diff(self, other):
        return float(np.max(np.abs(self.as_array() - other.as_array())))

    def to_dict(self):
        return {"pp": self.pp, "pm": self.pm, "mp": self.mp, "mm": self.mm, "clamped": self.clamped}

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        return cls(data["pp"], data["pm"], data["mp"], data["mm"], bool(data.get("clamped", False)))


def _as_expansion(obj):
    return obj if isinstance(obj, FourierExpansion) else wht(obj)


def degree_sums(F, G):
    """Exact integers ``M_k = sum_{|S| = k} F[S] * G[S]`` for ``k = 0..n``.

    ``F`` and ``G`` are scaled coefficient arrays whose last axis is indexed by
    subset mask; leading axes broadcast as in a matrix product
    (``F`` is ``(..., N)``, ``G`` is ``(M, N)`` giving ``(n+1, ..., M)``).
    """
    F = np.asarray(F, dtype=np.int64)
    G = np.asarray(G, dtype=np.int64)
    n = F.shape[-1].bit_length() - 1
    deg = popcounts(n)
    return np.stack([F[..., deg == k] @ G[..., deg == k].T for k in range(n + 1)])


def theta_from_degree_sums(sums, rho, n):
    """``theta_rho`` from :func:`degree_sums`, summed in a fixed order."""
    theta = np.zeros(sums.shape[1:])
    power = 1.0
    for k in range(1, n + 1):
        power *= rho
        theta = theta + power * sums[k]
    return theta / (4.0 * 4.0 ** n)


def theta_rho(F, G, rho):
    """``(1/4) sum_{|S| >= 1} fhat(S) ghat(S) rho**|S|``."""
    F, G = _as_expansion(F), _as_expansion(G)
    if F.n != G.n:
        raise DimensionMismatch(f"n={F.n} vs n={G.n}")
    rho = _check_rho(rho)
    sums = degree_sums(F.scaled_coeffs[None, :], G.scaled_coeffs[None, :])
    return float(theta_from_degree_sums(sums, rho, F.n)[0, 0])


def _clamp_cells(cells):
    cells = np.asarray(cells, dtype=float)
    low = cells < 0
    high = cells > 1
    if np.any(cells < -CLAMP_TOL) or np.any(cells > 1 + CLAMP_TOL):
        raise NumericalInconsistency(f"joint probabilities out of [0, 1]: {cells.tolist()}")
    clamped = bool(low.any() or high.any())
    return np.clip(cells, 0.0, 1.0), clamped


def cells_from_theta(theta, a, b):
    """The four cells ``(ab + t, a b' - t, a' b - t, a' b' + t)``; broadcasts."""
    return (
        a * b + theta,
        a * (1 - b) - theta,
        (1 - a) * b - theta,
        (1 - a) * (1 - b) + theta,
    )


def joint_distribution(F, G, rho):
    """Joint law of ``(f(X), g(Y))`` from the Fourier expansions."""
    F, G = _as_expansion(F), _as_expansion(G)
    if F.n != G.n:
        raise DimensionMismatch(f"n={F.n} vs n={G.n}")
    theta = theta_rho(F, G, rho)
    a, b = float(F.bias()), float(G.bias())
    cells, clamped = _clamp_cells(cells_from_theta(theta, a, b))
    return Joint2x2(*(float(c) for c in cells), clamped=clamped)


def _brute_rows(args):
    f_minus, g_minus, n, rho, start, stop = args
    rows = np.arange(start, stop, dtype=np.int64)[:, None]
    cols = np.arange(1 << n, dtype=np.int64)[None, :]
    diff = rows ^ cols
    dist = np.zeros(diff.shape, dtype=np.int64)
    for i in range(n):
        dist += (diff >> i) & 1
    same_p = (1 + rho) / 4
    diff_p = (1 - rho) / 4
    weight = same_p ** (n - dist) * diff_p ** dist
    fm = f_minus[start:stop].astype(bool)
    gm = g_minus.astype(bool)
    out = np.zeros(4)
    for k, (fx, gy) in enumerate(((False, False), (False, True), (True, False), (True, True))):
        out[k] = weight[np.ix_(fm == fx, gm == gy)].sum()
    return out


def brute_force_joint(f, g, rho, workers=1):
    """Joint law by direct summation of ``prod_i p(x_i, y_i)`` over all point pairs."""
    if f.n != g.n:
        raise DimensionMismatch(f"n={f.n} vs n={g.n}")
    if f.n > BRUTE_FORCE_MAX_N:
        raise DimensionTooLarge(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}")
    rho = _check_rho(rho)
    n = f.n
    size = 1 << n
    step = max(1, min(size, (1 << 22) // size))
    chunks = [(f.table, g.table, n, rho, s, min(size, s + step)) for s in range(0, size, step)]
    total = np.sum(ordered_map(_brute_rows, chunks, workers), axis=0)
    return Joint2x2(*(float(c) for c in total))


@dataclass(frozen=True)
class MonteCarloEstimate:
    joint: Joint2x2
    stderr: tuple
    samples: int
    seed: int

    def to_dict(self):
        return {
            "joint": self.joint.to_dict(),
            "stderr": {k: s for k, s in zip(("pp", "pm", "mp", "mm"), self.stderr)},
            "samples": self.samples,
            "seed": self.seed,
        }


def _mc_block(args):
    f_table, g_table, n, rho, seed_seq, count = args
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    x = rng.integers(0, 2, size=(count, n), dtype=np.uint8)
    flip = rng.random((count, n)) < (1 - rho) / 2
    y = x ^ flip.astype(np.uint8)
    place = (1 << np.arange(n)).astype(np.int64)
    fx = f_table[x.astype(np.int64) @ place]
    gy = g_table[y.astype(np.int64) @ place]
    return np.bincount(2 * fx.astype(np.int64) + gy, minlength=4)


def monte_carlo_joint(f, g, rho, samples, seed=0, workers=1):
    """Empirical joint law from ``samples`` i.i.d. draws of ``(X, Y)``.

    Each ``x_i`` is a fair bit and ``y_i = x_i`` with probability
    ``(1 + rho) / 2``, else ``-x_i``.  Samples are cut into fixed blocks of
    ``MC_BLOCK`` draws, block ``k`` using PCG64 seeded from child ``k`` of
    ``SeedSequence(seed)``, so the result depends on ``seed`` only and not on
    ``workers``.
    """
    if f.n != g.n:
        raise DimensionMismatch(f"n={f.n} vs n={g.n}")
    samples = int(samples)
    if samples < 1:
        raise DomainError("samples must be >= 1")
    rho = _check_rho(rho)
    nblocks = -(-samples // MC_BLOCK)
    children = np.random.SeedSequence(seed).spawn(nblocks)
    jobs = []
    for k, child in enumerate(children):
        count = min(MC_BLOCK, samples - k * MC_BLOCK)
        jobs.append((f.table, g.table, f.n, rho, child, count))
    counts = np.sum(ordered_map(_mc_block, jobs, workers), axis=0)
    freq = counts / samples
    stderr = tuple(float(math.sqrt(p * (1 - p) / samples)) for p in freq)
    return MonteCarloEstimate(Joint2x2(*(float(p) for p in freq)), stderr, samples, seed)
