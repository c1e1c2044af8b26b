"""Entropy and mutual information in bits for binary variables."""
from __future__ import annotations

import numpy as np

from .errors import DomainError, InvalidDistribution, ThetaOutOfRange
from .source import Joint2x2, SourceModel, _as_expansion, joint_distribution

PROB_TOL = 1e-12
# Absolute slack for every entropic comparison (gap >= -TOL and friends).
TOL = 1e-9


def plogp(p):
    """Elementwise ``-p * log2(p)`` with ``0 log 0 = 0``."""
    p = np.asarray(p, dtype=float)
    safe = np.where(p > 0, p, 1.0)
    return np.where(p > 0, -p * np.log2(safe), 0.0)


def binary_entropy(p):
    """``h(p) = -p log2 p - (1-p) log2 (1-p)``.  Accepts scalars or arrays."""
    arr = np.asarray(p, dtype=float)
    if np.any(arr < -PROB_TOL) or np.any(arr > 1 + PROB_TOL) or np.any(np.isnan(arr)):
        raise DomainError(f"binary entropy needs p in [0, 1], got {p}")
    arr = np.clip(arr, 0.0, 1.0)
    out = plogp(arr) + plogp(1.0 - arr)
    return float(out) if out.ndim == 0 else out


def entropy(probs):
    """``H(p) = -sum p_i log2 p_i``, skipping zero entries."""
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 1 or probs.size == 0:
        raise InvalidDistribution("expected a non-empty probability vector")
    if np.any(probs < -PROB_TOL) or abs(probs.sum() - 1.0) > PROB_TOL:
        raise InvalidDistribution(f"not a probability vector: {probs.tolist()}")
    return float(plogp(np.clip(probs, 0.0, None)).sum())


def theta_limits(a, b):
    """Range of ``theta`` keeping all four cells in ``[0, 1]``."""
    return max(-a * b, -(1 - a) * (1 - b)), min(a * (1 - b), (1 - a) * b)


def xi_array(theta, a, b):
    """Vectorized ``xi`` without range checks; cells are clipped at 0."""
    theta = np.asarray(theta, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    cells = (a * b + theta, a * (1 - b) - theta, (1 - a) * b - theta, (1 - a) * (1 - b) + theta)
    joint_h = sum(plogp(np.clip(c, 0.0, None)) for c in cells)
    return plogp(a) + plogp(1 - a) + plogp(b) + plogp(1 - b) - joint_h


def xi(theta, a, b):
    """``h(a) + h(b) - H(ab + t, ab' - t, a'b - t, a'b' + t)``: the MI of the 2x2 law."""
    for name, v in (("a", a), ("b", b)):
        if not 0.0 <= v <= 1.0:
            raise DomainError(f"{name}={v} outside [0, 1]")
    lo, hi = theta_limits(a, b)
    if theta < lo - PROB_TOL or theta > hi + PROB_TOL:
        raise ThetaOutOfRange(f"theta={theta} outside [{lo}, {hi}] for a={a}, b={b}")
    return float(xi_array(theta, a, b))


def mutual_information(joint):
    """``I`` between the two coordinates of a :class:`Joint2x2`, in bits."""
    cells = joint.as_array()
    if np.any(cells < -PROB_TOL) or abs(cells.sum() - 1.0) > PROB_TOL:
        raise InvalidDistribution(f"not a joint law: {cells.tolist()}")
    cells = np.clip(cells, 0.0, None)
    a = cells[0] + cells[1]
    b = cells[0] + cells[2]
    mi = binary_entropy(min(a, 1.0)) + binary_entropy(min(b, 1.0)) - float(plogp(cells).sum())
    return max(mi, 0.0) if mi > -PROB_TOL else mi


def source_mi(rho):
    """``I(x; y)`` for one letter of the source, ``1 - h((1 + |rho|) / 2)``.

    Evaluated from the single-letter pmf and checked against the closed form.
    """
    model = SourceModel(rho)
    from_pmf = mutual_information(model.joint())
    closed = 1.0 - binary_entropy((1.0 + abs(model.rho)) / 2.0)
    if abs(from_pmf - closed) > PROB_TOL:
        raise AssertionError(f"source MI mismatch at rho={rho}: {from_pmf} vs {closed}")
    return closed


def gap(f, g, rho):
    """``I(x; y) - I(f(X); g(Y))``, nonnegative for every pair of Boolean functions."""
    F, G = _as_expansion(f), _as_expansion(g)
    return source_mi(rho) - mutual_information(joint_distribution(F, G, rho))


def joint_from_theta(theta, a, b):
    """The :class:`Joint2x2` with marginals ``(a, b)`` and parameter ``theta``."""
    lo, hi = theta_limits(a, b)
    if theta < lo - PROB_TOL or theta > hi + PROB_TOL:
        raise ThetaOutOfRange(f"theta={theta} outside [{lo}, {hi}] for a={a}, b={b}")
    cells = (a * b + theta, a * (1 - b) - theta, (1 - a) * b - theta, (1 - a) * (1 - b) + theta)
    return Joint2x2(*(min(max(float(c), 0.0), 1.0) for c in cells))

