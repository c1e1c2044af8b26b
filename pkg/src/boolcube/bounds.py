"""Analytic bounds on the correlation parameter and the two-variable inequality.

Everything here is a numerically checkable object: the positive/negative
split of the level-one correlation, the interval that confines ``theta_rho``,
the gap function ``phi`` at the extremal ``theta``, its closed-form
derivatives, the cubic numerator of ``phi''``, the ``(c, x)`` change of
variables and the boundary functions ``psi`` and ``gamma``.

Public ``phi``, ``psi`` and ``gamma`` are in bits.  Derivative formulas are
written with natural logs and an explicit ``log 2`` divisor.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
from numpy.polynomial import polynomial as P

from ._parallel import ordered_map
from .errors import (
    DegreeCollapseViolation,
    DimensionMismatch,
    DomainError,
    SignPatternViolation,
)
from .information import TOL, binary_entropy, plogp, xi_array
from .source import _as_expansion

LN2 = math.log(2.0)
EDGE_TOL = 1e-12
DEGREE_TOL = 1e-10
ROOT_WIDTH = 1e-13
SCAN_POINTS = 10_000


def schwarz_constant(a, b):
    """``C(a, b) = (a(1-b) + sqrt(a(1-a)b(1-b))) / 2``; broadcasts over arrays."""
    return (a * (1 - b) + np.sqrt(a * (1 - a) * b * (1 - b))) / 2


def rho_cap(alpha, beta):
    """Largest admissible ``rho`` for ``phi``: ``alpha(1-beta) / C(alpha, beta)``."""
    return alpha * (1 - beta) / schwarz_constant(alpha, beta)


# --- correlation split ---------------------------------------------------------


@dataclass(frozen=True)
class TauSplit:
    """Positive and negative parts of ``theta_1`` as exact fractions."""

    tau_plus: Fraction
    tau_minus: Fraction

    @property
    def theta_one(self):
        return self.tau_plus + self.tau_minus

    def schwarz_holds(self, a, b):
        """Exact check of ``tau+ - tau- <= sqrt(a a' b b')`` after squaring."""
        a, b = Fraction(a), Fraction(b)
        spread = self.tau_plus - self.tau_minus
        return spread >= 0 and spread * spread <= a * (1 - a) * b * (1 - b)


def tau_split(F, G):
    F, G = _as_expansion(F), _as_expansion(G)
    if F.n != G.n:
        raise DimensionMismatch(f"n={F.n} vs n={G.n}")
    prods = [int(x) * int(y) for x, y in zip(F.scaled_coeffs[1:], G.scaled_coeffs[1:])]
    denom = 4 * 4 ** F.n
    return TauSplit(
        Fraction(sum(p for p in prods if p > 0), denom),
        Fraction(sum(p for p in prods if p < 0), denom),
    )


def theta_interval(rho, a, b):
    """``(theta_lo, theta_hi)`` confining ``theta_rho`` for biases ``1/2 <= a <= b < 1``."""
    a, b, rho = float(a), float(b), float(rho)
    if not (0.5 <= a <= b < 1.0):
        raise DomainError(f"need 1/2 <= a <= b < 1, got a={a}, b={b}")
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"need rho in [0, 1], got {rho}")
    root = math.sqrt(a * (1 - a) * b * (1 - b))
    hi = min(a * (1 - b), rho * (a * (1 - b) + root) / 2)
    lo = max(-(1 - a) * (1 - b), -rho * ((1 - a) * (1 - b) + root) / 2)
    return lo, hi


@dataclass(frozen=True)
class BoundSet:
    a: float
    b: float
    rho: float
    C_ab: float
    rho_plus_point: float
    rho_minus_point: float
    theta_lo: float
    theta_hi: float
    rho_minus_def: float
    rho_circ: float
    rho_plus_def: float


def bound_set(rho, a, b):
    """All bound quantities for normalized biases ``1/2 <= a <= b < 1`` and ``rho in [0, 1]``."""
    lo, hi = theta_interval(rho, a, b)
    C = float(schwarz_constant(a, b))
    C_neg = float(schwarz_constant(1 - a, b))
    rho_minus, rho_circ, rho_plus = special_points(a, b)
    return BoundSet(
        a=float(a),
        b=float(b),
        rho=float(rho),
        C_ab=C,
        rho_plus_point=min(rho, a * (1 - b) / C),
        rho_minus_point=min(rho, (1 - a) * (1 - b) / C_neg),
        theta_lo=lo,
        theta_hi=hi,
        rho_minus_def=rho_minus,
        rho_circ=rho_circ,
        rho_plus_def=rho_plus,
    )


def special_points(alpha, beta):
    """``(rho_-, rho_o, rho_+)``: max/min of ``alpha beta`` and ``alpha' beta'`` over C, and the cap."""
    C = float(schwarz_constant(alpha, beta))
    hi = max(alpha * beta, (1 - alpha) * (1 - beta))
    lo = min(alpha * beta, (1 - alpha) * (1 - beta))
    return hi / C, lo / C, alpha * (1 - beta) / C


# --- phi -------------------------------------------------------------------------


def _check_pair(alpha, beta, strict=False):
    ok = 0.0 < alpha < beta < 1.0 if strict else 0.0 < alpha <= beta < 1.0
    if not ok:
        raise DomainError(f"(alpha, beta) = ({alpha}, {beta}) outside 0 < alpha < beta < 1")


def phi_array(rho, alpha, beta):
    """Vectorized ``phi`` with no domain checks."""
    rho = np.asarray(rho, dtype=float)
    C = schwarz_constant(alpha, beta)
    p = (1 + rho) / 2
    return 1.0 - (plogp(p) + plogp(1 - p)) - xi_array(rho * C, alpha, beta)


def phi(rho, alpha, beta):
    """``1 - h((1 + rho)/2) - xi(rho C(alpha, beta), alpha, beta)`` in bits.

    Defined for ``0 < alpha <= beta < 1`` (the diagonal is the equal-bias case)
    and ``0 <= rho <= alpha(1-beta)/C``.
    """
    _check_pair(alpha, beta)
    cap = rho_cap(alpha, beta)
    if rho < 0 or rho > cap + EDGE_TOL:
        raise DomainError(f"rho={rho} outside [0, {cap}]")
    return float(phi_array(min(rho, cap), alpha, beta))


def _factors(rho, alpha, beta, C):
    return (
        (1 - alpha) * beta - C * rho,
        alpha * (1 - beta) - C * rho,
        (1 - alpha) * (1 - beta) + C * rho,
        alpha * beta + C * rho,
    )


def phi_derivs(rho, alpha, beta):
    """Closed-form ``(phi', phi'')`` in ``rho`` for ``rho in [0, rho_+)``."""
    _check_pair(alpha, beta)
    C = float(schwarz_constant(alpha, beta))
    cap = alpha * (1 - beta) / C
    if not 0.0 <= rho < cap:
        raise DomainError(f"rho={rho} outside [0, {cap})")
    l1, l2, l3, l4 = _factors(rho, alpha, beta, C)
    d1 = 0.5 * math.log2((1 + rho) / (1 - rho)) + C * math.log2((l1 * l2) / (l4 * l3))
    d2 = (C * C / LN2) * (1.0 / (C * C * (1 - rho * rho)) - 1 / l1 - 1 / l2 - 1 / l3 - 1 / l4)
    return d1, d2


# --- the cubic numerator of phi'' ---------------------------------------------------


@dataclass(frozen=True)
class CubicPoly:
    """``p(rho) = c0 + c1 rho + c2 rho^2 + c3 rho^3`` for a fixed ``(alpha, beta)``.

    ``dropped`` holds the expanded degree-4 and degree-5 coefficients, which
    cancel analytically; ``scale`` is the largest magnitude among all six.
    """

    c0: float
    c1: float
    c2: float
    c3: float
    alpha: float = float("nan")
    beta: float = float("nan")
    scale: float = 1.0
    dropped: tuple = field(default=(0.0, 0.0))

    @property
    def coeffs(self):
        return np.array([self.c0, self.c1, self.c2, self.c3])

    def __call__(self, rho):
        return P.polyval(rho, self.coeffs)


def p_direct(rho, alpha, beta):
    """The numerator of ``phi''`` evaluated straight from its product form."""
    C = schwarz_constant(alpha, beta)
    l1, l2, l3, l4 = _factors(np.asarray(rho, dtype=float), alpha, beta, C)
    return l1 * l2 * l3 * l4 - C * C * (1 - rho * rho) * (
        l2 * l3 * l4 + l1 * l3 * l4 + l1 * l2 * l4 + l1 * l2 * l3
    )


def p_cubic(alpha, beta):
    """Expand the numerator by coefficient arithmetic and check it is a cubic."""
    _check_pair(alpha, beta, strict=True)
    C = float(schwarz_constant(alpha, beta))
    l1 = np.array([(1 - alpha) * beta, -C])
    l2 = np.array([alpha * (1 - beta), -C])
    l3 = np.array([(1 - alpha) * (1 - beta), C])
    l4 = np.array([alpha * beta, C])
    mul = P.polymul
    triple_sum = P.polyadd(
        P.polyadd(mul(mul(l2, l3), l4), mul(mul(l1, l3), l4)),
        P.polyadd(mul(mul(l1, l2), l4), mul(mul(l1, l2), l3)),
    )
    full = P.polysub(
        mul(mul(mul(l1, l2), l3), l4),
        mul(np.array([C * C, 0.0, -C * C]), triple_sum),
    )
    full = np.pad(full, (0, 6 - len(full)))
    scale = float(np.max(np.abs(full)))
    if abs(full[4]) > DEGREE_TOL * scale or abs(full[5]) > DEGREE_TOL * scale:
        raise DegreeCollapseViolation(
            f"degree-4/5 coefficients {full[4]:.3e}, {full[5]:.3e} at ({alpha}, {beta})"
        )
    return CubicPoly(*(float(c) for c in full[:4]), alpha=alpha, beta=beta,
                     scale=scale, dropped=(float(full[4]), float(full[5])))


def _sign_changes(values):
    signs = np.sign(values)
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def negative_root_witness(p):
    """The point ``-rho_o`` (if ``rho_o <= 1``) or ``-rho_-`` where ``p`` is non-positive.

    Returns ``(branch, point, value)``.
    """
    rho_minus, rho_circ, _ = special_points(p.alpha, p.beta)
    if rho_circ <= 1.0:
        return "rho_circ", -rho_circ, float(p(-rho_circ))
    return "rho_minus", -rho_minus, float(p(-rho_minus))


def isolate_root(p, rho_plus):
    """The unique sign change ``rho*`` of ``p`` in ``(0, rho_plus)``, by bisection.

    Also asserts that a 10^4-point scan sees no other sign change and, when
    ``p`` knows its ``(alpha, beta)``, that ``p`` has a root at ``rho <= 0``.
    """
    p0, p_end = float(p(0.0)), float(p(rho_plus))
    if not (p0 > 0 and p_end < 0):
        raise SignPatternViolation(f"need p(0) > 0 > p(rho_+), got {p0:.3e}, {p_end:.3e}")
    grid = np.linspace(0.0, rho_plus, SCAN_POINTS + 2)
    changes = _sign_changes(p(grid))
    if changes != 1:
        raise SignPatternViolation(f"{changes} sign changes of p on (0, {rho_plus})")
    if not math.isnan(p.alpha):
        branch, point, value = negative_root_witness(p)
        if value > EDGE_TOL * p.scale:
            raise SignPatternViolation(f"p({point}) = {value:.3e} > 0 ({branch} branch)")
    lo, hi = 0.0, float(rho_plus)
    while hi - lo > ROOT_WIDTH:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if p(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --- change of variables, psi and gamma --------------------------------------------


def transform_to_cx(alpha, beta):
    _check_pair(alpha, beta, strict=True)
    ratio = alpha * (1 - beta) / ((1 - alpha) * beta)
    return math.log(alpha / beta) / math.log(ratio), math.sqrt(ratio)


def transform_to_ab(c, x):
    _check_unit_square(c, x)
    x2 = x * x
    return (x ** (2 * c) - x2) / (1 - x2), (1 - x ** (2 - 2 * c)) / (1 - x2)


def _check_unit_square(c, x):
    if not (0.0 < c < 1.0 and 0.0 < x < 1.0):
        raise DomainError(f"(c, x) = ({c}, {x}) outside (0, 1)^2")


def _psi_terms(c, x):
    """``psi`` with the logs regrouped so no ``0 * inf`` or large cancellation occurs.

    Uses ``h(x^2) - u h(v) - v h(u) = -(1-x^2) log(1-x^2) + u(1-v) log(1-v)
    + v(1-u) log(1-u)`` with ``u = x^(2c)``, ``v = x^(2-2c)``.
    """
    if x == 0.0:
        return 0.0
    lx = math.log(x)
    u = math.exp(2 * c * lx)
    v = math.exp((2 - 2 * c) * lx)
    one_u = -math.expm1(2 * c * lx)
    one_v = -math.expm1((2 - 2 * c) * lx)
    one_x2 = -math.expm1(2 * lx)
    mixed = (u * one_v * math.log1p(-v) + v * one_u * math.log1p(-u)) / one_x2
    return 1.0 - binary_entropy((1 + 3 * x) / (2 + 2 * x)) + (mixed - math.log1p(-x * x)) / LN2


def psi(c, x):
    """``phi`` at the cap ``rho_+`` written in the ``(c, x)`` coordinates, in bits."""
    _check_unit_square(c, x)
    return _psi_terms(c, x)


def psi_direct(c, x):
    """``psi`` from the unsimplified expression, for cross-checks away from the edges."""
    _check_unit_square(c, x)
    alpha, beta = transform_to_ab(c, x)
    return (1 - binary_entropy(0.5 + x / (1 + x)) - binary_entropy(alpha)
            + beta * binary_entropy(x ** (2 * c)))


def psi_prime(c, x):
    """``d psi / d c``."""
    _check_unit_square(c, x)
    lx = math.log(x)
    u = x ** (2 * c)
    v = x ** (2 * (1 - c))
    bracket = 2 * u * c * lx + v * math.log1p(-u) - u * math.log(u - x * x)
    return 2 * lx / ((x * x - 1) * LN2) * bracket


def psi_second_deriv(c, x):
    """``d^2 psi / d c^2``; positive on the open unit square."""
    _check_unit_square(c, x)
    lx = math.log(x)
    u = x ** (2 * c)
    w = x ** (2 * (1 - c))
    first = 1 / (x ** (-2 * (1 - c)) - 1) + math.log1p(-w)
    second = (x * x / x ** (4 * c)) * (math.log1p(-u) + 1 / (x ** (-2 * c) - 1))
    return 4 * lx * lx * u / ((1 - x * x) * LN2) * (first + second)


def lemma2_margin(x):
    """``1 / (1/x - 1) + log(1 - x)``, positive on ``(0, 1)``."""
    return 1 / (1 / x - 1) + math.log1p(-x)


def gamma_fn(x):
    """``psi(1/2, x)``, extended to ``x = 0``."""
    if not 0.0 <= x < 1.0:
        raise DomainError(f"x={x} outside [0, 1)")
    return _psi_terms(0.5, x)


def gamma_prime(x):
    if not 0.0 <= x < 1.0:
        raise DomainError(f"x={x} outside [0, 1)")
    return math.log2((1 + 3 * x) * (1 - x)) / (1 + x) ** 2


# --- equal-bias derivatives -----------------------------------------------------------


def uniqueness_derivs(rho, a):
    """``(d phi/d rho, d^2 phi/d rho^2)`` on the diagonal ``alpha = beta = a``."""
    if not (0.5 < a < 1.0 and 0.0 < rho < 1.0):
        raise DomainError(f"need a in (1/2, 1) and rho in (0, 1), got a={a}, rho={rho}")
    abar = 1 - a
    rbar = 1 - rho
    d1 = 0.5 * math.log2((1 + rho) / (1 - rho)) - a * abar * math.log2(rho / (a * abar * rbar**2) + 1)
    d2 = rho * (1 - 2 * a) ** 2 / (LN2 * (a + rho * abar) * (1 - a * rbar) * (1 - rho * rho))
    return d1, d2


# --- grid certificate ---------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Resolution of the certificate grid: interior points per axis."""

    alpha: int = 50
    beta: int = 50
    rho: int = 20

    def __post_init__(self):
        if min(self.alpha, self.beta, self.rho) < 2:
            raise DomainError("grid resolution must be >= 2 per axis")

    @classmethod
    def parse(cls, text):
        parts = text.lower().replace("×", "x").split("x")
        if len(parts) != 3:
            raise DomainError(f"grid must look like AxBxR, got {text!r}")
        return cls(*(int(p) for p in parts))

    def cells(self):
        """``(alpha, beta)`` pairs with ``alpha < beta`` on the interior lattice."""
        alphas = [i / (self.alpha + 1) for i in range(1, self.alpha + 1)]
        betas = [j / (self.beta + 1) for j in range(1, self.beta + 1)]
        return [(a, b) for a in alphas for b in betas if a < b]


NEAR_ZERO_RHO = 1e-6


def cell_certificate(alpha, beta):
    """Sign-pattern certificate of the cubic at one ``(alpha, beta)``."""
    C = float(schwarz_constant(alpha, beta))
    record = {
        "alpha": alpha,
        "beta": beta,
        "gram_margin": alpha * (1 - alpha) * beta * (1 - beta) - C * C,
        "ok": False,
        "rho_star": None,
        "branch": None,
        "error": None,
    }
    try:
        p = p_cubic(alpha, beta)
        cap = alpha * (1 - beta) / C
        record["rho_star"] = isolate_root(p, cap)
        record["branch"] = negative_root_witness(p)[0]
        record["ok"] = record["gram_margin"] > 0
        if not record["ok"]:
            record["error"] = "alpha a' beta b' <= C^2"
    except (DegreeCollapseViolation, SignPatternViolation) as exc:
        record["error"] = str(exc)
    return record


def _lemma1_chunk(args):
    cells, n_rho, tolerance = args
    out = []
    steps = np.arange(1, n_rho + 1) / n_rho
    for alpha, beta in cells:
        cap = float(rho_cap(alpha, beta))
        rhos = np.minimum(steps * cap, cap)
        values = phi_array(rhos, alpha, beta)
        near = float(phi_array(NEAR_ZERO_RHO, alpha, beta))
        out.append({
            "rhos": rhos,
            "phi": values,
            "near_zero": near,
            "cert": cell_certificate(alpha, beta),
        })
    return out


@dataclass
class Lemma1Report:
    grid: GridSpec
    tolerance: float
    cells: int
    evaluations: int
    min_phi: float
    argmin: tuple  # (rho, alpha, beta)
    violations: int
    certificates_failed: int
    near_zero_max_phi: float
    min_gram_margin: float
    branches: dict
    rows: list = field(default_factory=list, repr=False)
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return self.violations == 0 and self.certificates_failed == 0 and self.min_phi > 0

    def to_dict(self):
        return {
            "schema": 1,
            "grid": asdict(self.grid),
            "tolerance": self.tolerance,
            "cells": self.cells,
            "evaluations": self.evaluations,
            "min_phi": self.min_phi,
            "argmin": list(self.argmin),
            "violations": self.violations,
            "certificates_failed": self.certificates_failed,
            "near_zero_rho": NEAR_ZERO_RHO,
            "near_zero_max_phi": self.near_zero_max_phi,
            "min_gram_margin": self.min_gram_margin,
            "negative_root_branches": dict(sorted(self.branches.items())),
            "failures": self.failures,
            "passed": self.passed,
        }


def verify_lemma1(grid=None, tolerance=TOL, workers=1, chunk=64):
    """Evaluate ``phi`` over the admissible region and certify the cubic per cell."""
    grid = grid or GridSpec()
    cells = grid.cells()
    chunks = [(cells[i:i + chunk], grid.rho, tolerance) for i in range(0, len(cells), chunk)]
    results = [r for part in ordered_map(_lemma1_chunk, chunks, workers) for r in part]

    min_phi, argmin = math.inf, (math.nan, math.nan, math.nan)
    violations = failed = 0
    near_max = -math.inf
    gram_min = math.inf
    branches = {}
    rows, failures = [], []
    for (alpha, beta), res in zip(cells, results):
        for rho, value in zip(res["rhos"], res["phi"]):
            rows.append((alpha, beta, float(rho), float(value)))
            if value < min_phi:
                min_phi, argmin = float(value), (float(rho), alpha, beta)
            if value < -tolerance:
                violations += 1
        near_max = max(near_max, res["near_zero"])
        cert = res["cert"]
        gram_min = min(gram_min, cert["gram_margin"])
        if cert["branch"]:
            branches[cert["branch"]] = branches.get(cert["branch"], 0) + 1
        if not cert["ok"]:
            failed += 1
            failures.append({"alpha": alpha, "beta": beta, "error": cert["error"]})
    return Lemma1Report(
        grid=grid,
        tolerance=tolerance,
        cells=len(cells),
        evaluations=len(rows),
        min_phi=min_phi,
        argmin=argmin,
        violations=violations,
        certificates_failed=failed,
        near_zero_max_phi=near_max,
        min_gram_margin=gram_min,
        branches=branches,
        rows=rows,
        failures=failures,
    )
