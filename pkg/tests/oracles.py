"""High-precision reference implementations used only by the tests.

They evaluate the defining expressions with mpmath, independently of the
closed forms in ``boolcube.bounds``.
"""
import mpmath

DPS = 40


def _h(p):
    if p <= 0 or p >= 1:
        return mpmath.mpf(0)
    return -(p * mpmath.log(p, 2) + (1 - p) * mpmath.log(1 - p, 2))


def _xi(theta, a, b):
    cells = [a * b + theta, a * (1 - b) - theta, (1 - a) * b - theta, (1 - a) * (1 - b) + theta]
    joint = sum(-c * mpmath.log(c, 2) for c in cells if c > 0)
    return _h(a) + _h(b) - joint


def phi(rho, alpha, beta):
    with mpmath.workdps(DPS):
        rho, alpha, beta = mpmath.mpf(rho), mpmath.mpf(alpha), mpmath.mpf(beta)
        C = (alpha * (1 - beta) + mpmath.sqrt(alpha * (1 - alpha) * beta * (1 - beta))) / 2
        return 1 - _h((1 + rho) / 2) - _xi(rho * C, alpha, beta)


def psi(c, x):
    """phi at its cap, evaluated through the (alpha, beta) parametrization."""
    with mpmath.workdps(DPS):
        c, x = mpmath.mpf(c), mpmath.mpf(x)
        alpha = (x ** (2 * c) - x**2) / (1 - x**2)
        beta = (1 - x ** (2 - 2 * c)) / (1 - x**2)
        C = (alpha * (1 - beta) + mpmath.sqrt(alpha * (1 - alpha) * beta * (1 - beta))) / 2
        return phi(alpha * (1 - beta) / C, alpha, beta)


def central_differences(func, t, step):
    """(first, second) central differences of ``func`` at ``t`` in high precision."""
    with mpmath.workdps(DPS):
        t, step = mpmath.mpf(t), mpmath.mpf(step)
        lo, mid, hi = func(t - step), func(t), func(t + step)
        return float((hi - lo) / (2 * step)), float((hi - 2 * mid + lo) / step**2)
