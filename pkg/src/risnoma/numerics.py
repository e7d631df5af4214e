"""Special functions and Gauss-Laguerre quadrature.

Everything here is a pure function of scalar inputs. The outage formulas only
ever need the *regularized* lower incomplete gamma function and a quadrature
rule against the weight ``exp(-x)`` on ``[0, inf)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "NumericalError",
    "QuadratureRule",
    "ln_gamma",
    "reg_lower_inc_gamma",
    "reg_upper_inc_gamma",
    "laguerre",
    "gauss_laguerre",
    "MAX_GAMMA_SHAPE",
    "MAX_QUADRATURE_ORDER",
]

MAX_GAMMA_SHAPE = 2000.0
MAX_QUADRATURE_ORDER = 256

_ITMAX = 500
_EPS = 1e-15
_FPMIN = 1e-300

# rescale the Laguerre recurrence before it overflows
_BIG = 1e150
_LOG_BIG = math.log(_BIG)


class NumericalError(ArithmeticError):
    """An iterative method failed to converge."""


def _check_finite(name: str, x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"{name} must be finite, got {x!r}")
    return x


def ln_gamma(x: float) -> float:
    """Natural log of the Gamma function for ``x > 0``."""
    x = _check_finite("x", x)
    if x <= 0.0:
        raise ValueError(f"ln_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def _gser(s: float, x: float) -> float:
    # P(s, x) by the power series; good for x < s + 1
    ap = s
    term = 1.0 / s
    total = term
    for _ in range(_ITMAX):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(-x + s * math.log(x) - ln_gamma(s))
    raise NumericalError(f"series for P({s}, {x}) did not converge in {_ITMAX} terms")


def _gcf(s: float, x: float) -> float:
    # Q(s, x) by the modified Lentz continued fraction; good for x >= s + 1
    b = x + 1.0 - s
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _ITMAX + 1):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(-x + s * math.log(x) - ln_gamma(s)) * h
    raise NumericalError(f"continued fraction for Q({s}, {x}) did not converge in {_ITMAX} terms")


def reg_lower_inc_gamma(s: float, x: float) -> float:
    """Regularized lower incomplete gamma ``P(s, x) = gamma(s, x) / Gamma(s)``.

    Supported for ``0 < s <= 2000`` and ``x >= 0``; ``x = inf`` returns 1.
    Raises ``NumericalError`` if the series or continued fraction does not
    converge within 500 iterations.
    """
    s = _check_finite("s", s)
    x = float(x)
    if math.isnan(x):
        raise ValueError("x must not be NaN")
    if not 0.0 < s <= MAX_GAMMA_SHAPE:
        raise ValueError(f"shape s={s!r} outside supported range (0, {MAX_GAMMA_SHAPE:g}]")
    if x < 0.0:
        raise ValueError(f"x must be >= 0, got {x!r}")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < s + 1.0:
        return min(1.0, _gser(s, x))
    return max(0.0, 1.0 - _gcf(s, x))


def reg_upper_inc_gamma(s: float, x: float) -> float:
    """Complement ``Q(s, x) = 1 - P(s, x)``, accurate where ``P`` rounds to 1."""
    s = _check_finite("s", s)
    x = float(x)
    if math.isnan(x):
        raise ValueError("x must not be NaN")
    if not 0.0 < s <= MAX_GAMMA_SHAPE:
        raise ValueError(f"shape s={s!r} outside supported range (0, {MAX_GAMMA_SHAPE:g}]")
    if x < 0.0:
        raise ValueError(f"x must be >= 0, got {x!r}")
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < s + 1.0:
        return max(0.0, 1.0 - _gser(s, x))
    return min(1.0, _gcf(s, x))


def _laguerre_pair(n: int, x: float) -> tuple[float, float, float]:
    """Return ``(L_n, L_{n-1}, log_scale)`` with ``L_true = L * exp(log_scale)``.

    ``n >= 1``. Both polynomials share the same scale, so ratios are exact.
    """
    p_prev, p = 1.0, 1.0 - x
    log_scale = 0.0
    for j in range(1, n):
        p_prev, p = p, ((2 * j + 1 - x) * p - j * p_prev) / (j + 1)
        if abs(p) > _BIG:
            p /= _BIG
            p_prev /= _BIG
            log_scale += _LOG_BIG
    return p, p_prev, log_scale


def laguerre(n: int, x: float) -> float:
    """Laguerre polynomial ``L_n(x)`` (normalized so ``L_n(0) = 1``)."""
    if int(n) != n or n < 0:
        raise ValueError(f"degree must be a non-negative integer, got {n!r}")
    n = int(n)
    x = _check_finite("x", x)
    if n == 0:
        return 1.0
    p, _, log_scale = _laguerre_pair(n, x)
    if log_scale == 0.0:
        return p
    return p * math.exp(log_scale)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Laguerre rule: ``int_0^inf exp(-x) f(x) dx ~ sum(w * f(x))``."""

    order: int
    nodes: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if len(self.nodes) != self.order or len(self.weights) != self.order:
            raise ValueError("nodes and weights must both have length `order`")

    def integrate(self, f) -> float:
        """Apply the rule to a scalar callable ``f``."""
        return math.fsum(w * f(x) for x, w in zip(self.nodes, self.weights))


def _initial_guess(i: int, n: int, roots: list[float]) -> float:
    # asymptotic starting values for the zeros of L_n (Stroud & Secrest)
    if i == 0:
        return 3.0 / (1.0 + 2.4 * n)
    if i == 1:
        return roots[0] + 15.0 / (1.0 + 2.5 * n)
    ai = i - 1
    return roots[i - 1] + (1.0 + 2.55 * ai) / (1.9 * ai) * (roots[i - 1] - roots[i - 2])


@lru_cache(maxsize=32)
def gauss_laguerre(order: int) -> QuadratureRule:
    """Nodes and weights of the ``order``-point Gauss-Laguerre rule.

    Nodes are the zeros of ``L_order`` located by Newton iteration; weights are
    ``x / ((order + 1)^2 * L_{order+1}(x)^2)``. The rule is exact for
    polynomials of degree ``<= 2*order - 1``. For orders above ~180 the
    smallest weights fall below the double range and underflow to zero.
    """
    if int(order) != order or not 1 <= order <= MAX_QUADRATURE_ORDER:
        raise ValueError(f"order must be an integer in [1, {MAX_QUADRATURE_ORDER}], got {order!r}")
    n = int(order)
    roots: list[float] = []
    weights: list[float] = []
    for i in range(n):
        z = _initial_guess(i, n, roots)
        last_step = math.inf
        for _ in range(100):
            p, p_prev, _ = _laguerre_pair(n, z)
            # L_n'(z) = n (L_n - L_{n-1}) / z
            step = p / (n * (p - p_prev) / z)
            z -= step
            step = abs(step)
            if step <= 1e-15 * z:
                break
            # round-off floor: the step stopped shrinking once already tiny
            if step <= 1e-11 * z and step >= 0.5 * last_step:
                break
            last_step = step
        else:
            raise NumericalError(f"Newton iteration for root {i} of L_{n} did not converge")
        # polish and weigh in extended precision; the recurrence loses ~n ulps
        zl = np.longdouble(z)
        for _ in range(2):
            p, p_prev, _ = _laguerre_pair(n, zl)
            zl -= p / (n * (p - p_prev) / zl)
        z = float(zl)
        if z <= 0.0 or (roots and z <= roots[-1]):
            raise NumericalError(f"root {i} of L_{n} collided with its neighbour (z={z!r})")
        roots.append(z)
        p, p_prev, log_scale = _laguerre_pair(n, zl)
        # L_{n+1}(z) from one more recurrence step, in the same scale
        p_next = ((2 * n + 1 - zl) * p - n * p_prev) / (n + 1)
        log_w = np.log(zl) - 2 * np.log(np.longdouble(n + 1)) - 2 * (np.log(abs(p_next)) + log_scale)
        weights.append(float(np.exp(log_w)))
    return QuadratureRule(order=n, nodes=tuple(roots), weights=tuple(weights))
