"""Closed-form correlation values and visibilities at alpha = 0 and alpha = pi/2.

All expressions are rewritten in forms that stay finite for large gain:
sinh^2/cosh(2g) = tanh^2/(1 + tanh^2), ln(sech^2 g) = -2 ln cosh g, and
the rate visibility as 1 / (2 - 2 ln(cosh g) / sinh^2 g).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .source import log_cosh


def _sech2(gamma: float) -> float:
    return math.exp(-2.0 * log_cosh(gamma))


def g_indistinguishable(gamma: float) -> float:
    """G_Q at alpha = 0: sinh^2(g) sech(2g) / 4."""
    t2 = math.tanh(gamma) ** 2
    return 0.25 * t2 / (1.0 + t2)


def g_distinguishable(gamma: float) -> float:
    """G_Q at alpha = pi/2: (2 - sech 2g) / 8."""
    return (2.0 - math.exp(-log_cosh(2.0 * gamma))) / 8.0


def _u_minus_log1p(u: float) -> float:
    """u - log(1 + u) without cancellation for small u."""
    if u > 0.1:
        return u - math.log1p(u)
    total, term, k = 0.0, u, 1
    while True:
        k += 1
        term *= -u
        step = -term / k
        total += step
        if abs(step) <= 1e-17 * total:
            return total


def c_indistinguishable(gamma: float) -> float:
    """C_Q at alpha = 0: (tanh^2 g + sech^2 g ln sech^2 g) / 8."""
    if gamma < 1.0:
        # with u = sinh^2 g this is (u - ln(1 + u)) / (8 (1 + u))
        u = math.sinh(gamma) ** 2
        return _u_minus_log1p(u) / (8.0 * (1.0 + u))
    return (math.tanh(gamma) ** 2 - 2.0 * _sech2(gamma) * log_cosh(gamma)) / 8.0


def c_distinguishable(gamma: float) -> float:
    """C_Q at alpha = pi/2: (2 tanh^2 g + sech^2 g ln sech^2 g) / 8."""
    return (2.0 * math.tanh(gamma) ** 2 - 2.0 * _sech2(gamma) * log_cosh(gamma)) / 8.0


def visibility_g(gamma: float) -> float:
    """1 / (2 - sech 2g); the analytic limit 1 at g = 0."""
    return 1.0 / (2.0 - math.exp(-log_cosh(2.0 * gamma)))


def visibility_c(gamma: float) -> float:
    """sinh^2 g / (cosh 2g + ln sech^2 g - 1); the analytic limit 1 at g = 0."""
    if gamma == 0:
        return 1.0
    if gamma > 350.0:
        # sinh^2 overflows; ln(cosh)/sinh^2 is far below rounding there
        return 0.5
    return 1.0 / (2.0 - 2.0 * log_cosh(gamma) / math.sinh(gamma) ** 2)


@dataclass(frozen=True)
class ClosedFormSet:
    gamma: float
    g0: float
    c0: float
    gpi2: float
    cpi2: float
    vg: float
    vc: float
    # True when vg/vc are analytic limits rather than evaluated ratios (gamma = 0)
    limit: bool = False


def eval_closed(gamma: float) -> ClosedFormSet:
    """All six closed-form values at gain ``gamma``."""
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma!r}")
    if gamma == 0:
        return ClosedFormSet(0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, limit=True)
    return ClosedFormSet(
        gamma=gamma,
        g0=g_indistinguishable(gamma),
        c0=c_indistinguishable(gamma),
        gpi2=g_distinguishable(gamma),
        cpi2=c_distinguishable(gamma),
        vg=visibility_g(gamma),
        vc=visibility_c(gamma),
    )
