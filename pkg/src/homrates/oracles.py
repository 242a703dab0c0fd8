"""Slow, independent reference computations.

Nothing here shares code with the optimized paths it checks: the
beam-splitter oracle multiplies out every linear factor one monomial at a
time, and the lossy oracle evaluates the explicit nested index sums for
the two endpoint angles.
"""

from __future__ import annotations

import cmath
import itertools
import math
from collections import defaultdict

from .source import SourceParams

_MODES = ("a", "a_perp", "b", "b_perp")


def brute_force_output(
    params: SourceParams,
    *,
    phi: float = 0.0,
    mode2_b_sign: int = -1,
    perp_b_sign: int = -1,
) -> dict[tuple[int, int, int, int], complex]:
    """Output amplitudes by exhaustive expansion of all 2n linear factors.

    Exponential in n; intended for ``n_max <= 4``.
    """
    g = params.gamma
    c, s = math.cos(params.alpha), math.sin(params.alpha)
    # exact endpoints, matching what a human would write by hand
    if params.alpha == 0:
        c, s = 1.0, 0.0
    elif abs(params.alpha - math.pi / 2) < 1e-12:
        c, s = 0.0, 1.0
    r = 1 / math.sqrt(2)
    ph = cmath.exp(1j * phi)
    factor1 = [("a", r), ("b", r)]
    factor2 = [
        ("a", ph * c * r),
        ("b", ph * c * r * mode2_b_sign),
        ("a_perp", ph * s * r),
        ("b_perp", ph * s * r * perp_b_sign),
    ]
    factor2 = [t for t in factor2 if t[1] != 0]

    out: dict[tuple[int, int, int, int], complex] = defaultdict(complex)
    for n in range(params.n_max + 1):
        pref = math.tanh(g) ** n / (math.factorial(n) * math.cosh(g))
        if pref == 0:
            continue
        for picks in itertools.product(*([factor1] * n + [factor2] * n)):
            coef = pref
            counts = dict.fromkeys(_MODES, 0)
            for mode, w in picks:
                coef *= w
                counts[mode] += 1
            key = tuple(counts[m] for m in _MODES)
            out[key] += coef
    result = {}
    for key, coef in out.items():
        amp = coef * math.sqrt(math.prod(math.factorial(x) for x in key))
        if amp != 0:
            result[key] = amp
    return result


def _pair_coefficient(gamma: float, n: int) -> float:
    return math.tanh(gamma) ** n / (math.factorial(n) * 2**n * math.cosh(gamma))


def _detect_prob(y: int, x: int, eta: float) -> float:
    return math.comb(y, x) * (1 - eta) ** (y - x) * eta**x


def index_sum_correlations(gamma: float, eta: float, distinguishable: bool, n_max: int) -> tuple[float, float]:
    """Lossy ``(G numerator, C)`` from the explicit nested sums.

    ``distinguishable=False`` is alpha = 0, where sector n splits into
    |2(n-k) in one output, 2k in the other>.  ``distinguishable=True`` is
    alpha = pi/2, with |k, l, n-k, n-l> over (a, a_perp, b, b_perp).
    """
    g_sum = 0.0
    c_sum = 0.0
    for n in range(n_max + 1):
        an = _pair_coefficient(gamma, n)
        if not distinguishable:
            for k in range(n + 1):
                z2 = (an * math.comb(n, k)) ** 2 * math.factorial(2 * k) * math.factorial(2 * (n - k))
                for l in range(2 * k + 1):
                    pl = _detect_prob(2 * k, l, eta)
                    for m in range(2 * (n - k) + 1):
                        w = z2 * pl * _detect_prob(2 * (n - k), m, eta)
                        g_sum += l * m * w
                        if l + m:
                            c_sum += l * m / (l + m) ** 2 * w
            continue
        for k in range(n + 1):
            for l in range(n + 1):
                z2 = (an * math.comb(n, k) * math.comb(n, l)) ** 2 * (
                    math.factorial(k) * math.factorial(l) * math.factorial(n - k) * math.factorial(n - l)
                )
                for m in range(k + 1):
                    for p in range(l + 1):
                        w_a = z2 * _detect_prob(k, m, eta) * _detect_prob(l, p, eta)
                        for s in range(n - k + 1):
                            for r in range(n - l + 1):
                                w = w_a * _detect_prob(n - k, s, eta) * _detect_prob(n - l, r, eta)
                                na, nb = m + p, s + r
                                g_sum += na * nb * w
                                if na + nb:
                                    c_sum += na * nb / (na + nb) ** 2 * w
    return g_sum, c_sum
