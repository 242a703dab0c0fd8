"""Truncated two-mode bright squeezed vacuum with a distinguishability angle."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CapacityError

DEFAULT_TAIL = 1e-12
MAX_TRUNCATION = 200
# Angles this close to pi/2 are treated as exactly pi/2 so cos vanishes exactly.
ANGLE_SNAP = 1e-12


@dataclass(frozen=True)
class SourceParams:
    """Gain ``gamma``, distinguishability angle ``alpha`` (radians) and pair cutoff ``n_max``.

    ``alpha`` rotates input mode 2 into its orthogonal partner before the
    beam splitter: 0 means fully indistinguishable, pi/2 fully distinguishable.
    """

    gamma: float
    alpha: float = 0.0
    n_max: int = 8

    def __post_init__(self):
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be finite and >= 0, got {self.gamma!r}")
        if not (0.0 <= self.alpha <= math.pi / 2 + ANGLE_SNAP):
            raise ValueError(f"alpha must lie in [0, pi/2], got {self.alpha!r}")
        if int(self.n_max) != self.n_max or self.n_max < 0:
            raise ValueError(f"n_max must be a non-negative integer, got {self.n_max!r}")


def mixing_weights(alpha: float) -> tuple[float, float]:
    """``(cos alpha, sin alpha)`` with the endpoints returned exactly."""
    if alpha == 0.0:
        return 1.0, 0.0
    if abs(alpha - math.pi / 2) <= ANGLE_SNAP:
        return 0.0, 1.0
    return math.cos(alpha), math.sin(alpha)


@dataclass(frozen=True)
class PairAmplitude:
    n: int
    a_n: float


def log_cosh(x: float) -> float:
    """log(cosh x), finite for any real x."""
    x = abs(x)
    if x < 1.0:
        # cosh x - 1 = 2 sinh^2(x/2), exact to rounding for small x
        return math.log1p(2.0 * math.sinh(0.5 * x) ** 2)
    return x + math.log1p(math.exp(-2.0 * x)) - math.log(2.0)


def log_pair_amplitude(gamma: float, n: int) -> float:
    """log A_n with A_n = tanh^n(gamma) / (n! 2^n cosh gamma); -inf when A_n = 0."""
    if n == 0:
        return -log_cosh(gamma)
    if gamma == 0:
        return -math.inf
    return n * math.log(math.tanh(gamma)) - math.lgamma(n + 1) - n * math.log(2.0) - log_cosh(gamma)


def pair_amplitudes(params: SourceParams) -> list[PairAmplitude]:
    """Operator-ordering coefficients A_n for n = 0..n_max.

    The photon-pair probability implied by A_n is tanh^(2n)(gamma)/cosh^2(gamma).
    """
    return [PairAmplitude(n, math.exp(log_pair_amplitude(params.gamma, n))) for n in range(params.n_max + 1)]


def pair_probability(gamma: float, n: int) -> float:
    """Probability of exactly n pairs."""
    if gamma == 0:
        return 1.0 if n == 0 else 0.0
    return math.exp(2 * n * math.log(math.tanh(gamma)) - 2 * log_cosh(gamma))


def tail_weight(gamma: float, n_max: int) -> float:
    """Probability of more than ``n_max`` pairs: tanh^(2(n_max+1))(gamma)."""
    if gamma == 0:
        return 0.0
    return math.exp(2 * (n_max + 1) * math.log(math.tanh(gamma)))


def choose_truncation(gamma: float, tail_tolerance: float = DEFAULT_TAIL, *, max_order: int = MAX_TRUNCATION) -> int:
    """Smallest pair cutoff whose discarded tail weight is below ``tail_tolerance``."""
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma!r}")
    if not 0 < tail_tolerance < 1:
        raise ValueError(f"tail_tolerance must lie in (0, 1), got {tail_tolerance!r}")
    if gamma == 0:
        return 0
    log_t2 = 2 * math.log(math.tanh(gamma))
    if log_t2 == 0.0:
        raise CapacityError(f"gamma={gamma} is too large for any finite cutoff", requested=-1, limit=max_order)
    # tail(N) = exp((N+1) * log_t2) < tol; start from the analytic estimate and fix rounding by stepping.
    n = max(0, math.ceil(math.log(tail_tolerance) / log_t2) - 1)
    while n > 0 and tail_weight(gamma, n - 1) < tail_tolerance:
        n -= 1
    while tail_weight(gamma, n) >= tail_tolerance:
        n += 1
    if n > max_order:
        raise CapacityError(
            f"gamma={gamma} needs n_max={n} for tail {tail_tolerance:g}, above the cap {max_order}",
            requested=n,
            limit=max_order,
        )
    return n


def _second_moment_tail(gamma: float, n_max: int) -> float:
    """sum_{n > n_max} n^2 p_n / <n^2>, summed directly (no cancellation)."""
    log_t2 = 2 * math.log(math.tanh(gamma))
    total = math.sinh(gamma) ** 2 * math.cosh(2 * gamma)
    tail = 0.0
    n = n_max + 1
    while True:
        term = n * n * math.exp(n * log_t2 - 2 * log_cosh(gamma))
        tail += term
        if term < 1e-18 * tail:
            break
        n += 1
    return tail / total


def moment_truncation(gamma: float, rel_tolerance: float = DEFAULT_TAIL, *, max_order: int = MAX_TRUNCATION) -> int:
    """Smallest cutoff whose discarded share of <n^2> is below ``rel_tolerance``.

    Correlators are ratios of photon-number moments, so this bounds their
    truncation error more directly than the bare probability tail, which
    under-resolves small gains where <n_a n_b> is itself tiny.  The result
    is never below :func:`choose_truncation` at the same tolerance.
    """
    n = choose_truncation(gamma, rel_tolerance, max_order=max_order)
    if gamma == 0:
        return n
    while _second_moment_tail(gamma, n) >= rel_tolerance:
        n += 1
        if n > max_order:
            raise CapacityError(
                f"gamma={gamma} needs n_max>{max_order} for moment tail {rel_tolerance:g}",
                requested=n,
                limit=max_order,
            )
    return n
