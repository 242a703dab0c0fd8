"""Balanced beam splitter acting on the truncated squeezed-vacuum input.

Each pair sector n of the input is

    A_n (a^+ + b^+)^n (cos(alpha) (a^+ - b^+) + sin(alpha) (a_perp^+ - b_perp^+))^n |0>

after substituting the output modes.  For every power l of the perpendicular
factor we form the a/b polynomial (a + b)^n (a - b)^(n-l) with exact Python
integers, so terms from different index pairs that land on the same
occupation are summed exactly before anything is squared.  The magnitudes
are then assembled in log space, which keeps factorials of several hundred
photons finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError
from .fock import SparseState
from .source import SourceParams, log_pair_amplitude, mixing_weights

DEFAULT_MAX_TERMS = 20_000_000


@dataclass(frozen=True)
class BsConvention:
    """Output-mode substitution for the three occupied input modes.

    ``a1 -> (a + b)/sqrt2``, ``a2 -> (a + mode2_b_sign * b)/sqrt2`` and
    ``a2_perp -> (a_perp + perp_b_sign * b_perp)/sqrt2``.  Only the default
    (-1, -1) is unitary together with the mode-1 map; the fields exist so the
    convention is pinned in one place and can be perturbed in tests.
    """

    mode2_b_sign: int = -1
    perp_b_sign: int = -1

    def __post_init__(self):
        if self.mode2_b_sign not in (-1, 1) or self.perp_b_sign not in (-1, 1):
            raise ValueError("convention signs must be +1 or -1")


STANDARD = BsConvention()


def _log_binom(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _times_linear(poly: list[int], sign: int) -> list[int]:
    """Multiply a b-power coefficient list by (a + sign*b)."""
    out = poly + [0]
    for q in range(1, len(out)):
        out[q] += sign * poly[q - 1]
    return out


def _ab_polynomials(n: int, l_values: list[int], sign: int) -> dict[int, list[int]]:
    """Integer coefficients of (a+b)^n (a + sign*b)^(n-l), indexed by b-power."""
    poly = [math.comb(n, q) for q in range(n + 1)]
    out = {}
    for l in range(n, min(l_values) - 1, -1):
        if l in l_values:
            out[l] = poly
        if l > 0:
            poly = _times_linear(poly, sign)
    return out


def _sector_terms(n, log_an, cos_a, sin_a, convention, log_fact):
    """Occupations, log-magnitudes and signs of the 2n-photon sector."""
    if sin_a == 0.0:
        l_values = [0]
    elif cos_a == 0.0:
        l_values = [n]
    else:
        l_values = list(range(n + 1))
    log_cos = math.log(cos_a) if cos_a > 0 else 0.0
    log_sin = math.log(sin_a) if sin_a > 0 else 0.0
    polys = _ab_polynomials(n, l_values, convention.mode2_b_sign)

    occs, logs, signs = [], [], []
    for l in l_values:
        poly = polys[l]
        q = np.array([i for i, c in enumerate(poly) if c != 0], dtype=np.int64)
        if q.size == 0:
            continue
        log_c = np.array([math.log(abs(poly[i])) for i in q.tolist()])
        sign_c = np.array([1.0 if poly[i] > 0 else -1.0 for i in q.tolist()])
        p = np.arange(l + 1, dtype=np.int64)
        log_perp = np.array([_log_binom(l, i) for i in range(l + 1)])
        sign_perp = np.where(p % 2 == 1, float(convention.perp_b_sign), 1.0)

        qq, pp = np.meshgrid(q, p, indexing="ij")
        j = 2 * n - l - qq
        k = l - pp
        base = log_an + _log_binom(n, l) + (n - l) * log_cos + l * log_sin
        log_amp = (
            base
            + log_c[:, None]
            + log_perp[None, :]
            + 0.5 * (log_fact[j] + log_fact[k] + log_fact[qq] + log_fact[pp])
        )
        occs.append(np.stack([j, k, qq, pp], axis=-1).reshape(-1, 4).astype(np.int32))
        logs.append(log_amp.ravel())
        signs.append((sign_c[:, None] * sign_perp[None, :]).ravel())
    return occs, logs, signs


def _count_terms(params: SourceParams) -> int:
    cos_a, sin_a = mixing_weights(params.alpha)
    total = 0
    for n in range(params.n_max + 1):
        if sin_a == 0.0 or cos_a == 0.0:
            total += (n + 1) ** 2 if cos_a == 0.0 else n + 1
        else:
            total += sum((2 * n - l + 1) * (l + 1) for l in range(n + 1))
    return total


def _expand(params, convention, phase, max_terms):
    bound = _count_terms(params)
    if bound > max_terms:
        raise CapacityError(
            f"expansion at n_max={params.n_max} may need {bound} terms, above the bound {max_terms}",
            requested=bound,
            limit=max_terms,
        )
    cos_a, sin_a = mixing_weights(params.alpha)
    top = 2 * params.n_max
    log_fact = np.array([math.lgamma(i + 1) for i in range(top + 1)])

    occs, amps = [], []
    for n in range(params.n_max + 1):
        log_an = log_pair_amplitude(params.gamma, n)
        if log_an == -math.inf:
            break
        o, lg, sg = _sector_terms(n, log_an, cos_a, sin_a, convention, log_fact)
        if not o:
            continue
        amp = np.concatenate(sg) * np.exp(np.concatenate(lg))
        if phase is not None:
            # mode 2 contributes exactly n creation operators to this sector
            amp = amp * np.exp(1j * n * phase)
        occs.extend(o)
        amps.append(amp)
    return SparseState(np.concatenate(occs), np.concatenate(amps), params.n_max)


def expand_output(
    params: SourceParams,
    convention: BsConvention = STANDARD,
    *,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> SparseState:
    """Output state over (a, a_perp, b, b_perp) for the truncated input.

    Every term from pair sector n carries exactly 2n photons.  Raises
    :class:`CapacityError` if the expansion could exceed ``max_terms`` terms.
    """
    return _expand(params, convention, None, max_terms)


def expand_output_with_phase(
    params: SourceParams,
    phi: float,
    convention: BsConvention = STANDARD,
    *,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> SparseState:
    """Like :func:`expand_output` with input beam 2 shifted by ``exp(i*phi)``.

    The amplitudes are complex.  Only used to check phase insensitivity.
    """
    return _expand(params, convention, float(phi), max_terms)
