"""Intensity (G_Q) and rate (C_Q) correlators on output states, and HOM visibilities.

Detectors do not resolve the perpendicular sub-modes, so the photon number
seen at output a is ``n_a = j + k`` and at output b ``n_b = l + m``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import closed_forms
from .beamsplitter import expand_output
from .errors import SweepPointError, UndefinedRatioError, UndefinedVisibilityError
from .fock import Occupation4, SparseState, expectation
from .source import DEFAULT_TAIL, SourceParams, choose_truncation

ALPHA_ENDPOINTS = (0.0, math.pi / 2)


@dataclass(frozen=True)
class CorrelationPair:
    g_q: float
    c_q: float
    g_numerator: float
    g_denominator: float


@dataclass(frozen=True)
class VisibilityRecord:
    """One sweep point.

    For lossless records ``g_at_*`` are G_Q ratios; for lossy records
    (``eta < 1`` or built by the loss model) they are the un-normalized
    product averages, whose denominator cancels in the visibility.
    """

    gamma: float
    eta: float
    g_at_0: float
    g_at_pi2: float
    c_at_0: float
    c_at_pi2: float
    v_g: float
    v_c: float
    n_max: int

    @property
    def delta_v(self) -> float:
        return self.v_c - self.v_g


def coincidence_product(o: Occupation4):
    return o.n_a * o.n_b


def total_squared(o: Occupation4):
    return o.total**2


def rate_product(o: Occupation4):
    """n_a n_b / (n_a + n_b)^2, set to 0 on the vacuum."""
    total = np.asarray(o.total, dtype=np.float64)
    prod = np.asarray(o.n_a * o.n_b, dtype=np.float64)
    return np.divide(prod, total**2, out=np.zeros_like(prod), where=total > 0)


def g_q(state: SparseState) -> tuple[float, float, float]:
    """``(numerator, denominator, value)`` of <n_a n_b> / <(n_a + n_b)^2>."""
    num = expectation(state, coincidence_product)
    den = expectation(state, total_squared)
    if den <= 0.0:
        raise UndefinedRatioError("G_Q is undefined on the vacuum", denominator=den)
    return num, den, num / den


def c_q(state: SparseState) -> float:
    """<n_a n_b / (n_a + n_b)^2> with the vacuum projected out."""
    return expectation(state, rate_product)


def correlations(state: SparseState) -> CorrelationPair:
    num, den, value = g_q(state)
    return CorrelationPair(g_q=value, c_q=c_q(state), g_numerator=num, g_denominator=den)


def visibility(f_at_0: float, f_at_pi2: float) -> float:
    """Relative dip depth (f(pi/2) - f(0)) / f(pi/2)."""
    if f_at_pi2 == 0:
        raise UndefinedVisibilityError("visibility undefined: correlator vanishes at alpha = pi/2")
    return (f_at_pi2 - f_at_0) / f_at_pi2


def resolve_truncation(gamma: float, n_max: int | None, tail: float = DEFAULT_TAIL) -> int:
    return choose_truncation(gamma, tail) if n_max is None else int(n_max)


def lossless_record(gamma: float, n_max: int | None = None, tail: float = DEFAULT_TAIL) -> VisibilityRecord:
    """Visibility record from the truncated Fock sums at perfect detection."""
    n = resolve_truncation(gamma, n_max, tail)
    if gamma == 0:
        raise UndefinedVisibilityError("visibility undefined at gamma = 0 (vacuum input)")
    g0 = correlations(expand_output(SourceParams(gamma, 0.0, n)))
    gp = correlations(expand_output(SourceParams(gamma, math.pi / 2, n)))
    return VisibilityRecord(
        gamma=gamma,
        eta=1.0,
        g_at_0=g0.g_q,
        g_at_pi2=gp.g_q,
        c_at_0=g0.c_q,
        c_at_pi2=gp.c_q,
        v_g=visibility(g0.g_q, gp.g_q),
        v_c=visibility(g0.c_q, gp.c_q),
        n_max=n,
    )


def closed_record(gamma: float) -> VisibilityRecord:
    """Record from the closed forms; undefined at zero gain like the Fock path."""
    if gamma == 0:
        raise UndefinedVisibilityError("visibility undefined at gamma = 0 (vacuum input)")
    ref = closed_forms.eval_closed(gamma)
    return VisibilityRecord(gamma, 1.0, ref.g0, ref.gpi2, ref.c0, ref.cpi2, ref.vg, ref.vc, n_max=-1)


def _sweep_point(gamma, eta, n_max, tail, method="fock"):
    try:
        if method == "closed":
            return closed_record(gamma)
        if eta == 1.0:
            return lossless_record(gamma, n_max, tail)
        from .loss import DetectionModel, visibility_eta

        return visibility_eta(gamma, DetectionModel(eta), resolve_truncation(gamma, n_max, tail))
    except Exception as exc:  # noqa: BLE001 - re-raised with the gain attached
        raise SweepPointError(gamma, exc) from exc


def sweep(
    gammas: Sequence[float],
    detection=None,
    *,
    n_max: int | None = None,
    tail: float = DEFAULT_TAIL,
    method: str = "fock",
    workers: int = 1,
) -> list[VisibilityRecord]:
    """Visibility records at each gain, in input order.

    ``detection`` is a :class:`homrates.loss.DetectionModel` or ``None`` for
    perfect detection.  ``n_max=None`` picks the cutoff per gain from ``tail``.
    ``method="closed"`` evaluates the closed forms instead (perfect detection
    only; records carry ``n_max=-1``), which is the only option at gains
    where the truncated sums would need thousands of pairs.
    A failing point raises :class:`SweepPointError` carrying its gain.
    """
    gammas = [float(g) for g in gammas]
    if not gammas:
        raise ValueError("gammas must be non-empty")
    if any(g < 0 for g in gammas):
        raise ValueError("all gammas must be >= 0")
    eta = 1.0 if detection is None else float(detection.eta)
    if method not in ("fock", "closed"):
        raise ValueError(f"method must be 'fock' or 'closed', got {method!r}")
    if method == "closed" and eta != 1.0:
        raise ValueError("closed forms exist only for perfect detection")
    args = [(g, eta, n_max, tail, method) for g in gammas]
    if workers <= 1:
        return [_sweep_point(*a) for a in args]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_point, *zip(*args)))
