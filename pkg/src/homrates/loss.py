"""Imperfect photon-number-resolving detection.

Every photon in every mode is registered independently with probability
``eta``.  The detected-count distribution is therefore the pre-loss
distribution pushed through a binomial kernel per mode.

Both correlators only see the totals (n_a, n_b) at the two outputs, and a
sum of independently thinned modes is the thinned sum, so the main path
marginalizes to a 2-D count table before applying the kernel.  The full
four-mode push-forward is kept for cross-checking.

The intensity correlator here is the bare average <n_a n_b> of detected
counts.  Its would-be normalization <(n_a + n_b)^2> depends only on the
total-photon distribution, which does not depend on alpha, so it cancels
in the visibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .beamsplitter import expand_output
from .correlations import VisibilityRecord, resolve_truncation, visibility
from .errors import CapacityError, UndefinedVisibilityError
from .fock import Occupation4, SparseState
from .source import DEFAULT_TAIL, SourceParams

LOSSY_NMAX = 8
MAX_DENSE_CELLS = 50_000_000


@dataclass(frozen=True)
class DetectionModel:
    eta: float = 1.0
    number_resolving: bool = True

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta!r}")
        if not self.number_resolving:
            raise ValueError("only number-resolving detectors are modelled")


class LossKernel:
    """Row-stochastic table ``c2[y, x]`` = P(detect x | y photons arrive)."""

    def __init__(self, eta: float, max_count: int):
        self.eta = float(eta)
        self.max_count = int(max_count)
        self.c2 = _kernel(self.eta, self.max_count)

    def __repr__(self) -> str:
        return f"LossKernel(eta={self.eta}, max_count={self.max_count})"


@lru_cache(maxsize=64)
def _kernel(eta: float, max_count: int) -> np.ndarray:
    table = np.zeros((max_count + 1, max_count + 1))
    lost = 1.0 - eta
    for y in range(max_count + 1):
        for x in range(y + 1):
            # 0.0 ** 0 == 1.0, so eta = 1 gives the identity exactly
            table[y, x] = math.comb(y, x) * lost ** (y - x) * eta**x
    table.setflags(write=False)
    return table


def lossy_outcome_distribution(state: SparseState, model: DetectionModel) -> dict[Occupation4, float]:
    """Probability of each detected four-mode occupation.

    Sums to ``1 - state.norm_deficit``.  Memory grows as the product of the
    per-mode occupation ranges; use the marginal path for large states.
    """
    if len(state) == 0:
        return {}
    occ = state.occupations
    dims = tuple(int(d) + 1 for d in occ.max(axis=0))
    cells = math.prod(dims)
    if cells > MAX_DENSE_CELLS:
        raise CapacityError(f"four-mode table needs {cells} cells", requested=cells, limit=MAX_DENSE_CELLS)
    table = np.zeros(dims)
    np.add.at(table, tuple(occ.T), state.probabilities)
    for axis, size in enumerate(dims):
        kernel = _kernel(model.eta, size - 1)
        table = np.moveaxis(np.tensordot(table, kernel, axes=([axis], [0])), -1, axis)
    hits = np.argwhere(table > 0)
    return {Occupation4(*map(int, idx)): float(table[tuple(idx)]) for idx in hits}


def lossy_count_distribution(state: SparseState, model: DetectionModel) -> np.ndarray:
    """``P[x_a, x_b]``: probability of detecting x_a photons at a and x_b at b."""
    if len(state) == 0:
        return np.zeros((1, 1))
    cols = state.columns()
    n_a, n_b = cols.n_a, cols.n_b
    table = np.zeros((int(n_a.max()) + 1, int(n_b.max()) + 1))
    np.add.at(table, (n_a, n_b), state.probabilities)
    k_a = _kernel(model.eta, table.shape[0] - 1)
    k_b = _kernel(model.eta, table.shape[1] - 1)
    return k_a.T @ table @ k_b


def _count_moments(counts: np.ndarray) -> tuple[float, float, float]:
    x = np.arange(counts.shape[0])[:, None]
    y = np.arange(counts.shape[1])[None, :]
    prod = (x * y).astype(np.float64)
    tot2 = ((x + y) ** 2).astype(np.float64)
    rate = np.divide(prod, tot2, out=np.zeros_like(prod), where=tot2 > 0)
    return float(np.sum(counts * prod)), float(np.sum(counts * tot2)), float(np.sum(counts * rate))


def outcome_moments(distribution: dict[Occupation4, float]) -> tuple[float, float]:
    """``(<n_a n_b>, <rate product>)`` over a four-mode detected distribution."""
    g = c = 0.0
    for occ, p in distribution.items():
        na, nb = occ.n_a, occ.n_b
        g += p * na * nb
        if na + nb:
            c += p * na * nb / (na + nb) ** 2
    return g, c


def g_q_eta(state: SparseState, model: DetectionModel) -> float:
    """<n_a n_b> over detected counts (no normalization)."""
    return _count_moments(lossy_count_distribution(state, model))[0]


def g_denominator_eta(state: SparseState, model: DetectionModel) -> float:
    """<(n_a + n_b)^2> over detected counts."""
    return _count_moments(lossy_count_distribution(state, model))[1]


def c_q_eta(state: SparseState, model: DetectionModel) -> float:
    """<n_a n_b / (n_a + n_b)^2> over detected counts, zero when nothing is detected."""
    return _count_moments(lossy_count_distribution(state, model))[2]


def default_lossy_truncation(gamma: float, tail: float = DEFAULT_TAIL) -> int:
    """8 pairs below unit gain, otherwise the tail-based cutoff."""
    return LOSSY_NMAX if gamma < 1 else resolve_truncation(gamma, None, tail)


def visibility_eta(gamma: float, model: DetectionModel, n_max: int | None = None) -> VisibilityRecord:
    """Lossy visibilities at alpha = 0 and pi/2.

    ``g_at_*`` hold the un-normalized <n_a n_b>; ``v_g`` is computed from them.
    """
    if gamma == 0:
        raise UndefinedVisibilityError("visibility undefined at gamma = 0 (vacuum input)")
    n = default_lossy_truncation(gamma) if n_max is None else int(n_max)
    g0, _, c0 = _count_moments(lossy_count_distribution(expand_output(SourceParams(gamma, 0.0, n)), model))
    gp, _, cp = _count_moments(lossy_count_distribution(expand_output(SourceParams(gamma, math.pi / 2, n)), model))
    return VisibilityRecord(
        gamma=gamma,
        eta=model.eta,
        g_at_0=g0,
        g_at_pi2=gp,
        c_at_0=c0,
        c_at_pi2=cp,
        v_g=visibility(g0, gp),
        v_c=visibility(c0, cp),
        n_max=n,
    )
