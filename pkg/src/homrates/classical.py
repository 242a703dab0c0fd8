"""Monte Carlo of classical stochastic pulse pairs on a balanced beam splitter.

Each run draws integrated input intensities (I1, I2) and independent
uniform phases.  The time integrals are collapsed into one number, the
pulse overlap |int E1 E2*|^2 / (I1 I2), so the outputs are

    I_a = (I1 + I2)/2 + sqrt(overlap I1 I2) cos(theta)
    I_b = (I1 + I2)/2 - sqrt(overlap I1 I2) cos(theta)

with theta = phi1 - phi2 + phi0 - Phi.  Phase-averaged cross terms are
not dropped by hand; they average out over the random phases.

Runs are split into fixed-size chunks, each with its own PCG64 stream
derived from ``SeedSequence(seed, spawn_key=(chunk,))``.  Per-chunk sums are
combined with ``math.fsum`` in chunk order, so results depend only on the
seed, never on the number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import SimulationError, UndefinedVisibilityError

INTENSITY_LAWS = ("fixed-equal", "exponential")
CHUNK_SIZE = 1 << 16
DEFAULT_RUNS = 1_000_000


@dataclass(frozen=True)
class ClassicalEnsemble:
    runs: int = DEFAULT_RUNS
    overlap: float = 1.0
    intensity_law: str = "fixed-equal"
    seed: int = 0
    phase_offset: float = 0.0
    control_phase: float = 0.0

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        if not 0.0 <= self.overlap <= 1.0:
            raise ValueError(f"overlap must lie in [0, 1], got {self.overlap}")
        if self.intensity_law not in INTENSITY_LAWS:
            raise ValueError(f"unknown intensity law {self.intensity_law!r}; choose from {INTENSITY_LAWS}")


@dataclass(frozen=True)
class ClassicalResult:
    g_mean: float
    c_mean: float
    g_stderr: float
    c_stderr: float
    singles_mean: float
    singles_stderr: float
    runs: int


@dataclass(frozen=True)
class ClassicalVisibility:
    v_g: float
    v_c: float
    v_g_stderr: float
    v_c_stderr: float


def _draw_intensities(rng: np.random.Generator, law: str, size: int) -> tuple[np.ndarray, np.ndarray]:
    if law == "fixed-equal":
        return np.ones(size), np.ones(size)
    return rng.exponential(1.0, size), rng.exponential(1.0, size)


def _chunk_sums(ens: ClassicalEnsemble, index: int) -> np.ndarray:
    size = min(CHUNK_SIZE, ens.runs - index * CHUNK_SIZE)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(ens.seed, spawn_key=(index,))))
    i1, i2 = _draw_intensities(rng, ens.intensity_law, size)
    phi1 = rng.uniform(0.0, 2 * np.pi, size)
    phi2 = rng.uniform(0.0, 2 * np.pi, size)

    # non-finite values are checked explicitly just below
    with np.errstate(invalid="ignore", over="ignore"):
        mean_part = 0.5 * (i1 + i2)
        interference = np.sqrt(ens.overlap * i1 * i2) * np.cos(phi1 - phi2 + ens.phase_offset - ens.control_phase)
        i_a = mean_part + interference
        i_b = mean_part - interference
    if not (np.all(np.isfinite(i_a)) and np.all(np.isfinite(i_b))):
        bad = int(np.flatnonzero(~(np.isfinite(i_a) & np.isfinite(i_b)))[0])
        raise SimulationError(
            f"non-finite output in chunk {index}, run {bad}: I1={i1[bad]!r}, I2={i2[bad]!r}"
        )

    i_tot = i1 + i2
    scale = np.maximum(i_tot, 1.0)
    if np.any(np.abs(i_a + i_b - i_tot) > 1e-12 * scale):
        raise SimulationError(f"energy not conserved in chunk {index}")
    product = i_a * i_b
    # Cauchy bound: interference^2 <= overlap I1 I2 <= (I1 + I2)^2 / 4
    if np.any(product < -1e-12 * scale**2):
        raise SimulationError(f"negative intensity product in chunk {index}")
    product = np.maximum(product, 0.0)
    rate = np.divide(product, i_tot**2, out=np.zeros_like(product), where=i_tot > 0)
    return np.array(
        [
            np.sum(product),
            np.sum(product**2),
            np.sum(rate),
            np.sum(rate**2),
            np.sum(i_a),
            np.sum(i_a**2),
        ]
    )


def _mean_and_stderr(total: float, total_sq: float, n: int) -> tuple[float, float]:
    mean = total / n
    if n < 2:
        return mean, math.inf
    var = max(0.0, (total_sq - n * mean * mean) / (n - 1))
    return mean, math.sqrt(var / n)


def sample_products(ensemble: ClassicalEnsemble, *, workers: int = 1) -> ClassicalResult:
    """Means and standard errors of I_a I_b, I_a I_b / I_tot^2 and I_a."""
    n_chunks = -(-ensemble.runs // CHUNK_SIZE)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda i: _chunk_sums(ensemble, i), range(n_chunks)))
    else:
        parts = [_chunk_sums(ensemble, i) for i in range(n_chunks)]
    totals = [math.fsum(col) for col in np.array(parts).T]
    n = ensemble.runs
    g, g_err = _mean_and_stderr(totals[0], totals[1], n)
    c, c_err = _mean_and_stderr(totals[2], totals[3], n)
    s, s_err = _mean_and_stderr(totals[4], totals[5], n)
    return ClassicalResult(g, c, g_err, c_err, s, s_err, n)


def _dip(f_min: float, e_min: float, f_max: float, e_max: float) -> tuple[float, float]:
    if f_max <= 0:
        raise UndefinedVisibilityError("maximum correlation is zero")
    v = (f_max - f_min) / f_max
    err = math.hypot(e_min / f_max, f_min * e_max / f_max**2)
    return v, err


def classical_visibility(
    ensemble_overlapped: ClassicalEnsemble,
    ensemble_orthogonal: ClassicalEnsemble,
    *,
    workers: int = 1,
) -> ClassicalVisibility:
    """Dip visibility (max - min)/max for both correlators, with delta-method errors."""
    if ensemble_overlapped.intensity_law != ensemble_orthogonal.intensity_law:
        raise ValueError("ensembles must share an intensity law")
    if ensemble_overlapped.runs != ensemble_orthogonal.runs:
        raise ValueError("ensembles must share the number of runs")
    r1 = sample_products(ensemble_overlapped, workers=workers)
    r2 = sample_products(ensemble_orthogonal, workers=workers)

    def ordered(m1, e1, m2, e2):
        return (m1, e1, m2, e2) if m1 <= m2 else (m2, e2, m1, e1)

    v_g, v_g_err = _dip(*ordered(r1.g_mean, r1.g_stderr, r2.g_mean, r2.g_stderr))
    v_c, v_c_err = _dip(*ordered(r1.c_mean, r1.c_stderr, r2.c_mean, r2.c_stderr))
    return ClassicalVisibility(v_g, v_c, v_g_err, v_c_err)
