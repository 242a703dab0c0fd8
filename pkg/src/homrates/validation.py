"""Oracle cross-checks bundled for the ``validate`` command."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Sequence

from . import closed_forms
from .beamsplitter import STANDARD, BsConvention, expand_output
from .classical import INTENSITY_LAWS, ClassicalEnsemble, classical_visibility
from .correlations import correlations, visibility
from .loss import DetectionModel, c_q_eta, g_q_eta, lossy_outcome_distribution, outcome_moments
from .oracles import brute_force_output, index_sum_correlations
from .source import DEFAULT_TAIL, SourceParams, choose_truncation, moment_truncation

GAMMA_GRID = (0.1, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5)
SERIES_RTOL = 1e-8
VIS_ATOL = 1e-5
REDUCTION_ATOL = 1e-10
TWO_PATH_ATOL = 1e-10
BRUTE_ATOL = 1e-13
# frozen from the closed forms at gain 1
VG_AT_1 = 0.576635
VC_AT_1 = 0.728948


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def _timed(name: str, fn: Callable[[], tuple[bool, str]]) -> CheckResult:
    start = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # noqa: BLE001 - a crash is a failed check
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(name, passed, detail, time.perf_counter() - start)


def endpoint_correlations(gamma: float, n_max: int, convention: BsConvention = STANDARD):
    c0 = correlations(expand_output(SourceParams(gamma, 0.0, n_max), convention))
    cp = correlations(expand_output(SourceParams(gamma, math.pi / 2, n_max), convention))
    return c0, cp


def check_series(gammas: Sequence[float], tail: float = DEFAULT_TAIL, convention: BsConvention = STANDARD):
    # cutoff from the <n^2> tail: the probability tail alone leaves ~1e-7 error at gain 0.1
    worst = 0.0
    for g in gammas:
        c0, cp = endpoint_correlations(g, moment_truncation(g, tail), convention)
        ref = closed_forms.eval_closed(g)
        pairs = [(c0.g_q, ref.g0), (cp.g_q, ref.gpi2), (c0.c_q, ref.c0), (cp.c_q, ref.cpi2)]
        worst = max(worst, max(abs(x - y) / abs(y) for x, y in pairs))
    return worst < SERIES_RTOL, f"max relative error {worst:.3e} over {len(gammas)} gains"


def check_visibilities_at_one(convention: BsConvention = STANDARD):
    c0, cp = endpoint_correlations(1.0, choose_truncation(1.0), convention)
    ref = closed_forms.eval_closed(1.0)
    values = {
        "fock V_G": (visibility(c0.g_q, cp.g_q), VG_AT_1),
        "fock V_C": (visibility(c0.c_q, cp.c_q), VC_AT_1),
        "closed V_G": (ref.vg, VG_AT_1),
        "closed V_C": (ref.vc, VC_AT_1),
    }
    err = max(abs(v - t) for v, t in values.values())
    return err < VIS_ATOL, ", ".join(f"{k}={v:.6f}" for k, (v, _) in values.items())


def check_eta_one_reduction(gammas=(0.25, 0.5, 1.0), n_max: int = 8):
    full = DetectionModel(1.0)
    worst = 0.0
    for g in gammas:
        for alpha in (0.0, math.pi / 2):
            state = expand_output(SourceParams(g, alpha, n_max))
            lossless = correlations(state)
            worst = max(
                worst,
                abs(g_q_eta(state, full) - lossless.g_numerator),
                abs(c_q_eta(state, full) - lossless.c_q),
            )
    return worst < REDUCTION_ATOL, f"max deviation {worst:.3e}"


def check_two_path_loss(gamma: float = 0.5, eta: float = 0.5, n_max: int = 8):
    model = DetectionModel(eta)
    worst = 0.0
    for distinguishable, alpha in ((False, 0.0), (True, math.pi / 2)):
        state = expand_output(SourceParams(gamma, alpha, n_max))
        g_modes, c_modes = outcome_moments(lossy_outcome_distribution(state, model))
        g_direct, c_direct = index_sum_correlations(gamma, eta, distinguishable, n_max)
        g_marg, c_marg = g_q_eta(state, model), c_q_eta(state, model)
        worst = max(
            worst,
            abs(g_modes - g_direct),
            abs(c_modes - c_direct),
            abs(g_marg - g_direct),
            abs(c_marg - c_direct),
        )
    return worst < TWO_PATH_ATOL, f"max deviation {worst:.3e}"


def check_classical_bound(runs: int = 1_000_000, seed: int = 2024):
    notes = []
    ok = True
    for law in INTENSITY_LAWS:
        v = classical_visibility(
            ClassicalEnsemble(runs, 1.0, law, seed),
            ClassicalEnsemble(runs, 0.0, law, seed + 1),
        )
        ok &= v.v_g <= 0.5 + 3 * v.v_g_stderr and v.v_c <= 0.5 + 3 * v.v_c_stderr
        if law == "fixed-equal":
            ok &= abs(v.v_g - 0.5) <= 3 * v.v_g_stderr and abs(v.v_c - 0.5) <= 3 * v.v_c_stderr
        notes.append(f"{law}: V_G={v.v_g:.4f}+-{v.v_g_stderr:.1e} V_C={v.v_c:.4f}+-{v.v_c_stderr:.1e}")
    return ok, "; ".join(notes)


def check_brute_force(gamma: float = 0.7, n_max: int = 4, convention: BsConvention = STANDARD):
    worst = 0.0
    for alpha in (0.0, math.pi / 4, math.pi / 2):
        params = SourceParams(gamma, alpha, n_max)
        fast = expand_output(params, convention).as_dict()
        slow = brute_force_output(params)
        keys = set(fast) | set(slow)
        worst = max(worst, max(abs(fast.get(k, 0.0) - slow.get(k, 0.0)) for k in keys))
    return worst <= BRUTE_ATOL, f"max amplitude deviation {worst:.3e}"


def run_all(
    gammas: Sequence[float] = GAMMA_GRID,
    *,
    runs: int = 1_000_000,
    seed: int = 2024,
    tail: float = DEFAULT_TAIL,
    convention: BsConvention = STANDARD,
) -> list[CheckResult]:
    return [
        _timed("series vs closed form", lambda: check_series(gammas, tail, convention)),
        _timed("visibilities at gain 1", lambda: check_visibilities_at_one(convention)),
        _timed("eta = 1 reduction", check_eta_one_reduction),
        _timed("two-path loss oracle", check_two_path_loss),
        _timed("classical bound", lambda: check_classical_bound(runs, seed)),
        _timed("brute-force expansion", lambda: check_brute_force(convention=convention)),
    ]
