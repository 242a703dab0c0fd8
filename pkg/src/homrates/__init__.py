"""Rate-based versus intensity-based Hong-Ou-Mandel correlations for bright squeezed vacuum."""

__version__ = "0.1.0"

from .beamsplitter import BsConvention, expand_output, expand_output_with_phase
from .closed_forms import ClosedFormSet, eval_closed
from .correlations import CorrelationPair, VisibilityRecord, c_q, correlations, g_q, sweep, visibility
from .fock import Occupation4, SparseState, expectation, make_state
from .loss import DetectionModel, c_q_eta, g_q_eta, lossy_outcome_distribution, visibility_eta
from .source import SourceParams, choose_truncation, pair_amplitudes

__all__ = [
    "BsConvention",
    "ClosedFormSet",
    "CorrelationPair",
    "DetectionModel",
    "Occupation4",
    "SourceParams",
    "SparseState",
    "VisibilityRecord",
    "c_q",
    "c_q_eta",
    "choose_truncation",
    "correlations",
    "eval_closed",
    "expand_output",
    "expand_output_with_phase",
    "expectation",
    "g_q",
    "g_q_eta",
    "lossy_outcome_distribution",
    "make_state",
    "pair_amplitudes",
    "sweep",
    "visibility",
    "visibility_eta",
]
