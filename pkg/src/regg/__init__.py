"""Random d-regular graph models, switching-based local resampling, and
spectral-law verification harness."""

__version__ = "0.1.0"

from .errors import (BudgetExceededError, InsufficientDataError, InvalidMoveError,
                     InvalidParametersError, NumericalDegeneracyError,
                     OutOfRegimeWarning, ReggError)
from .graphs import (Matching, ModelKind, MultiGraph, Permutation,
                     enumerate_simple_regular, sample_configuration_model,
                     sample_matching_model, sample_model,
                     sample_permutation_model, sample_uniform)
from .rng import resolve_seed, stream
from .spectral import (EnvelopeParams, HamiltonianMatrix, ResolventView,
                       SpectralPoint, build_H, default_xi, effective_D,
                       f_envelope, kesten_mckay_density, m_semicircle,
                       phi_envelope, psi_envelope, semicircle_density)
from .switchings import (DirectedEdgeSpec, ResampleOutcome, TripleSelection,
                         delta, double_switch, mm_resample, mm_switch,
                         pm_switch, resolvent_switch_delta, single_switch,
                         um_resample, um_simultaneous_switch, um_switchable)

__all__ = [name for name in dir() if not name.startswith("_")]
