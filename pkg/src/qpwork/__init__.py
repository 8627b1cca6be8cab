"""Work quasiprobability distributions and their time reversal for finite quantum systems."""

from ._kernels import BACKEND

from .config import (
    DEFAULT_TOLERANCES,
    ConvergenceError,
    DimensionError,
    PropertyViolation,
    Tolerances,
    ValidationError,
)
from .detector import chi_backward_operational, chi_q_operational, detector_coherence_ratio
from .distribution import (
    WorkDistribution,
    char_function_direct,
    distributions_equal,
    moment,
    negate_support,
    pq_distribution,
    tpm_distribution,
)
from .events import check_axioms, dephase, forward_events, quasiprob_v, single_event_prob, tpm_joint
from .linalg import SpectralDecomposition, exp_i_hermitian, hermitian_eig
from .process import HamiltonianProcess, HamiltonianSchedule, heisenberg, propagator, thermal_state
from .reversal import (
    BackwardProcess,
    backward_pq,
    backward_tpm,
    operational_backward_pq,
    reverse,
    verify_symmetry,
)
from .scenario import Scenario, generate_scenario, load_scenario

__version__ = "0.1.0"
