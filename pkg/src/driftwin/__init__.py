"""driftwin: reconstruct time-point-wise distribution processes from
window-level distribution observations."""

__version__ = "0.1.0"

from .baselines import nelder_mead_minimize, nelder_mead_reconstruct
from .errors import (
    ConstantWDS,
    DegenerateWindow,
    DimensionMismatch,
    DriftwinError,
    EmptyInput,
    InsufficientReadings,
    NonFiniteObjective,
    NullWindowMass,
    TooLarge,
    UnchainableAtom,
    UncoveredAtom,
)
from .nnls import NnlsResult, nnls
from .reconstruction import (
    ReconstructionConfig,
    ReconstructionResult,
    direct_objective,
    objective,
    reconstruct,
)
from .wds import (
    DistributionProcess,
    WindowObservations,
    check_compatibility,
    check_wds_axioms,
    exact_time_weights,
    has_drift,
    induce_observations,
)
from .windows import (
    Atom,
    IncidenceMatrix,
    IntervalWindow,
    TimeAtomSet,
    atomize,
    check_window_system,
)
from .water import (
    DemandEstimate,
    DemandProfile,
    MeterLog,
    fit_demand,
    predict_community,
    simulate_households,
)
