"""Phase-sensitive detection of broadband squeezed light through cascaded
optical parametric amplifiers.

The package models the full signal chain as real-valued variance ratios
(vacuum = 1): a squeezed-vacuum source with pump-dependent levels, a
finite-gain phase-sensitive readout amplifier with its exact bias correction,
chromatic-dispersion ripple spectra with estimation and compensation design,
pump-sweep calibration fitting, and a discrete-time integral phase-lock
simulation.  See the ``opachain`` CLI for file-based workflows.
"""

__version__ = "0.1.0"

from .calibration import (
    FitResult,
    LossChain,
    SweepPoint,
    chain_efficiency,
    fit,
    infer_stage_efficiency,
)
from .dispersion import (
    C_NM_PER_PS,
    DispersionModel,
    FiberSegment,
    SpectrumTrace,
    degradation_phase_dev,
    design_dcf,
    estimate_dispersion,
    frequency_thz,
    make_grid,
    phase_at,
    phase_maintained_band,
    segment_dispersion,
    spectrum,
    wavelength_nm,
)
from .errors import (
    ConfigError,
    DesignError,
    DomainError,
    FitNotConvergedError,
    InconsistentEfficiencyError,
    InsufficientRipplesError,
    OpaChainError,
    SingularCorrectionError,
    TraceFormatError,
    UnphysicalInputError,
)
from .lockloop import (
    LockLoopConfig,
    LockLoopState,
    LockResult,
    pd3_model,
    response_slope,
    run_lock,
    step,
)
from .measurement import (
    MeasuredLevels,
    OpaGain,
    effective_phase_deviation,
    measured_from_true,
    required_gain,
    true_from_measured,
)
from .config import ScenarioConfig, parse_config, read_config
from .sideband import (
    QuadLevels,
    SqueezerParams,
    apply_loss,
    db_from_ratio,
    ratio_from_db,
    true_levels,
    variance_at_phase,
)
from .traceio import read_sweep, read_trace, write_sweep, write_trace
