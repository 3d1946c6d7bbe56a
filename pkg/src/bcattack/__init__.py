"""Optimal cheating bounds for single-qubit state-commitment protocols."""

from .attack import (
    AttackReport,
    CheatStrategy,
    DegenerateStates,
    FamilySegment,
    GeometryFrame,
    ParentMismatch,
    ProtocolSpec,
    UnsupportedSetSize,
    geometry_frame,
    optimal_decomposition_fixed_rho,
    optimal_rho,
    p_u,
    p_u_max,
    p_u_values,
    p_ub,
    p_ub_max_values,
    tradeoff_point,
)
from .decomp import (
    ConvexDecomposition,
    Povm,
    StatePolytope,
    SupportMismatch,
    SupportViolation,
    certainty_region,
    decomposes,
    decomposition_to_povm,
    jaynes_weight,
    povm_to_decomposition,
)
from .estimation import (
    DualityImage,
    EstimationProblem,
    HelstromMeasurement,
    duality_map,
    estimation_success,
    helstrom_pe,
    helstrom_povm,
)
from .oracle import (
    OracleConfig,
    OracleRun,
    oracle_p_u_max,
    oracle_p_u_max_detailed,
    oracle_p_ub_fixed_rho,
)
from .protocols import (
    BUILTINS,
    FAMILIES,
    GOLDEN_ALPHA,
    aharonov,
    aharonov_legacy_bound,
    bb84,
    fair_point,
    identity_residual,
    one_two,
    skew,
    tradeoff_curve,
    two_state,
)
from .qubit import (
    BallViolation,
    InternalMismatch,
    InvalidDensity,
    NegativeEigenvalue,
    QubitState,
    bloch_to_density,
    density_to_bloch,
    ket_to_state,
    matrix_sqrt_psd,
    overlap,
    trace_distance,
)
from .simulate import (
    GeneralDecomposition,
    GeneralDensity,
    ProjectionReport,
    SimResult,
    SpanViolation,
    hjw_simulate,
    simulate_pe,
    support_projection_check,
)

__version__ = "0.1.0"
