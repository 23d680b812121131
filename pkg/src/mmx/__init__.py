"""First-order methods for smooth nonconvex-concave minimax problems.

Implements perturbed / smoothed gradient descent-ascent solvers, hard
instances with analytic oracles, the spectral machinery of their linear
recursions, Lyapunov-descent runtime audits, and an epsilon-sweep harness
that certifies empirical iteration-complexity rates.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .core import (
    Ball,
    Box,
    ConfigError,
    DimensionError,
    FeasibilityError,
    FullSpace,
    Interval,
    IterateState,
    MinimaxProblem,
    MmxError,
    OracleError,
    ProjectableSet,
    ScalarOps,
    SurrogateParams,
    contains,
    diameter,
    normal_cone_residual,
    project,
    surrogate_grads,
)
from .harness import (
    CENSORED,
    SWEEP_COLUMNS,
    FirstHit,
    RateFit,
    SweepSpec,
    audit_trace,
    first_hit,
    first_hit_record,
    load_report,
    load_sweep_csv,
    load_sweep_toml,
    load_trace_csv,
    slope_fit,
    sweep,
    write_report,
    write_sweep_csv,
    write_trace_csv,
)
from .instances import (
    bilinear_quadratic,
    eigen_init,
    frozen_dual_step,
    gs_instance,
    instance_names,
    make_instance,
    os_instance,
)
from .solvers import (
    ALGORITHMS,
    InnerSolution,
    IterateTrace,
    SolverConfig,
    foam_run,
    initial_state,
    inner_scsc,
    run,
    select_config,
    step,
    validate_config,
)
from .stationarity import (
    AUDIT_KINDS,
    INITIAL_GAP_KINDS,
    LYAPUNOV_KINDS,
    InitialGapReport,
    OracleResult,
    StationarityReport,
    bound_audit,
    gs_residual,
    initial_gap,
    inner_max,
    lyapunov,
    os_residual,
    prox_min,
    saddle_solve,
    stationarity_report,
)

__all__ = [
    "__version__",
    "Ball",
    "Box",
    "ConfigError",
    "DimensionError",
    "FeasibilityError",
    "FullSpace",
    "Interval",
    "IterateState",
    "MinimaxProblem",
    "MmxError",
    "OracleError",
    "ProjectableSet",
    "ScalarOps",
    "SurrogateParams",
    "contains",
    "diameter",
    "normal_cone_residual",
    "project",
    "surrogate_grads",
    "CENSORED",
    "SWEEP_COLUMNS",
    "FirstHit",
    "RateFit",
    "SweepSpec",
    "audit_trace",
    "first_hit",
    "first_hit_record",
    "load_report",
    "load_sweep_csv",
    "load_sweep_toml",
    "load_trace_csv",
    "slope_fit",
    "sweep",
    "write_report",
    "write_sweep_csv",
    "write_trace_csv",
    "bilinear_quadratic",
    "eigen_init",
    "frozen_dual_step",
    "gs_instance",
    "instance_names",
    "make_instance",
    "os_instance",
    "ALGORITHMS",
    "InnerSolution",
    "IterateTrace",
    "SolverConfig",
    "foam_run",
    "initial_state",
    "inner_scsc",
    "run",
    "select_config",
    "step",
    "validate_config",
    "AUDIT_KINDS",
    "INITIAL_GAP_KINDS",
    "LYAPUNOV_KINDS",
    "InitialGapReport",
    "OracleResult",
    "StationarityReport",
    "bound_audit",
    "gs_residual",
    "initial_gap",
    "inner_max",
    "lyapunov",
    "os_residual",
    "prox_min",
    "saddle_solve",
    "stationarity_report",
]
