from ._core import (
    CostBreakdown,
    FeasibilityReport,
    Instance,
    ProblemParams,
    Schedule,
    UqForecast,
    Violation,
    ViolationKind,
    check_feasible,
    compulsory_floor,
    evaluate_cost,
)
from ._data import (
    ForecastSeries,
    SynthUqConfig,
    Trace,
    clamp_prices,
    estimate_band,
    forecast_for_window,
    forecast_from_dict,
    forecast_to_dict,
    instance_from_dict,
    instance_to_dict,
    load_forecast_csv,
    load_forecast_json,
    load_instance_json,
    load_trace_csv,
    make_instances,
    synth_uq,
    synthetic_trace,
)
from ._dus import (
    DusConfig,
    DusResult,
    box_samples,
    certified_iteration_bound,
    dus_evaluate,
    dus_sample_bound,
    dus_solve,
    gamma_from_dus,
    lipschitz_constant,
    sample_pool,
)
from ._errors import (
    ConfigError,
    DataFormatError,
    DimensionMismatch,
    Error,
    InfeasibleSchedule,
    InvalidParameters,
    OutOfDomain,
    PolicyError,
    SolverFailure,
)
from ._experiments import (
    AggregateStats,
    ExperimentConfig,
    ExperimentResult,
    RecordRow,
    SweepResult,
    SyntheticTraceSpec,
    aggregate,
    emit_report,
    empirical_cr,
    lambda_star_search,
    replay_manifest,
    run_experiment,
    sweep,
)
from ._offline import (
    SolveReport,
    SolverOptions,
    brute_force_opt,
    opt_deterministic_tiebreak,
    solve_opt,
)
from ._online import (
    BoundCheck,
    Policy,
    RunRecord,
    check_run_bounds,
    consistency_bound,
    ro_advice_run,
    robustness_bound,
    roro_run,
    run_online,
    threshold_run,
    uq_advice_run,
    uq_robustness_bound,
)
from ._robust import (
    ThresholdSpec,
    alpha_roro,
    alpha_sasp,
    lambert_w0,
    phi,
    phi_integral,
    phi_inverse,
    pseudo_cost_step,
)

__version__ = "0.1.0"

__all__ = [
    "ProblemParams",
    "Instance",
    "UqForecast",
    "Schedule",
    "CostBreakdown",
    "Violation",
    "ViolationKind",
    "FeasibilityReport",
    "evaluate_cost",
    "check_feasible",
    "compulsory_floor",
    "ThresholdSpec",
    "lambert_w0",
    "alpha_roro",
    "alpha_sasp",
    "phi",
    "phi_inverse",
    "phi_integral",
    "pseudo_cost_step",
    "SolverOptions",
    "SolveReport",
    "solve_opt",
    "brute_force_opt",
    "opt_deterministic_tiebreak",
    "DusConfig",
    "DusResult",
    "dus_solve",
    "dus_sample_bound",
    "dus_evaluate",
    "sample_pool",
    "box_samples",
    "gamma_from_dus",
    "lipschitz_constant",
    "certified_iteration_bound",
    "Policy",
    "RunRecord",
    "BoundCheck",
    "run_online",
    "roro_run",
    "uq_advice_run",
    "ro_advice_run",
    "threshold_run",
    "consistency_bound",
    "robustness_bound",
    "uq_robustness_bound",
    "check_run_bounds",
    "Trace",
    "ForecastSeries",
    "SynthUqConfig",
    "load_trace_csv",
    "load_forecast_csv",
    "clamp_prices",
    "estimate_band",
    "make_instances",
    "synth_uq",
    "synthetic_trace",
    "forecast_for_window",
    "instance_to_dict",
    "instance_from_dict",
    "forecast_to_dict",
    "forecast_from_dict",
    "load_instance_json",
    "load_forecast_json",
    "ExperimentConfig",
    "SyntheticTraceSpec",
    "AggregateStats",
    "RecordRow",
    "ExperimentResult",
    "SweepResult",
    "empirical_cr",
    "run_experiment",
    "aggregate",
    "lambda_star_search",
    "sweep",
    "emit_report",
    "replay_manifest",
    "Error",
    "InvalidParameters",
    "DimensionMismatch",
    "OutOfDomain",
    "InfeasibleSchedule",
    "SolverFailure",
    "PolicyError",
    "DataFormatError",
    "ConfigError",
]
