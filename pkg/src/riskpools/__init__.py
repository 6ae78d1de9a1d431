"""Tail-risk diversification of sovereign catastrophe risk pools.

Quantifies how much pooling reduces the capital needed to cover countries'
extreme annual losses, and searches for pool compositions that maximize the
reduction: expected shortfall and its member decomposition, risk
concentration and diversification, a two-step evolutionary composition
search with membership constraints, and a seeded sampler that builds long
synthetic annual loss series from a storm event catalogue.
"""

from .data import (
    AnnualLossMatrix,
    CountryMeta,
    EventCatalogue,
    LossEvent,
    aggregate_to_annual,
    load_annual_losses,
    load_country_meta,
    load_event_catalogue,
    write_annual_losses,
)
from .errors import (
    DataValidationError,
    InfeasibleError,
    InternalInvariantError,
    RiskPoolsError,
)
from .metrics import (
    CorrelationResult,
    MemberMetrics,
    PoolMetrics,
    TailSpec,
    es,
    mes,
    pool_metrics,
    tail_correlation,
    tail_count,
    tail_years,
    var,
)
from .optimize import (
    FrontEntry,
    OptimizerConfig,
    ParetoFront,
    PoolOptimizer,
    SelectionVector,
    Step1Result,
    Step2Result,
    dominates,
    empty_pools,
    evaluate_allocation,
    exhaustive_oracle,
    merge_fronts,
    optimize_step1,
    optimize_step2,
    resolve_domains,
    run_step1,
    run_step2,
)
from .sampling import (
    AnnualLossSampler,
    SamplerConfig,
    ScenarioResult,
    YearTypeModel,
    build_loss_series,
    build_scenarios,
    classify_year_types,
    expected_annual_count,
    load_seasonal_labels,
    sample_annual_events,
    sample_year_sequence,
)

__version__ = "0.1.0"

__all__ = [
    "AnnualLossMatrix",
    "AnnualLossSampler",
    "CorrelationResult",
    "CountryMeta",
    "DataValidationError",
    "EventCatalogue",
    "FrontEntry",
    "InfeasibleError",
    "InternalInvariantError",
    "LossEvent",
    "MemberMetrics",
    "OptimizerConfig",
    "ParetoFront",
    "PoolMetrics",
    "PoolOptimizer",
    "RiskPoolsError",
    "SamplerConfig",
    "ScenarioResult",
    "SelectionVector",
    "Step1Result",
    "Step2Result",
    "TailSpec",
    "YearTypeModel",
    "aggregate_to_annual",
    "build_loss_series",
    "build_scenarios",
    "classify_year_types",
    "dominates",
    "empty_pools",
    "es",
    "evaluate_allocation",
    "exhaustive_oracle",
    "expected_annual_count",
    "load_annual_losses",
    "load_country_meta",
    "load_event_catalogue",
    "load_seasonal_labels",
    "merge_fronts",
    "mes",
    "optimize_step1",
    "optimize_step2",
    "pool_metrics",
    "resolve_domains",
    "run_step1",
    "run_step2",
    "sample_annual_events",
    "sample_year_sequence",
    "tail_correlation",
    "tail_count",
    "tail_years",
    "var",
    "write_annual_losses",
]
