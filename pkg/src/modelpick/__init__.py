"""Budget-constrained model selection over a candidate pool.

Candidates ("arms") carry a recorded benchmark accuracy plus static size and
complexity metrics; a budgeted bandit spends target-data evaluations where
they matter and ranks arms by a weighted composite of estimated accuracy and
normalized static scores.
"""
from .backends import (
    BackendError,
    Dataset,
    EvaluationBackend,
    PullResult,
    RemoteBackend,
    SyntheticBackend,
    SyntheticSpec,
    TraceBackend,
    TraceError,
    TraceTable,
    bernoulli_bit,
    generate_synthetic,
    load_trace,
    serialize_trace,
    synthetic_backend,
)
from .baselines import benchmark_select, brute_force
from .canonical import canonical_json, format_real
from .core import (
    ConfigError,
    ExperimentConfig,
    MetricWeights,
    ModelCandidate,
    ModelPickError,
    ModelPool,
    PoolError,
    StaticScores,
    load_pool,
    normalize_static,
    save_pool,
)
from .engine import (
    BanditState,
    composite_reward,
    estimated_value,
    estimated_values,
    run_experiment,
    run_repetitions,
    select_epsilon_greedy,
    select_thompson,
    select_ucb,
)
from .reasoning import (
    WeightProposal,
    fallback_weights,
    parse_llm_response,
    propose_weights,
)
from .reporting import (
    AggregateReport,
    ArmFrequency,
    RankEntry,
    ReportError,
    SelectionReport,
    aggregate,
    compute_savings,
    deserialize_report,
    serialize_report,
)

__version__ = "0.1.0"
