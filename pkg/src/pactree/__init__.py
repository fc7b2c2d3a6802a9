"""Decision-tree extraction from black-box binary classifiers with sample-size certificates."""

from .bounds import (
    binomial_upper_bound,
    check_binomial_lemma,
    grid_rows,
    hypothesis_count,
    sample_size,
    sample_size_for_tree_space,
    tree_size_estimate,
)
from .errors import (
    ConfigError,
    DocumentParseError,
    DomainError,
    MissingLabelError,
    OracleError,
    PacTreeError,
    TrainingSetError,
    TransportError,
    TreeStructureError,
)
from .evaluation import (
    EvalResult,
    ValidationReport,
    evaluate,
    fidelity,
    probabilistic_fidelity,
    random_tree,
    training_error,
    training_misclassification,
    true_error_by_leaves,
    true_error_enumerate,
    validate_pac,
)
from .extraction import (
    ExtractionConfig,
    ExtractionReport,
    best_split,
    binary_entropy,
    topdown,
    trepac,
    weighted_split_entropy,
)
from .features import (
    And,
    CandidateSplit,
    Constraint,
    Example,
    FALSE,
    Feature,
    FeatureSpace,
    FiniteDomain,
    Not,
    NumericDomain,
    Or,
    TRUE,
    conjoin,
    enumerate_candidate_splits,
    load_space,
    satisfies,
    satisfies_all,
    save_space,
)
from .oracles import (
    ClassifiedExample,
    Distribution,
    FixtureOracle,
    MembershipOracle,
    RemoteOracle,
    TrainingSet,
    TreeOracle,
    build_training_set,
    membership_query,
)
from .tree import (
    DecisionTree,
    Literal,
    Rule,
    extract_rules,
    load_tree,
    node_class,
    render_tree,
    save_tree,
    simplify_rule_one_hot,
    tree_from_document,
    tree_to_document,
)

__version__ = "0.1.0"
