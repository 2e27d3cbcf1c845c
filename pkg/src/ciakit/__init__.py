"""Component Interaction Automata toolkit.

Modeling, composition, weak-bisimulation state-space reduction, structural
metrics, synthetic corpus generation, and logistic-regression analysis of
refinement outcomes.
"""

from .compose import IoSets, compose, compose_pairwise_reduce, default_io_sets
from .core import (
    Automaton,
    Hierarchy,
    Label,
    LabelKind,
    Transition,
    label_kind,
    reachable,
)
from .dot import export_dot
from .errors import (
    CiaError,
    FormatError,
    OracleLimitError,
    RefinementTimeout,
    SeparationError,
    ValidationError,
)
from .experiment import ExperimentRow, reduction_report, run_experiment, run_pair
from .fmt import (
    parse_automata,
    parse_automaton,
    parse_hierarchy,
    serialize_automata,
    serialize_automaton,
)
from .generate import GenParams, SplitMix64, generate_corpus, generate_primitive, write_corpus
from .metrics import MetricsRecord, beta, gini, gini_in, gini_out, metrics_record
from .refine import (
    Partition,
    RefineStats,
    partition_refine,
    quotient,
    refine_step,
    silent_closure,
    splitter,
    weak_bisim_oracle,
    weak_bisim_relation,
    weak_targets,
)
from .regress import (
    ClassificationReport,
    LogisticFit,
    classify,
    fit_logistic,
    lr_p_value,
    predict,
    threshold_x,
)

__version__ = "0.1.0"
