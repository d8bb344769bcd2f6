"""Learning from aggregate bag labels.

Bag-level data model for LLP (sum labels) and MIL (OR labels), the
union-bag distribution with its weak-to-strong learning algorithms,
pluggable weak-learner oracles, hardness-construction generators and
verifiers, and a seeded experiment harness.
"""

from .core import (
    Bag,
    BagCollection,
    Classifier,
    ExplicitLabeling,
    HalfspaceClassifier,
    InstanceTable,
    LinearSigmoidClassifier,
    LLP,
    MIL,
    accuracy,
    constant_classifier,
    is_satisfied,
    random_classifier_satisfaction_prob,
    residual,
    trivial_accuracy,
    weighted_to_unweighted,
)
from .oracles import (
    OracleResult,
    TrainConfig,
    best_halfspace_2d,
    brute_force_best_labeling,
    brute_force_oracle,
    random_homogeneous_halfspace,
    sgd_oracle,
    train_linear_sigmoid,
)
from .constructions import (
    CircleMILConfig,
    MaxCutLLPConfig,
    adversarial_weights,
    gen_llp_maxcut_bags,
    gen_mil_circle_bags,
    menu_satisfaction,
    verify_llp_no_strong,
    verify_mil_no_strong,
    verify_mil_weak_exists,
)
from .datagen import (
    ColumnSpec,
    DatasetSchema,
    SyntheticConfig,
    gen_hard_bags,
    gen_random_bags,
    load_tabular,
    partition_into_bags,
    split_test,
)
from .experiment import ExperimentConfig, run_experiment, write_report
from .textio import (
    dump_classifier,
    dump_collection,
    load_classifier,
    load_collection,
    read_collection,
    save_collection,
)
from .union import (
    UnionBag,
    UnionConfig,
    compute_t,
    enumerate_support,
    sample_union,
    verify_error_amplification,
)
from .weak_to_strong import algorithm_a1, algorithm_a2, compute_s

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
