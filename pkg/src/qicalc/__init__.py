"""Quantum information calculus over finite-dimensional operator algebras.

States, observables and quantum operations on block algebras; entropy and
information quantities in the observable, subalgebra and operation
languages; executable checkers for the entropy inequalities; and channel
capacity bounds (information bound, converse chain, multiway outer bound,
degraded-broadcast region evaluation).
"""

from .algebra import (
    AlgebraElement,
    BlockAlgebra,
    CompatiblePair,
    CompatibilityViolation,
    SubalgebraEmbedding,
    TensorProduct,
    check_compatible,
    compose_embeddings,
    generated_product_algebra,
    identity_embedding,
    leg_embedding,
    make_commutative,
    partition_embedding,
    product_element,
    product_embedding,
    require_compatible,
    tensor,
    tensor_many,
    trivial_embedding,
)
from .errors import BudgetError, DocumentError, IncompatibleError, ValidationError
from .infotheory import (
    DivergenceValue,
    EntropyReport,
    binary_entropy,
    cond_entropy_obs_given_subalgebra,
    cond_entropy_subalgebra_given_obs,
    cond_mutual_info_obs,
    cond_mutual_info_op,
    cond_mutual_info_subalg,
    conditional_entropy_obs,
    conditional_entropy_op,
    conditional_entropy_subalg,
    divergence,
    entropy_of_observable,
    entropy_of_operation,
    entropy_of_subalgebra,
    mutual_info_obs,
    mutual_info_op,
    mutual_info_subalg,
    mutual_info_subalgebra_obs,
    shannon_entropy,
    von_neumann_entropy,
)
from .observable import (
    ObservableCompatibility,
    OutcomeDistribution,
    Povm,
    as_operation,
    check_observable_compatible,
    computational_povm,
    joint,
    joint_many,
    measure,
    post_measurement_states,
    povm_from_columns,
    push_povm,
    random_povm,
    total_operation,
)
from .operation import (
    KrausMap,
    compose,
    embedding_as_operation,
    identity_map,
    multiplication_map,
    operation_compatibility,
    product,
    random_cptp,
    tensor_map,
    tensor_power_map,
    trace_map,
)
from .state import (
    DensityState,
    SeparabilityCertificate,
    Spectrum,
    classical_state,
    diagonalize,
    embed_into_full,
    expectation,
    make_separable,
    partial_trace,
    preadjoint_apply,
    product_state,
    pure_state,
    purify,
    random_density,
    restrict,
)
