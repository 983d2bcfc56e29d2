import math

import numpy as np
import pytest

from conftest import bell_pair, classical_joint_state
from qicalc import (
    BlockAlgebra,
    DensityState,
    ValidationError,
    classical_state,
    computational_povm,
    embedding_as_operation,
    identity_map,
    make_commutative,
    make_separable,
    povm_from_columns,
    product_state,
    push_povm,
    random_cptp,
    random_density,
    require_compatible,
    tensor,
    tensor_many,
    trace_map,
)
from qicalc.inequalities import (
    REGISTRY,
    check_data_processing,
    check_entropy_increase,
    check_fano,
    check_holevo_chain,
    check_info_subadditivity,
    check_info_subadditivity_chain,
    check_info_upper_bound,
    check_klein,
    check_knowledge_decreases,
    check_monotonicity,
    check_pure_common_state,
    check_subadditivity,
    check_triangle,
    corollary_channel_state,
    probe_separability_conjecture,
    run_random_suite,
    summarize,
)
import oracles


def test_klein_hand_case():
    a = make_commutative([0, 1])
    rho = classical_state(a, [1.0, 0.0])
    sigma = classical_state(a, [0.5, 0.5])
    v = check_klein(rho, sigma)
    assert abs(v.rhs_bits - 1.0) < 1e-12
    assert abs(v.lhs_bits - 0.25) < 1e-12
    assert v.passed


def test_klein_equal_states_slack_zero():
    rho = random_density(BlockAlgebra((2,)), 3)
    v = check_klein(rho, rho)
    assert abs(v.slack_bits) < 1e-9


def test_klein_accepts_positive_operators():
    from qicalc import AlgebraElement
    algebra = BlockAlgebra((2,))
    rho = AlgebraElement(algebra, [np.diag([0.3, 0.2]).astype(complex)])
    sigma = AlgebraElement(algebra, [np.diag([0.25, 0.25]).astype(complex)])
    v = check_klein(rho, sigma)
    assert v.status == "ok"
    assert not v.details["states"]


def test_monotonicity_identity_equality():
    algebra = BlockAlgebra((3,))
    rho, sigma = random_density(algebra, 1), random_density(algebra, 2)
    v = check_monotonicity(rho, sigma, identity_map(algebra))
    assert abs(v.slack_bits) < 1e-9


def test_monotonicity_total_trace_kills_divergence():
    algebra = BlockAlgebra((2,))
    rho, sigma = random_density(algebra, 3), random_density(algebra, 4)
    v = check_monotonicity(rho, sigma, trace_map(algebra))
    assert abs(v.lhs_bits) < 1e-10
    assert v.passed


def test_monotonicity_with_infinite_divergence():
    algebra = BlockAlgebra((2,))
    rho = DensityState(algebra, [np.diag([1.0, 0.0]).astype(complex)])
    sigma = DensityState(algebra, [np.diag([0.0, 1.0]).astype(complex)])
    v = check_monotonicity(rho, sigma, identity_map(algebra))
    assert v.passed and math.isinf(v.rhs_bits)


def test_subadditivity_product_state_equality():
    tp = tensor(BlockAlgebra((2,)), BlockAlgebra((2,)))
    rho = product_state(tp, [random_density(tp.factors[0], 5),
                             random_density(tp.factors[1], 6)])
    v = check_subadditivity(tp.factor_embeddings[0], tp.factor_embeddings[1], None, rho)
    assert v.name == "subadditivity"
    assert abs(v.slack_bits) < 1e-9


def test_strong_subadditivity_ghz_diagonal():
    tp = tensor_many([BlockAlgebra((2,))] * 3)
    # diagonal mixture of |000> and |111>
    blocks = [np.zeros((2, 2), dtype=complex) for _ in tp.block_tuples]
    m = np.zeros((8, 8), dtype=complex)
    m[0, 0] = 0.5
    m[7, 7] = 0.5
    rho = DensityState(tp.algebra, [m])
    e1, e2, e3 = tp.factor_embeddings
    v = check_subadditivity(e1, e2, e3, rho)
    assert v.name == "strong_subadditivity"
    assert v.passed
    # H(123) = 1, H(2) = 1, H(12) = H(23) = 1: slack = 0 for this state
    assert abs(v.slack_bits) < 1e-9


def test_pure_common_state_bell():
    tp, bell = bell_pair()
    pair = require_compatible(*tp.factor_embeddings)
    v = check_pure_common_state(pair, bell)
    assert v.passed and abs(v.slack_bits) < 1e-9


def test_pure_common_state_reports_precondition():
    tp = tensor(BlockAlgebra((2,)), BlockAlgebra((2,)))
    mixed = random_density(tp.algebra, 8)
    pair = require_compatible(*tp.factor_embeddings)
    v = check_pure_common_state(pair, mixed)
    assert v.status == "precondition-not-met"
    assert v.passed is None


def test_entropy_increase_eigenbasis_equality():
    from qicalc import as_operation
    algebra = BlockAlgebra((3,))
    rho = random_density(algebra, 11)
    w, vecs = np.linalg.eigh(rho.blocks[0])
    phi = as_operation(povm_from_columns(algebra, vecs))
    v = check_entropy_increase(phi, identity_map(algebra), rho)
    assert abs(v.slack_bits) < 1e-9


def test_entropy_increase_maximal_commutative_subalgebra():
    from qicalc import AlgebraElement, SubalgebraEmbedding
    algebra = BlockAlgebra((2,))
    rho = random_density(algebra, 13)
    dom = make_commutative([0, 1])
    diag = SubalgebraEmbedding(dom, algebra, [
        AlgebraElement(algebra, [np.diag([1.0 + 0j, 0.0])]),
        AlgebraElement(algebra, [np.diag([0.0, 1.0 + 0j])]),
    ])
    v = check_entropy_increase(embedding_as_operation(diag), identity_map(algebra), rho)
    assert v.passed  # H(diagonal) >= H(rho)


def test_entropy_increase_rejects_trace_increasing():
    algebra = BlockAlgebra((2,))
    # the trivial inclusion of the scalars has Tr phi(1) = 2 > 1 = Tr 1
    from qicalc import trivial_embedding
    phi = embedding_as_operation(trivial_embedding(algebra))
    with pytest.raises(ValidationError):
        check_entropy_increase(phi, identity_map(algebra), random_density(algebra, 1))


def test_triangle_bell_equality():
    tp, bell = bell_pair()
    pair = require_compatible(*tp.factor_embeddings)
    v = check_triangle(pair, bell)
    assert abs(v.lhs_bits) < 1e-9 and abs(v.rhs_bits) < 1e-9


def test_triangle_product_with_pure_factor():
    tp = tensor(BlockAlgebra((2,)), BlockAlgebra((2,)))
    mixed = DensityState(tp.factors[0], [np.eye(2, dtype=complex) / 2])
    pure = DensityState(tp.factors[1], [np.diag([1.0, 0.0]).astype(complex)])
    rho = product_state(tp, [mixed, pure])
    pair = require_compatible(*tp.factor_embeddings)
    v = check_triangle(pair, rho)
    assert abs(v.lhs_bits - 1.0) < 1e-9
    assert abs(v.rhs_bits - 1.0) < 1e-9


def test_holevo_chain_bell_mismatched_bases_strict():
    from qicalc import Povm
    tp, bell = bell_pair()
    pair = require_compatible(*tp.factor_embeddings)
    x = push_povm(tp.factor_embeddings[0], computational_povm(tp.factors[0]))
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    y = push_povm(tp.factor_embeddings[1], povm_from_columns(tp.factors[1], h))
    v1, v2 = check_holevo_chain(x, y, pair, bell)
    assert abs(v1.lhs_bits) < 1e-9            # complementary bases decorrelate
    assert abs(v1.rhs_bits - 1.0) < 1e-9      # subalgebra with observable: 1 bit
    assert abs(v2.rhs_bits - 2.0) < 1e-9      # full mutual information: 2 bits
    assert v1.slack_bits > 0.5 and v2.slack_bits > 0.5


def test_holevo_chain_classical_equalities():
    entry = REGISTRY["holevo_chain"]
    for v in entry.fixtures():
        assert abs(v.slack_bits) < 1e-9


def test_data_processing_identity_equality():
    for v in REGISTRY["data_processing"].fixtures():
        assert abs(v.slack_bits) < 1e-9


def test_info_subadditivity_hypotheses_hold_on_channel_states():
    rho, xs, ys = corollary_channel_state(3)
    v = check_info_subadditivity(xs[0], xs[1], ys[0], ys[1], rho)
    assert v.status == "ok"
    assert v.passed


def test_info_subadditivity_flags_entangled_hypothesis_violation():
    # a four-party pure entangled state violates the conditional independence
    tp = tensor_many([BlockAlgebra((2,))] * 4)
    g = np.random.default_rng(5)
    from qicalc import pure_state
    vec = g.standard_normal(16) + 1j * g.standard_normal(16)
    rho = pure_state(tp.algebra, 0, vec)
    legs = tp.factor_embeddings
    v = check_info_subadditivity(legs[0], legs[1], legs[2], legs[3], rho)
    assert v.status == "hypothesis-not-met"
    assert v.passed is None
    assert max(abs(r) for r in v.details["hypothesis_residuals"]) > 1e-6


def test_info_subadditivity_chain_n_party():
    rho, xs, ys = corollary_channel_state(9)
    v = check_info_subadditivity_chain(xs, ys, rho)
    assert v.status == "ok" and v.passed


def test_info_upper_bound_bell_saturates():
    tp, bell = bell_pair()
    pair = require_compatible(*tp.factor_embeddings)
    v = check_info_upper_bound(pair, bell)
    assert abs(v.lhs_bits - 2.0) < 1e-9
    assert abs(v.slack_bits) < 1e-9


def test_info_upper_bound_product_state():
    tp = tensor(BlockAlgebra((2,)), BlockAlgebra((2,)))
    rho = product_state(tp, [random_density(tp.factors[0], 1),
                             random_density(tp.factors[1], 2)])
    pair = require_compatible(*tp.factor_embeddings)
    v = check_info_upper_bound(pair, rho)
    assert abs(v.lhs_bits) < 1e-9 and v.passed


def test_cond_entropy_nonneg_requires_commutative_source():
    tp, bell = bell_pair()
    phi = embedding_as_operation(tp.factor_embeddings[0])
    psi = embedding_as_operation(tp.factor_embeddings[1])
    from qicalc.inequalities import check_conditional_entropy_nonneg
    with pytest.raises(ValidationError):
        check_conditional_entropy_nonneg(phi, psi, bell)


def test_cond_entropy_nonneg_both_branches():
    from qicalc.inequalities import _fuzz_cond_entropy_nonneg
    for seed in range(20):
        for v in _fuzz_cond_entropy_nonneg(seed):
            assert v.passed


def test_knowledge_decreases_identity_equality():
    for v in [REGISTRY["knowledge_decreases"].fixtures()[0]]:
        assert abs(v.slack_bits) < 1e-9


def test_knowledge_decreases_total_trace_gives_plain_form():
    tp, bell = bell_pair()
    psi = embedding_as_operation(tp.factor_embeddings[1])
    phi = embedding_as_operation(tp.factor_embeddings[0])
    phi_prime = trace_map(phi.source)
    v1, v2 = check_knowledge_decreases(psi, phi, phi_prime, bell)
    # conditioning on the trivial coarse-graining equals no conditioning
    assert abs(v1.rhs_bits - v2.rhs_bits) < 1e-9
    assert v1.passed and v2.passed


def test_fano_perfect_correlation():
    for v in REGISTRY["fano"].fixtures():
        assert v.passed
        assert abs(v.details["error_probability"]) < 1e-12
        assert abs(v.slack_bits) < 1e-9


def test_fano_binary_symmetric_equality():
    # uniform input through a symmetric binary flip: H(X|Y) = h(p) = bound
    p_flip = 0.11
    tp = tensor_many([make_commutative([0, 1]), make_commutative([0, 1])])
    joint = np.array([[0.5 * (1 - p_flip), 0.5 * p_flip],
                      [0.5 * p_flip, 0.5 * (1 - p_flip)]])
    rho = classical_joint_state(tp, joint)
    x = push_povm(tp.factor_embeddings[0], computational_povm(tp.factors[0]))
    y = push_povm(tp.factor_embeddings[1], computational_povm(tp.factors[1]))
    v = check_fano(x, tp.factor_embeddings[1], y, rho)[0]
    assert abs(v.details["error_probability"] - p_flip) < 1e-12
    assert abs(v.lhs_bits - oracles.h2(p_flip)) < 1e-9
    assert abs(v.slack_bits) < 1e-9


def test_fano_label_mismatch_is_an_error():
    tp = tensor_many([make_commutative([0, 1]), make_commutative([0, 1])])
    rho = classical_joint_state(tp, np.full((2, 2), 0.25))
    x = push_povm(tp.factor_embeddings[0], computational_povm(tp.factors[0]))
    y = push_povm(tp.factor_embeddings[1], computational_povm(tp.factors[1]))
    from qicalc import Povm
    y_bad = Povm(tp.algebra, ("a", "b"), y.effects)
    with pytest.raises(ValidationError):
        check_fano(x, tp.factor_embeddings[1], y_bad, rho)


def test_separability_probe_product_state():
    a = BlockAlgebra((2,))
    rho, cert = make_separable([(1.0, [random_density(a, 7), random_density(a, 8)])])
    v1, v2 = probe_separability_conjecture(rho, cert)
    assert v1.status == "conjecture" and v2.status == "conjecture"
    assert v1.slack_bits >= -1e-9


def test_separability_probe_requires_certificate():
    a = BlockAlgebra((2,))
    rho, cert = make_separable([(1.0, [random_density(a, 7), random_density(a, 8)])])
    with pytest.raises(ValidationError):
        probe_separability_conjecture(rho, None)


def test_all_fixtures_are_tight():
    for name, entry in REGISTRY.items():
        for v in entry.fixtures():
            if v.status != "ok":
                continue
            assert abs(v.slack_bits) < 1e-9, f"{name}: fixture slack {v.slack_bits}"


def test_small_fuzz_all_checkers_pass():
    for name, entry in REGISTRY.items():
        verdicts = run_random_suite(name, 25, seed=7000)
        if entry.conjecture:
            continue
        for v in verdicts:
            assert v.passed is not False, f"{name}: {v.to_record()}"


def test_summarize_counts():
    verdicts = run_random_suite("klein", 10, seed=1)
    rows = summarize(verdicts)
    assert rows[0].count == 10
    assert rows[0].failures == 0


def test_verdict_records_serialize_infinities():
    algebra = BlockAlgebra((2,))
    rho = DensityState(algebra, [np.diag([1.0, 0.0]).astype(complex)])
    sigma = DensityState(algebra, [np.diag([0.0, 1.0]).astype(complex)])
    v = check_klein(rho, sigma)
    rec = v.to_record()
    assert rec["rhs_bits"] == "inf"
    assert rec["slack_bits"] == "inf"


def test_verdicts_are_reproducible():
    a = run_random_suite("triangle", 6, seed=3)
    b = run_random_suite("triangle", 6, seed=3)
    assert [v.to_record() for v in a] == [v.to_record() for v in b]
