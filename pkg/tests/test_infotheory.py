import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import bell_pair, classical_joint_state
from qicalc import (
    BlockAlgebra,
    DensityState,
    ValidationError,
    as_operation,
    binary_entropy,
    classical_state,
    cond_entropy_obs_given_subalgebra,
    cond_entropy_subalgebra_given_obs,
    cond_mutual_info_obs,
    cond_mutual_info_subalg,
    conditional_entropy_obs,
    conditional_entropy_subalg,
    conditional_entropy_op,
    computational_povm,
    divergence,
    embedding_as_operation,
    entropy_of_observable,
    entropy_of_operation,
    entropy_of_subalgebra,
    identity_embedding,
    joint,
    make_commutative,
    measure,
    mutual_info_obs,
    mutual_info_op,
    mutual_info_subalg,
    mutual_info_subalgebra_obs,
    post_measurement_states,
    product_state,
    pure_state,
    push_povm,
    random_density,
    random_povm,
    require_compatible,
    restrict,
    tensor,
    tensor_many,
    trivial_embedding,
    von_neumann_entropy,
)
from qicalc.infotheory import _divergence_blocks
from qicalc.inequalities import corollary_channel_state
from qicalc.state import preadjoint_apply


# -- plain entropies ----------------------------------------------------------

def test_entropy_of_maximally_mixed():
    for d in (2, 3, 5):
        rho = DensityState(BlockAlgebra((d,)), [np.eye(d, dtype=complex) / d])
        assert abs(von_neumann_entropy(rho) - math.log2(d)) < 1e-12


def test_entropy_of_pure_state():
    rho = pure_state(BlockAlgebra((3,)), 0, [1.0, 1.0, 0.5])
    assert von_neumann_entropy(rho) < 1e-12


def test_entropy_matches_printed_example_values():
    alpha = math.cos(math.pi / 8) ** 2
    rho = DensityState(BlockAlgebra((2,)), [np.diag([alpha, 1 - alpha]).astype(complex)])
    h = von_neumann_entropy(rho)
    assert abs(h - binary_entropy(alpha)) < 1e-12
    assert abs(h - 0.60088) < 5e-6
    assert abs((1 - h) - 0.399) < 1e-3


def test_binary_entropy_values():
    assert abs(binary_entropy(0.5) - 1.0) < 1e-12
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    beta = math.cos(math.pi / 6) ** 2
    assert abs(binary_entropy(beta) - 0.8113) < 1e-4
    assert abs((1 - binary_entropy(beta)) - 0.189) < 1e-3
    with pytest.raises(ValidationError):
        binary_entropy(1.5)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=0.0, max_value=1.0))
def test_binary_entropy_range_and_symmetry(x):
    h = binary_entropy(x)
    assert -1e-12 <= h <= 1.0 + 1e-12
    assert abs(h - binary_entropy(1.0 - x)) < 1e-12


# -- divergence ---------------------------------------------------------------

def test_divergence_of_state_with_itself():
    rho = random_density(BlockAlgebra((3,)), 2)
    assert abs(divergence(rho, rho).bits) < 1e-10


def test_divergence_classical_value():
    a = make_commutative([0, 1])
    rho = classical_state(a, [1.0, 0.0])
    sigma = classical_state(a, [0.5, 0.5])
    assert abs(divergence(rho, sigma).bits - 1.0) < 1e-12


def test_divergence_support_violation_is_infinite():
    a = make_commutative([0, 1])
    rho = classical_state(a, [1.0, 0.0])
    sigma = classical_state(a, [0.0, 1.0])
    assert divergence(rho, sigma).is_infinite


def test_divergence_nonnegative_on_random_pairs():
    for seed in range(200):
        algebra = BlockAlgebra((2 + seed % 3,))
        rho = random_density(algebra, 2 * seed)
        sigma = random_density(algebra, 2 * seed + 1)
        d = divergence(rho, sigma).bits
        assert d >= -1e-10
        # equality only for (numerically) identical states
        if d < 1e-8:
            assert max(np.abs(a - b).max() for a, b in zip(rho.blocks, sigma.blocks)) < 1e-4


def test_divergence_matches_classical_kl(rng):
    a = make_commutative(range(4))
    for seed in range(50):
        g = np.random.default_rng(seed)
        p, q = g.dirichlet(np.ones(4)), g.dirichlet(np.ones(4))
        d = divergence(classical_state(a, p), classical_state(a, q)).bits
        assert abs(d - oracles.kl_divergence(p, q)) < 1e-9


# -- observable language --------------------------------------------------------

def test_obs_entropy_binary():
    algebra = BlockAlgebra((2,))
    for p in (0.1, 0.35, 0.5):
        rho = DensityState(algebra, [np.diag([p, 1 - p]).astype(complex)])
        h = entropy_of_observable(computational_povm(algebra), rho)
        assert abs(h - binary_entropy(p)) < 1e-12


def test_obs_mutual_info_is_divergence_from_product(rng):
    algebra = BlockAlgebra((3,))
    for seed in range(25):
        g = np.random.default_rng(seed)
        u = np.linalg.qr(g.standard_normal((3, 3)) + 1j * g.standard_normal((3, 3)))[0]
        from qicalc import povm_from_columns
        x = povm_from_columns(algebra, u)
        y = type(x)(algebra, ("u", "v"), (x.effects[0] + x.effects[1], x.effects[2]))
        rho = random_density(algebra, seed)
        i = mutual_info_obs(x, y, rho)
        jd = measure(joint(x, y), rho).as_array().reshape(3, 2)
        prod = np.outer(jd.sum(axis=1), jd.sum(axis=0))
        assert abs(i - oracles.kl_divergence(jd.ravel(), prod.ravel())) < 1e-9


def test_obs_self_information_is_entropy():
    algebra = BlockAlgebra((3,))
    x = computational_povm(algebra)
    rho = random_density(algebra, 12)
    assert abs(mutual_info_obs(x, x, rho) - entropy_of_observable(x, rho)) < 1e-10


def test_conditional_entropy_obs_matches_post_measurement_formula(rng):
    algebra = BlockAlgebra((3,))
    for seed in range(25):
        g = np.random.default_rng(1000 + seed)
        u = np.linalg.qr(g.standard_normal((3, 3)) + 1j * g.standard_normal((3, 3)))[0]
        from qicalc import povm_from_columns
        y = povm_from_columns(algebra, u)
        x = type(y)(algebra, ("u", "v"), (y.effects[0] + y.effects[1], y.effects[2]))
        rho = random_density(algebra, seed)
        lhs = conditional_entropy_obs(x, y, rho)
        rhs = 0.0
        for _, p, post in post_measurement_states(y, rho):
            if post is not None:
                rhs += p * entropy_of_observable(x, post)
        assert abs(lhs - rhs) < 1e-9


# -- subalgebra language ---------------------------------------------------------

def test_subalgebra_entropy_of_full_algebra():
    algebra = BlockAlgebra((2, 2))
    rho = random_density(algebra, 3)
    assert abs(entropy_of_subalgebra(identity_embedding(algebra), rho)
               - von_neumann_entropy(rho)) < 1e-12


def test_trivial_subalgebra_has_zero_entropy():
    rho = random_density(BlockAlgebra((3,)), 4)
    assert abs(entropy_of_subalgebra(trivial_embedding(rho.algebra), rho)) < 1e-12


def test_bell_conditional_entropy_is_minus_one():
    tp, bell = bell_pair()
    h = conditional_entropy_subalg(tp.factor_embeddings[0], tp.factor_embeddings[1], bell)
    assert abs(h - (-1.0)) < 1e-9


def test_subalgebra_identities_with_trivial_conditioning():
    tp, bell = bell_pair()
    x, y = tp.factor_embeddings
    triv = trivial_embedding(tp.algebra)
    assert abs(entropy_of_subalgebra(x, bell)
               - conditional_entropy_subalg(x, triv, bell)) < 1e-10
    assert abs(mutual_info_subalg(x, y, bell)
               - cond_mutual_info_subalg(x, y, triv, bell)) < 1e-10


def test_subalg_mutual_info_is_divergence_from_marginals():
    from qicalc import generated_product_algebra, multiplication_map, partial_trace
    tp = tensor(BlockAlgebra((2,)), BlockAlgebra((2,)))
    for seed in range(10):
        rho = random_density(tp.algebra, seed)
        pair = require_compatible(*tp.factor_embeddings)
        emb = generated_product_algebra(pair)
        mu = multiplication_map(pair, emb)
        sigma = preadjoint_apply(mu, restrict(rho, emb))
        dom = tensor_many([pair.left.domain, pair.right.domain])
        m1 = partial_trace(sigma, dom, 0)
        m2 = partial_trace(sigma, dom, 1)
        prod = product_state(dom, [m1, m2])
        d = divergence(sigma, prod).bits
        i = mutual_info_subalg(*tp.factor_embeddings, rho)
        assert abs(d - i) < 1e-9


# -- operation language -----------------------------------------------------------

def test_operation_entropy_subsumes_subalgebra():
    tp, bell = bell_pair()
    x = tp.factor_embeddings[0]
    assert abs(entropy_of_operation(embedding_as_operation(x), bell)
               - entropy_of_subalgebra(x, bell)) < 1e-10


def test_operation_entropy_subsumes_observable(rng):
    algebra = BlockAlgebra((2,))
    x = random_povm(algebra, 3, rng)
    rho = random_density(algebra, rng)
    assert abs(entropy_of_operation(as_operation(x), rho)
               - entropy_of_observable(x, rho)) < 1e-10


def test_operation_mutual_info_is_divergence_on_the_tensor():
    from qicalc import product, partial_trace
    tp, bell = bell_pair()
    phi = embedding_as_operation(tp.factor_embeddings[0])
    psi = embedding_as_operation(tp.factor_embeddings[1])
    prod_map = product(phi, psi)
    sigma = preadjoint_apply(prod_map, bell)
    dom = tensor_many([phi.source, psi.source])
    m1 = partial_trace(sigma, dom, 0)
    m2 = partial_trace(sigma, dom, 1)
    d = divergence(sigma, product_state(dom, [m1, m2])).bits
    assert abs(d - mutual_info_op(phi, psi, bell)) < 1e-9


def test_language_coherence_on_random_instances():
    for seed in range(30):
        tp = tensor(BlockAlgebra((2,)), BlockAlgebra((2,)))
        rho = random_density(tp.algebra, seed)
        x_emb, y_emb = tp.factor_embeddings
        i_alg = mutual_info_subalg(x_emb, y_emb, rho)
        i_op = mutual_info_op(embedding_as_operation(x_emb),
                              embedding_as_operation(y_emb), rho)
        assert abs(i_alg - i_op) < 1e-9


# -- hybrid forms -------------------------------------------------------------------

def test_pidgin_with_unit_observable_reduces_to_plain_entropy():
    from qicalc import Povm
    tp, bell = bell_pair()
    x = tp.factor_embeddings[0]
    unit = Povm(tp.algebra, ("all",), (tp.algebra.identity(),))
    assert abs(cond_entropy_subalgebra_given_obs(x, unit, bell)
               - entropy_of_subalgebra(x, bell)) < 1e-9


def test_pidgin_with_trivial_subalgebra_has_zero_information():
    tp, bell = bell_pair()
    y = push_povm(tp.factor_embeddings[1], computational_povm(tp.factors[1]))
    triv = trivial_embedding(tp.algebra)
    assert abs(mutual_info_subalgebra_obs(triv, y, bell)) < 1e-9


def test_pidgin_cond_entropy_matches_post_measurement_formula():
    tp, _ = bell_pair()
    for seed in range(20):
        rho = random_density(tp.algebra, 100 + seed)
        x = tp.factor_embeddings[0]
        y = push_povm(tp.factor_embeddings[1], random_povm(tp.factors[1], 2, seed))
        lhs = cond_entropy_subalgebra_given_obs(x, y, rho)
        rhs = 0.0
        for _, p, post in post_measurement_states(y, rho):
            if post is not None:
                rhs += p * entropy_of_subalgebra(x, post)
        assert abs(lhs - rhs) < 1e-9


def test_pidgin_nonnegativity_500_instances():
    violations = 0
    for seed in range(500):
        g = np.random.default_rng(seed)
        d1 = int(g.integers(2, 4))
        d2 = int(g.integers(2, 4))
        tp = tensor(BlockAlgebra((d1,)), BlockAlgebra((d2,)))
        rho = random_density(tp.algebra, g)
        x_emb = tp.factor_embeddings[0]
        y = push_povm(tp.factor_embeddings[1], random_povm(tp.factors[1], int(g.integers(2, 4)), g))
        if cond_entropy_subalgebra_given_obs(x_emb, y, rho) < -1e-9:
            violations += 1
        if cond_entropy_obs_given_subalgebra(
                push_povm(x_emb, computational_povm(tp.factors[0])),
                tp.factor_embeddings[1], rho) < -1e-9:
            violations += 1
    assert violations == 0


# -- global properties -----------------------------------------------------------

def test_entropy_additive_on_product_states():
    tp = tensor(BlockAlgebra((2,)), BlockAlgebra((3,)))
    for seed in range(20):
        sigma = random_density(tp.factors[0], 2 * seed)
        tau = random_density(tp.factors[1], 2 * seed + 1)
        rho = product_state(tp, [sigma, tau])
        assert abs(von_neumann_entropy(rho)
                   - von_neumann_entropy(sigma) - von_neumann_entropy(tau)) < 1e-9


def test_information_quantities_nonnegative_on_random_instances():
    for seed in range(60):
        tp = tensor(BlockAlgebra((2,)), BlockAlgebra((2,)))
        rho = random_density(tp.algebra, seed)
        x, y = tp.factor_embeddings
        assert mutual_info_subalg(x, y, rho) >= -1e-9
    for seed in range(30):
        rho, xs, ys = corollary_channel_state(seed)
        assert cond_mutual_info_subalg(xs[0], ys[0], xs[1], rho) >= -1e-9
