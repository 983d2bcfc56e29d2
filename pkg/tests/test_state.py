import numpy as np
import pytest

from conftest import bell_pair
from qicalc import (
    BlockAlgebra,
    DensityState,
    ValidationError,
    classical_state,
    diagonalize,
    embed_into_full,
    expectation,
    generated_product_algebra,
    identity_embedding,
    make_commutative,
    make_separable,
    multiplication_map,
    partial_trace,
    preadjoint_apply,
    product_state,
    pure_state,
    purify,
    random_density,
    require_compatible,
    restrict,
    tensor,
    tensor_many,
    trivial_embedding,
)
from qicalc.operation import identity_map
from qicalc.state import Spectrum, reconstruct


def test_state_validation_rejects_negative_eigenvalues():
    algebra = BlockAlgebra((2,))
    with pytest.raises(ValidationError):
        DensityState(algebra, [np.diag([1.2, -0.2]).astype(complex)])


def test_state_clamps_tiny_negatives():
    algebra = BlockAlgebra((2,))
    rho = DensityState(algebra, [np.diag([1.0 + 5e-9, -5e-9]).astype(complex)])
    assert rho.eigenvalues()[-1] >= 0.0
    assert abs(sum(np.real(np.trace(b)) for b in rho.blocks) - 1.0) < 1e-12


def test_state_rejects_wrong_trace():
    algebra = BlockAlgebra((2,))
    with pytest.raises(ValidationError):
        DensityState(algebra, [np.diag([0.6, 0.6]).astype(complex)])


# -- restrict ---------------------------------------------------------------

def test_restrict_along_identity_is_identity():
    algebra = BlockAlgebra((2, 3))
    rho = random_density(algebra, 7)
    back = restrict(rho, identity_embedding(algebra))
    assert max(np.abs(a - b).max() for a, b in zip(back.blocks, rho.blocks)) < 1e-12


def test_restrict_to_scalars_is_the_unit_state():
    rho = random_density(BlockAlgebra((3,)), 8)
    s = restrict(rho, trivial_embedding(rho.algebra))
    assert s.algebra.block_dims == (1,)
    assert abs(s.blocks[0][0, 0] - 1.0) < 1e-12


def test_bell_restriction_is_maximally_mixed():
    tp, bell = bell_pair()
    red = restrict(bell, tp.factor_embeddings[0])
    assert np.allclose(red.blocks[0], np.eye(2) / 2, atol=1e-12)


# -- partial trace ----------------------------------------------------------

def test_partial_trace_agrees_with_restrict(rng):
    tp = tensor_many([BlockAlgebra((2,)), BlockAlgebra((1, 2))])
    for seed in range(10):
        rho = random_density(tp.algebra, seed)
        for leg in (0, 1):
            a = partial_trace(rho, tp, leg)
            b = restrict(rho, tp.factor_embeddings[leg])
            assert max(np.abs(x - y).max() for x, y in zip(a.blocks, b.blocks)) < 1e-10


def test_partial_trace_of_product_state():
    tp = tensor(BlockAlgebra((2,)), BlockAlgebra((3,)))
    sigma = random_density(tp.factors[0], 3)
    tau = random_density(tp.factors[1], 4)
    rho = product_state(tp, [sigma, tau])
    red = partial_trace(rho, tp, 0)
    assert np.allclose(red.blocks[0], sigma.blocks[0], atol=1e-12)


def test_partial_trace_selector_out_of_range():
    tp = tensor(BlockAlgebra((2,)), BlockAlgebra((2,)))
    rho = random_density(tp.algebra, 0)
    with pytest.raises(ValidationError):
        partial_trace(rho, tp, 2)


# -- preadjoints ------------------------------------------------------------

def test_preadjoint_of_identity():
    algebra = BlockAlgebra((3,))
    rho = random_density(algebra, 5)
    out = preadjoint_apply(identity_map(algebra), rho)
    assert np.allclose(out.blocks[0], rho.blocks[0], atol=1e-12)


def test_preadjoint_of_multiplication_map_identifies_tensor():
    tp = tensor(BlockAlgebra((2,)), BlockAlgebra((2,)))
    pair = require_compatible(*tp.factor_embeddings)
    emb = generated_product_algebra(pair)
    mu = multiplication_map(pair, emb)
    rho = random_density(tp.algebra, 17)
    pushed = preadjoint_apply(mu, restrict(rho, emb))
    assert np.allclose(np.sort(pushed.eigenvalues()), np.sort(rho.eigenvalues()), atol=1e-9)


def test_preadjoint_diagonalization_pushforward():
    # a diagonalization of mu_* rho maps to a diagonalization of rho
    parent, = [tensor(BlockAlgebra((2,)), BlockAlgebra((2,)))]
    pair = require_compatible(*parent.factor_embeddings)
    emb = generated_product_algebra(pair)
    mu = multiplication_map(pair, emb)
    rho = restrict(random_density(parent.algebra, 23), emb)
    pushed = preadjoint_apply(mu, rho)
    spec = diagonalize(pushed)
    recon = [np.zeros((d, d), dtype=complex) for d in rho.algebra.block_dims]
    for val, proj in zip(spec.eigenvalues, spec.projectors):
        if val < 1e-12:
            continue
        image = mu.apply(proj.to_element())
        for i, b in enumerate(image.blocks):
            recon[i] += val * b
    assert max(np.abs(a - b).max() for a, b in zip(recon, rho.blocks)) < 1e-8


# -- diagonalize ------------------------------------------------------------

def test_diagonalize_uniform():
    rho = classical_state(make_commutative([0, 1]), [0.5, 0.5])
    spec = diagonalize(rho)
    assert np.allclose(spec.eigenvalues, [0.5, 0.5])


def test_diagonalize_pure():
    rho = pure_state(BlockAlgebra((2,)), 0, [1.0, 1.0])
    spec = diagonalize(rho)
    assert np.allclose(spec.eigenvalues, [1.0, 0.0], atol=1e-12)


def test_diagonalize_reconstructs(rng):
    for seed in range(12):
        algebra = BlockAlgebra((2, 3))
        rho = random_density(algebra, seed)
        spec = diagonalize(rho)
        back = reconstruct(spec, algebra)
        assert max(np.abs(a - b).max() for a, b in zip(back.blocks, rho.blocks)) < 1e-9
        # projectors are mutually orthogonal
        mats = [p.dense() for p in spec.projectors]
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                assert np.abs(mats[i] @ mats[j]).max() < 1e-9


# -- purification -----------------------------------------------------------

def test_purify_pure_state_is_rank_one():
    rho = pure_state(BlockAlgebra((2,)), 0, [1.0, 0.0])
    psi, tp = purify(rho)
    assert tp.factors[1].block_dims == (1,)
    assert psi.is_pure()


def test_purify_maximally_mixed_gives_bell():
    rho = DensityState(BlockAlgebra((2,)), [np.eye(2, dtype=complex) / 2])
    psi, tp = purify(rho)
    assert psi.is_pure()
    red = partial_trace(psi, tp, 0)
    assert np.allclose(red.blocks[0], np.eye(2) / 2, atol=1e-12)


def test_purify_round_trip_many():
    count = 0
    for d in range(2, 6):
        for seed in range(50):
            rho = random_density(BlockAlgebra((d,)), 1000 * d + seed)
            psi, tp = purify(rho)
            assert psi.is_pure(1e-9)
            back = partial_trace(psi, tp, 0)
            assert np.abs(back.blocks[0] - rho.blocks[0]).max() < 1e-9
            count += 1
    assert count == 200


def test_purify_rejects_multi_block():
    rho = classical_state(make_commutative([0, 1]), [0.5, 0.5])
    with pytest.raises(ValidationError):
        purify(rho)


def test_embed_into_full_preserves_spectrum():
    rho = random_density(BlockAlgebra((2, 2)), 9)
    full, emb = embed_into_full(rho)
    assert np.allclose(np.sort(full.eigenvalues()), np.sort(rho.eigenvalues()), atol=1e-12)
    back = restrict(full, emb)
    assert max(np.abs(a - b).max() for a, b in zip(back.blocks, rho.blocks)) < 1e-10


# -- separability -----------------------------------------------------------

def test_make_separable_single_product_term():
    a, b = BlockAlgebra((2,)), BlockAlgebra((2,))
    sa, sb = random_density(a, 1), random_density(b, 2)
    rho, cert = make_separable([(1.0, [sa, sb])])
    direct = product_state(cert.structure, [sa, sb])
    assert max(np.abs(x - y).max() for x, y in zip(rho.blocks, direct.blocks)) < 1e-12


def test_make_separable_classically_correlated():
    a = BlockAlgebra((2,))
    zero = pure_state(a, 0, [1.0, 0.0])
    one = pure_state(a, 0, [0.0, 1.0])
    rho, cert = make_separable([(0.5, [zero, zero]), (0.5, [one, one])])
    assert np.allclose(np.sort(rho.eigenvalues())[::-1][:2], [0.5, 0.5], atol=1e-12)
    assert len(cert.parts) == 2


def test_make_separable_rejects_bad_weights():
    a = BlockAlgebra((2,))
    with pytest.raises(ValidationError):
        make_separable([(0.7, [random_density(a, 1), random_density(a, 2)])])


# -- functoriality ----------------------------------------------------------

def test_restriction_diagram_commutes():
    # restricting directly to a factor agrees with going through the product
    # algebra and the multiplication map
    for seed in range(6):
        tp = tensor(BlockAlgebra((2,)), BlockAlgebra((2,)))
        rho = random_density(tp.algebra, seed)
        pair = require_compatible(*tp.factor_embeddings)
        emb = generated_product_algebra(pair)
        mu = multiplication_map(pair, emb)
        pushed = preadjoint_apply(mu, restrict(rho, emb))
        dom_tp = tensor_many([pair.left.domain, pair.right.domain])
        via_mu = partial_trace(pushed, dom_tp, 0)
        direct = restrict(rho, tp.factor_embeddings[0])
        assert max(np.abs(a - b).max()
                   for a, b in zip(via_mu.blocks, direct.blocks)) < 1e-9


def test_restrict_composes_with_embedding_composition():
    tp = tensor(BlockAlgebra((2,)), BlockAlgebra((2,)))
    inner_dom = make_commutative([0, 1])
    from qicalc import AlgebraElement, SubalgebraEmbedding, compose_embeddings
    m2 = tp.factors[0]
    inner = SubalgebraEmbedding(inner_dom, m2, [
        AlgebraElement(m2, [np.diag([1.0 + 0j, 0.0])]),
        AlgebraElement(m2, [np.diag([0.0, 1.0 + 0j])]),
    ])
    outer = tp.factor_embeddings[0]
    chained = compose_embeddings(outer, inner)
    rho = random_density(tp.algebra, 31)
    one_step = restrict(rho, chained)
    two_step = restrict(restrict(rho, outer), inner)
    assert max(np.abs(a - b).max() for a, b in zip(one_step.blocks, two_step.blocks)) < 1e-10
