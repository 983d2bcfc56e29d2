"""Executable checkers for the entropy and information inequalities.

Every checker evaluates both sides of its inequality on concrete inputs and
returns a structured :class:`InequalityVerdict` (lhs, rhs, slack, pass/fail
at a tolerance) so that unit tests and the randomized fuzzing harness can
consume the same code path.  Checkers never mutate their inputs; verdicts are
reproducible through the recorded input digest.

The registry at the bottom maps checker names to seeded instance generators
for the fuzzing front end.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _linalg as la
from ._digest import inputs_digest
from .algebra import (
    AlgebraElement,
    BlockAlgebra,
    CompatiblePair,
    SubalgebraEmbedding,
    leg_embedding,
    make_commutative,
    partition_embedding,
    product_embedding,
    require_compatible,
    tensor_many,
    trivial_embedding,
)
from .errors import ValidationError
from .infotheory import (
    _divergence_blocks,
    binary_entropy,
    cond_entropy_obs_given_subalgebra,
    cond_mutual_info_subalg,
    conditional_entropy_op,
    conditional_entropy_subalg,
    divergence,
    entropy_of_operation,
    entropy_of_subalgebra,
    mutual_info_obs,
    mutual_info_op,
    mutual_info_subalg,
    mutual_info_subalgebra_obs,
    von_neumann_entropy,
)
from .observable import (
    Povm,
    as_operation,
    computational_povm,
    measure,
    povm_from_columns,
    push_povm,
    random_povm,
)
from .operation import (
    KrausMap,
    compose,
    embedding_as_operation,
    identity_map,
    random_cptp,
    trace_map,
)
from .state import (
    DensityState,
    SeparabilityCertificate,
    classical_state,
    expectation,
    make_separable,
    preadjoint_apply,
    product_state,
    pure_state,
    random_density,
    restrict,
)

PASS_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class InequalityVerdict:
    """Both sides of one inequality instance, with slack = rhs - lhs."""

    name: str
    lhs_bits: float
    rhs_bits: float
    slack_bits: float
    tol: float
    passed: bool | None
    status: str
    inputs_digest: str
    details: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        def enc(x):
            if isinstance(x, float) and math.isinf(x):
                return "inf" if x > 0 else "-inf"
            return x
        return {
            "name": self.name,
            "lhs_bits": enc(self.lhs_bits),
            "rhs_bits": enc(self.rhs_bits),
            "slack_bits": enc(self.slack_bits),
            "tol": self.tol,
            "passed": self.passed,
            "status": self.status,
            "inputs_digest": self.inputs_digest,
            "details": {k: enc(v) for k, v in self.details.items()},
        }


def _verdict(name, lhs, rhs, tol, digest, status="ok", extra_ok=True, **details):
    lhs = float(lhs)
    rhs = float(rhs)
    if math.isinf(rhs):
        slack = math.inf
    elif math.isinf(lhs):
        slack = -math.inf
    else:
        slack = rhs - lhs
    passed = bool(slack >= -tol) and bool(extra_ok)
    if status != "ok":
        passed = None if status == "hypothesis-not-met" or status == "precondition-not-met" else passed
    return InequalityVerdict(name, lhs, rhs, slack, tol, passed, status, digest, dict(details))


# ---------------------------------------------------------------------------
# divergence inequalities
# ---------------------------------------------------------------------------

def _positive_blocks(x):
    if isinstance(x, DensityState):
        return list(x.blocks), True
    if isinstance(x, AlgebraElement):
        if not x.is_hermitian(1e-9) or x.min_eigenvalue() < -1e-8:
            raise ValidationError("inputs must be positive operators")
        tr = float(np.real(x.trace()))
        return [la.herm(b) for b in x.blocks], abs(tr - 1.0) <= 1e-9
    raise ValidationError("expected a DensityState or a positive AlgebraElement")


def check_klein(rho, sigma, *, tol: float = PASS_TOL) -> InequalityVerdict:
    """Divergence against its quadratic lower bound.

    lhs = (1/2) Tr(rho - sigma)^2 + Tr(rho - sigma), rhs = D(rho||sigma).
    For a pair of states the divergence is additionally flagged nonnegative.
    """
    rb, rho_is_state = _positive_blocks(rho)
    sb, sigma_is_state = _positive_blocks(sigma)
    if len(rb) != len(sb) or any(a.shape != b.shape for a, b in zip(rb, sb)):
        raise ValidationError("operands live on different algebras")
    diff = [a - b for a, b in zip(rb, sb)]
    quad = 0.5 * float(np.real(sum(np.trace(d @ d) for d in diff)))
    lin = float(np.real(sum(np.trace(d) for d in diff)))
    rhs = _divergence_blocks(rb, sb)
    digest = inputs_digest("klein", rb, sb)
    both_states = rho_is_state and sigma_is_state
    extra_ok = (rhs >= -tol) if both_states and not math.isinf(rhs) else True
    return _verdict("klein", quad + lin, rhs, tol, digest,
                    extra_ok=extra_ok, states=both_states)


def check_monotonicity(rho: DensityState, sigma: DensityState, phi: KrausMap,
                       *, tol: float = PASS_TOL) -> InequalityVerdict:
    """Divergence never increases under a trace-preserving state map."""
    if rho.algebra != phi.target or sigma.algebra != phi.target:
        raise ValidationError("states must live on the map's operator codomain")
    # unitality of the operator map is exactly trace preservation of the
    # state-side map, and it is enforced at construction
    lhs = divergence(preadjoint_apply(phi, rho), preadjoint_apply(phi, sigma)).bits
    rhs = divergence(rho, sigma).bits
    digest = inputs_digest("monotonicity", rho, sigma, phi)
    return _verdict("monotonicity", lhs, rhs, tol, digest)


# ---------------------------------------------------------------------------
# entropy inequalities (subalgebra language)
# ---------------------------------------------------------------------------

def check_subadditivity(a1: SubalgebraEmbedding, a2: SubalgebraEmbedding,
                        a3: SubalgebraEmbedding | None, rho: DensityState,
                        *, tol: float = PASS_TOL, seed: int = 0) -> InequalityVerdict:
    """Strong subadditivity H(A1 A2 A3) + H(A2) <= H(A1 A2) + H(A2 A3).

    With ``a3 is None`` the middle subalgebra is the scalars and the check is
    plain subadditivity of the two given subalgebras.
    """
    if a3 is None:
        name = "subadditivity"
        first, middle, third = a1, trivial_embedding(a1.parent), a2
    else:
        name = "strong_subadditivity"
        first, middle, third = a1, a2, a3
    h12 = entropy_of_subalgebra(product_embedding([first, middle], tol=1e-9, seed=seed), rho)
    h23 = entropy_of_subalgebra(product_embedding([middle, third], tol=1e-9, seed=seed), rho)
    h123 = entropy_of_subalgebra(product_embedding([first, middle, third], tol=1e-9, seed=seed), rho)
    h2 = entropy_of_subalgebra(middle, rho)
    digest = inputs_digest(name, rho, first, middle, third)
    return _verdict(name, h123 + h2, h12 + h23, tol, digest)


def check_pure_common_state(pair: CompatiblePair, rho: DensityState,
                            *, tol: float = PASS_TOL, seed: int = 0) -> InequalityVerdict:
    """If the state restricted to the product algebra is pure, the two
    marginal entropies agree."""
    xy = product_embedding([pair.left, pair.right], tol=1e-9, seed=seed)
    restricted = restrict(rho, xy)
    digest = inputs_digest("pure_common_state", rho, pair.left, pair.right)
    if not restricted.is_pure(1e-8):
        top = float(restricted.eigenvalues()[0])
        return _verdict("pure_common_state", 0.0, 0.0, tol, digest,
                        status="precondition-not-met", top_eigenvalue=top)
    hx = entropy_of_subalgebra(pair.left, rho)
    hy = entropy_of_subalgebra(pair.right, rho)
    return _verdict("pure_common_state", abs(hx - hy), 0.0, tol, digest)


def check_entropy_increase(phi: KrausMap, psi: KrausMap, rho: DensityState,
                           *, tol: float = PASS_TOL) -> InequalityVerdict:
    """H(psi o phi) >= H(psi) for trace-nonincreasing phi (on the operator side)."""
    if not phi.trace_nonincreasing:
        raise ValidationError("the inner map must be trace nonincreasing on operators")
    if phi.target != psi.source:
        raise ValidationError("maps do not chain: phi.target must equal psi.source")
    lhs = entropy_of_operation(psi, rho)
    rhs = entropy_of_operation(compose(psi, phi), rho)
    digest = inputs_digest("entropy_increase", rho, phi, psi)
    return _verdict("entropy_increase", lhs, rhs, tol, digest)


def check_triangle(pair: CompatiblePair, rho: DensityState,
                   *, tol: float = PASS_TOL, seed: int = 0) -> InequalityVerdict:
    """|H(X) - H(Y)| <= H(XY)."""
    hx = entropy_of_subalgebra(pair.left, rho)
    hy = entropy_of_subalgebra(pair.right, rho)
    hxy = entropy_of_subalgebra(product_embedding([pair.left, pair.right], tol=1e-9, seed=seed), rho)
    digest = inputs_digest("triangle", rho, pair.left, pair.right)
    return _verdict("triangle", abs(hx - hy), hxy, tol, digest)


# ---------------------------------------------------------------------------
# information inequalities
# ---------------------------------------------------------------------------

def _assert_valued_in(x: Povm, iota: SubalgebraEmbedding, what: str) -> None:
    span = la.stack_basis(la.orthonormal_operator_basis(
        [img.dense() for img in iota.unit_images]))
    for e in x.effects:
        if la.span_residual(span, e.dense()) > 1e-7:
            raise ValidationError(f"{what} does not take values in the given subalgebra")


def check_holevo_chain(x: Povm, y: Povm, pair: CompatiblePair, rho: DensityState,
                       *, tol: float = PASS_TOL, seed: int = 0) -> list[InequalityVerdict]:
    """The information bound I(X^Y) <= I(alg(X)^Y) <= I(alg(X)^alg(Y))."""
    _assert_valued_in(x, pair.left, "the first observable")
    _assert_valued_in(y, pair.right, "the second observable")
    i_obs = mutual_info_obs(x, y, rho)
    i_mixed = mutual_info_subalgebra_obs(pair.left, y, rho)
    i_alg = mutual_info_subalg(pair.left, pair.right, rho, tol=1e-9, seed=seed)
    digest = inputs_digest("holevo_chain", rho, x, y, pair.left, pair.right)
    return [
        _verdict("holevo_chain_observable", i_obs, i_mixed, tol, digest),
        _verdict("holevo_chain_subalgebra", i_mixed, i_alg, tol, digest),
    ]


def check_data_processing(phi1: KrausMap, phi2: KrausMap, psi1: KrausMap, psi2: KrausMap,
                          rho: DensityState, *, tol: float = PASS_TOL) -> InequalityVerdict:
    """I(psi1 o phi1 ^ psi2 o phi2) <= I(psi1 ^ psi2)."""
    lhs = mutual_info_op(compose(psi1, phi1), compose(psi2, phi2), rho)
    rhs = mutual_info_op(psi1, psi2, rho)
    digest = inputs_digest("data_processing", rho, phi1, phi2, psi1, psi2)
    return _verdict("data_processing", lhs, rhs, tol, digest)


def check_info_subadditivity(x1, x2, y1, y2, rho: DensityState, *, tol: float = PASS_TOL,
                             hyp_tol: float = PASS_TOL, seed: int = 0) -> InequalityVerdict:
    """I(X1 X2 ^ Y1 Y2) <= I(X1 ^ Y1) + I(X2 ^ Y2) under conditional
    independence of each Y_k from the rest given X_k.

    When a hypothesis fails beyond ``hyp_tol`` the verdict is marked
    ``hypothesis-not-met`` (with the residuals) instead of pass/fail.
    """
    kw = dict(tol=1e-9, seed=seed)
    x2y2 = product_embedding([x2, y2], **kw)
    x1y1 = product_embedding([x1, y1], **kw)
    hyp1 = cond_mutual_info_subalg(y1, x2y2, x1, rho, **kw)
    hyp2 = cond_mutual_info_subalg(y2, x1y1, x2, rho, **kw)
    digest = inputs_digest("info_subadditivity", rho, x1, x2, y1, y2)
    i1 = mutual_info_subalg(x1, y1, rho, **kw)
    i2 = mutual_info_subalg(x2, y2, rho, **kw)
    lhs = mutual_info_subalg(product_embedding([x1, x2], **kw),
                             product_embedding([y1, y2], **kw), rho, **kw)
    if max(abs(hyp1), abs(hyp2)) > hyp_tol:
        return _verdict("info_subadditivity", lhs, i1 + i2, tol, digest,
                        status="hypothesis-not-met",
                        hypothesis_residuals=(float(hyp1), float(hyp2)))
    return _verdict("info_subadditivity", lhs, i1 + i2, tol, digest,
                    hypothesis_residuals=(float(hyp1), float(hyp2)))


def check_info_subadditivity_chain(xs, ys, rho: DensityState, *, tol: float = PASS_TOL,
                                   hyp_tol: float = PASS_TOL, seed: int = 0) -> InequalityVerdict:
    """n-party form: I(X1..Xn ^ Y1..Yn) <= sum_k I(Xk ^ Yk), with each Y_k
    conditionally independent from the other parties given X_k."""
    if len(xs) != len(ys) or len(xs) < 2:
        raise ValidationError("need matching lists of at least two subalgebras")
    kw = dict(tol=1e-9, seed=seed)
    residuals = []
    for k in range(len(xs)):
        rest = [xs[j] for j in range(len(xs)) if j != k] + [ys[j] for j in range(len(ys)) if j != k]
        rest_emb = product_embedding(rest, **kw)
        residuals.append(cond_mutual_info_subalg(ys[k], rest_emb, xs[k], rho, **kw))
    lhs = mutual_info_subalg(product_embedding(list(xs), **kw),
                             product_embedding(list(ys), **kw), rho, **kw)
    rhs = sum(mutual_info_subalg(x, y, rho, **kw) for x, y in zip(xs, ys))
    digest = inputs_digest("info_subadditivity_chain", rho, list(xs), list(ys))
    status = "ok" if max(abs(r) for r in residuals) <= hyp_tol else "hypothesis-not-met"
    return _verdict("info_subadditivity_chain", lhs, rhs, tol, digest, status=status,
                    hypothesis_residuals=tuple(float(r) for r in residuals))


def check_info_upper_bound(pair: CompatiblePair, rho: DensityState,
                           *, tol: float = PASS_TOL, seed: int = 0) -> InequalityVerdict:
    """I(X ^ Y) <= 2 min{H(X), H(Y)}."""
    hx = entropy_of_subalgebra(pair.left, rho)
    hy = entropy_of_subalgebra(pair.right, rho)
    i = mutual_info_subalg(pair.left, pair.right, rho, tol=1e-9, seed=seed)
    digest = inputs_digest("info_upper_bound", rho, pair.left, pair.right)
    return _verdict("info_upper_bound", i, 2.0 * min(hx, hy), tol, digest)


# ---------------------------------------------------------------------------
# conditional entropy
# ---------------------------------------------------------------------------

def check_conditional_entropy_nonneg(phi: KrausMap, psi: KrausMap, rho: DensityState,
                                     *, tol: float = PASS_TOL) -> InequalityVerdict:
    """H(phi|psi) >= 0 when at least one operator domain is commutative."""
    if not (phi.source.is_commutative() or psi.source.is_commutative()):
        raise ValidationError("neither operator domain is commutative")
    h = conditional_entropy_op(phi, psi, rho)
    digest = inputs_digest("cond_entropy_nonneg", rho, phi, psi)
    return _verdict("cond_entropy_nonneg", 0.0, h, tol, digest)


def probe_separability_conjecture(rho: DensityState, certificate: SeparabilityCertificate,
                                  *, tol: float = PASS_TOL, seed: int = 0) -> list[InequalityVerdict]:
    """Probe H(X|Y) >= 0 and I(X^Y) <= min{H(X), H(Y)} on a certified
    separable state.  A negative slack here is a reportable finding, never a
    test failure; verdicts carry the ``conjecture`` status.
    """
    if certificate is None:
        raise ValidationError("a separability certificate is required")
    tp = certificate.structure
    if len(tp.factors) != 2:
        raise ValidationError("the probe needs exactly two tensor factors")
    if rho.algebra != tp.algebra:
        raise ValidationError("state does not live on the certificate's product algebra")
    ex, ey = tp.factor_embeddings
    hx = entropy_of_subalgebra(ex, rho)
    hy = entropy_of_subalgebra(ey, rho)
    hcond = conditional_entropy_subalg(ex, ey, rho, tol=1e-9, seed=seed)
    i = hx - hcond
    digest = inputs_digest("separability_conjecture", rho)
    return [
        _verdict("separability_conjecture_cond_entropy", 0.0, hcond, tol, digest,
                 status="conjecture"),
        _verdict("separability_conjecture_info_bound", i, min(hx, hy), tol, digest,
                 status="conjecture"),
    ]


def check_knowledge_decreases(psi: KrausMap, phi: KrausMap, phi_prime: KrausMap,
                              rho: DensityState, *, tol: float = PASS_TOL) -> list[InequalityVerdict]:
    """H(psi|phi) <= H(psi|phi o phi') and H(psi|phi) <= H(psi)."""
    coarse = compose(phi, phi_prime)
    h_fine = conditional_entropy_op(psi, phi, rho)
    h_coarse = conditional_entropy_op(psi, coarse, rho)
    h_plain = entropy_of_operation(psi, rho)
    digest = inputs_digest("knowledge_decreases", rho, psi, phi, phi_prime)
    return [
        _verdict("knowledge_decreases", h_fine, h_coarse, tol, digest),
        _verdict("knowledge_decreases_plain", h_fine, h_plain, tol, digest),
    ]


def check_fano(x: Povm, y_alg: SubalgebraEmbedding, y: Povm, rho: DensityState,
               *, x_emb: SubalgebraEmbedding | None = None,
               tol: float = PASS_TOL, seed: int = 0) -> list[InequalityVerdict]:
    """H(X|alg(Y)) <= h(P_e) + P_e log(|X| - 1) with P_e = 1 - sum_j Tr(rho X_j Y_j).

    With ``x_emb`` (a commutative subalgebra carrying X as its maximal
    observable) the corollary form with the support count of the restricted
    state is checked as well.
    """
    if tuple(x.outcomes) != tuple(y.outcomes):
        raise ValidationError("estimator must be indexed by the same label set")
    _assert_valued_in(y, y_alg, "the estimating observable")
    p_e = 1.0 - float(np.real(sum(
        expectation(rho, xe @ ye) for xe, ye in zip(x.effects, y.effects))))
    p_e = min(max(p_e, 0.0), 1.0)
    m = len(x.outcomes)
    rhs = binary_entropy(p_e) + (p_e * math.log2(m - 1) if m > 1 else 0.0)
    lhs = cond_entropy_obs_given_subalgebra(x, y_alg, rho)
    digest = inputs_digest("fano", rho, x, y, y_alg)
    out = [_verdict("fano", lhs, rhs, tol, digest, error_probability=p_e)]
    if x_emb is not None:
        if not x_emb.domain.is_commutative():
            raise ValidationError("the corollary needs a commutative subalgebra")
        restricted = restrict(rho, x_emb)
        support = int(np.sum(restricted.eigenvalues() > 1e-10))
        rhs_c = binary_entropy(p_e) + (p_e * math.log2(support - 1) if support > 1 else 0.0)
        lhs_c = conditional_entropy_subalg(x_emb, y_alg, rho, tol=1e-9, seed=seed)
        out.append(_verdict("fano_corollary", lhs_c, rhs_c, tol, digest,
                            error_probability=p_e, support=support))
    return out


# ---------------------------------------------------------------------------
# seeded instance generators
# ---------------------------------------------------------------------------

def _conjugated_pair(rng, d1, d2):
    """Tensor factor subalgebras of a full matrix algebra in a random basis."""
    tp = tensor_many([BlockAlgebra((d1,)), BlockAlgebra((d2,))])
    u = la.random_unitary(rng, d1 * d2)
    parent = tp.algebra
    def conj(emb):
        images = [AlgebraElement.from_dense(parent, u @ img.dense() @ la.dag(u), tol=1e-8)
                  for img in emb.unit_images]
        return SubalgebraEmbedding(emb.domain, parent, images, validate=False)
    return parent, conj(tp.factor_embeddings[0]), conj(tp.factor_embeddings[1])


def random_factor_pair(seed: int, d1: int = 2, d2: int = 2):
    """Random compatible pair (conjugated tensor factors) with a random state."""
    rng = np.random.default_rng(seed)
    parent, ex, ey = _conjugated_pair(rng, d1, d2)
    rho = random_density(parent, rng)
    return parent, ex, ey, rho


def random_reductive_pair(seed: int):
    """Random subalgebra with its commutant; block structure is nontrivial.

    The parent splits into sectors c_i x m_i; the left algebra acts as the
    c_i factors, the right as the m_i factors, and their generated product
    has blocks of dimension c_i * m_i.
    """
    rng = np.random.default_rng(seed)
    shapes = [[(2, 2)], [(2, 3)], [(3, 2)], [(2, 1), (1, 2)], [(1, 2), (2, 2)], [(2, 2), (1, 1)]]
    sectors = shapes[int(rng.integers(len(shapes)))]
    n = sum(c * m for c, m in sectors)
    parent = BlockAlgebra((n,))
    u = la.random_unitary(rng, n)
    def build(side):
        dims = tuple((c if side == "l" else m) for c, m in sectors)
        dom = BlockAlgebra(dims)
        images = []
        for i, k, l in dom.unit_triples():
            c, m = sectors[i]
            d = c if side == "l" else m
            e = np.zeros((d, d), dtype=np.complex128)
            e[k, l] = 1.0
            piece = np.kron(e, np.eye(m)) if side == "l" else np.kron(np.eye(c), e)
            dense = np.zeros((n, n), dtype=np.complex128)
            off = sum(cc * mm for cc, mm in sectors[:i])
            span = sectors[i][0] * sectors[i][1]
            dense[off:off + span, off:off + span] = piece
            images.append(AlgebraElement.from_dense(parent, u @ dense @ la.dag(u), tol=1e-8))
        return SubalgebraEmbedding(dom, parent, images, validate=False)
    return parent, build("l"), build("r"), sectors


def _fuzz_klein(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 5))
    algebra = BlockAlgebra((d,))
    rho = random_density(algebra, rng)
    sigma = random_density(algebra, rng)
    return [check_klein(rho, sigma)]


def _safe_cptp(rng, source_dim, target_dim, seed):
    low = -(-target_dim // source_dim)  # ceil
    rank = int(rng.integers(low, low + 3))
    return random_cptp(source_dim, target_dim, rank, seed)


def _fuzz_monotonicity(seed):
    rng = np.random.default_rng(seed)
    d_in = int(rng.integers(2, 5))
    d_out = int(rng.integers(2, 5))
    phi = _safe_cptp(rng, d_out, d_in, seed + 104729)
    rho = random_density(phi.target, rng)
    sigma = random_density(phi.target, rng)
    return [check_monotonicity(rho, sigma, phi)]


def _fuzz_ssa(seed):
    rng = np.random.default_rng(seed)
    tp = tensor_many([BlockAlgebra((2,))] * 3)
    rho = random_density(tp.algebra, rng)
    e1, e2, e3 = tp.factor_embeddings
    out = [check_subadditivity(e1, e2, e3, rho, seed=seed)]
    out.append(check_subadditivity(e1, e3, None, rho, seed=seed))
    return out


def _fuzz_pure_common(seed):
    rng = np.random.default_rng(seed)
    d1 = int(rng.integers(2, 5))
    d2 = int(rng.integers(2, 5))
    tp = tensor_many([BlockAlgebra((d1,)), BlockAlgebra((d2,))])
    vec = rng.standard_normal(d1 * d2) + 1j * rng.standard_normal(d1 * d2)
    rho = pure_state(tp.algebra, 0, vec)
    pair = require_compatible(tp.factor_embeddings[0], tp.factor_embeddings[1])
    return [check_pure_common_state(pair, rho, seed=seed)]


def _fuzz_entropy_increase(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 5))
    algebra = BlockAlgebra((d,))
    rho = random_density(algebra, rng)
    basis = povm_from_columns(algebra, la.random_unitary(rng, d))
    phi = as_operation(basis)
    psi = identity_map(algebra)
    return [check_entropy_increase(phi, psi, rho)]


def _fuzz_triangle(seed):
    rng = np.random.default_rng(seed)
    parent, ex, ey, rho = random_factor_pair(seed, int(rng.integers(2, 4)), int(rng.integers(2, 4)))
    pair = require_compatible(ex, ey)
    return [check_triangle(pair, rho, seed=seed)]


def _fuzz_holevo_chain(seed):
    rng = np.random.default_rng(seed)
    d1 = int(rng.integers(2, 4))
    d2 = int(rng.integers(2, 4))
    parent, ex, ey, rho = random_factor_pair(seed, d1, d2)
    pair = require_compatible(ex, ey)
    x = push_povm(ex, random_povm(ex.domain, int(rng.integers(2, 4)), rng))
    y = push_povm(ey, random_povm(ey.domain, int(rng.integers(2, 4)), rng))
    return check_holevo_chain(x, y, pair, rho, seed=seed)


def _fuzz_data_processing(seed):
    rng = np.random.default_rng(seed)
    d1 = int(rng.integers(2, 4))
    d2 = int(rng.integers(2, 4))
    parent, ex, ey, rho = random_factor_pair(seed, d1, d2)
    psi1 = embedding_as_operation(ex)
    psi2 = embedding_as_operation(ey)
    phi1 = _safe_cptp(rng, int(rng.integers(2, 4)), d1, seed + 11)
    phi2 = _safe_cptp(rng, int(rng.integers(2, 4)), d2, seed + 13)
    return [check_data_processing(phi1, phi2, psi1, psi2, rho)]


def corollary_channel_state(seed: int, sizes=(2, 2), out_dims=(2, 2)):
    """Random two-party channel state: classical inputs, per-party letter states."""
    rng = np.random.default_rng(seed)
    xs_algs = [make_commutative(range(s)) for s in sizes]
    ys_algs = [BlockAlgebra((d,)) for d in out_dims]
    tp = tensor_many(xs_algs + ys_algs)
    p = rng.dirichlet(np.ones(int(np.prod(sizes)))).reshape(sizes)
    letters = [[random_density(a, rng) for _ in range(s)] for a, s in zip(ys_algs, sizes)]
    blocks = [np.zeros((d, d), dtype=np.complex128) for d in tp.algebra.block_dims]
    for b, bt in enumerate(tp.block_tuples):
        x_idx = bt[:len(sizes)]
        weight = p[x_idx]
        mats = [letters[i][x_idx[i]].blocks[bt[len(sizes) + i]] for i in range(len(out_dims))]
        blocks[b] += weight * la.kron_list(mats)
    rho = DensityState(tp.algebra, blocks)
    legs = []
    nf = len(tp.factors)
    for i in range(nf):
        parts = [None] * nf
        parts[i] = "full"
        legs.append(leg_embedding(tp, parts))
    return rho, legs[:len(sizes)], legs[len(sizes):]


def _fuzz_info_subadd(seed):
    rho, xs, ys = corollary_channel_state(seed)
    return [check_info_subadditivity(xs[0], xs[1], ys[0], ys[1], rho, seed=seed)]


def _fuzz_info_upper(seed):
    rng = np.random.default_rng(seed)
    parent, ex, ey, rho = random_factor_pair(seed, int(rng.integers(2, 4)), int(rng.integers(2, 4)))
    pair = require_compatible(ex, ey)
    return [check_info_upper_bound(pair, rho, seed=seed)]


def _fuzz_cond_entropy_nonneg(seed):
    rng = np.random.default_rng(seed)
    nx = int(rng.integers(2, 4))
    dy = int(rng.integers(2, 4))
    tp = tensor_many([make_commutative(range(nx)), BlockAlgebra((dy,))])
    p = rng.dirichlet(np.ones(nx))
    letters = [random_density(tp.factors[1], rng) for _ in range(nx)]
    blocks = [p[bt[0]] * letters[bt[0]].blocks[0] for bt in tp.block_tuples]
    rho = DensityState(tp.algebra, blocks)
    phi_c = embedding_as_operation(tp.factor_embeddings[0])
    psi_q = embedding_as_operation(tp.factor_embeddings[1])
    return [
        check_conditional_entropy_nonneg(phi_c, psi_q, rho),   # commutative first slot
        check_conditional_entropy_nonneg(psi_q, phi_c, rho),   # commutative second slot
    ]


def _fuzz_separability(seed):
    rng = np.random.default_rng(seed)
    d1 = int(rng.integers(2, 4))
    d2 = int(rng.integers(2, 4))
    a1, a2 = BlockAlgebra((d1,)), BlockAlgebra((d2,))
    terms = int(rng.integers(1, 5))
    weights = rng.dirichlet(np.ones(terms))
    parts = [(float(w), [random_density(a1, rng), random_density(a2, rng)]) for w in weights]
    rho, cert = make_separable(parts)
    return probe_separability_conjecture(rho, cert, seed=seed)


def _fuzz_knowledge(seed):
    rng = np.random.default_rng(seed)
    d1 = int(rng.integers(2, 4))
    d2 = int(rng.integers(2, 4))
    parent, ex, ey, rho = random_factor_pair(seed, d1, d2)
    psi = embedding_as_operation(ey)
    phi = embedding_as_operation(ex)
    phi_prime = _safe_cptp(rng, int(rng.integers(2, 4)), d1, seed + 17)
    return check_knowledge_decreases(psi, phi, phi_prime, rho)


def _fuzz_fano(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 4))
    dy = int(rng.integers(2, 4))
    tp = tensor_many([make_commutative(range(m)), BlockAlgebra((dy,))])
    p = rng.dirichlet(np.ones(m))
    letters = [random_density(tp.factors[1], rng) for _ in range(m)]
    blocks = [p[bt[0]] * letters[bt[0]].blocks[0] for bt in tp.block_tuples]
    rho = DensityState(tp.algebra, blocks)
    x = push_povm(tp.factor_embeddings[0], computational_povm(tp.factors[0]))
    y = push_povm(tp.factor_embeddings[1], random_povm(tp.factors[1], m, rng))
    y = Povm(tp.algebra, x.outcomes, y.effects, validate=False)
    return check_fano(x, tp.factor_embeddings[1], y, rho,
                      x_emb=tp.factor_embeddings[0], seed=seed)


# ---------------------------------------------------------------------------
# equality fixtures
# ---------------------------------------------------------------------------

def _bell_pair():
    tp = tensor_many([BlockAlgebra((2,)), BlockAlgebra((2,))])
    vec = np.zeros(4, dtype=np.complex128)
    vec[0] = vec[3] = 1.0 / np.sqrt(2.0)
    return tp, pure_state(tp.algebra, 0, vec)


def _fixtures_klein():
    rho = random_density(BlockAlgebra((3,)), 0)
    v = check_klein(rho, rho)
    return [v]


def _fixtures_monotonicity():
    algebra = BlockAlgebra((3,))
    rho = random_density(algebra, 1)
    sigma = random_density(algebra, 2)
    return [check_monotonicity(rho, sigma, identity_map(algebra))]


def _fixtures_ssa():
    tp = tensor_many([BlockAlgebra((2,)), BlockAlgebra((2,))])
    rho = product_state(tp, [random_density(tp.factors[0], 3), random_density(tp.factors[1], 4)])
    return [check_subadditivity(tp.factor_embeddings[0], tp.factor_embeddings[1], None, rho)]


def _fixtures_pure_common():
    tp, bell = _bell_pair()
    pair = require_compatible(tp.factor_embeddings[0], tp.factor_embeddings[1])
    return [check_pure_common_state(pair, bell)]


def _fixtures_entropy_increase():
    algebra = BlockAlgebra((3,))
    rho = random_density(algebra, 5)
    w, v = np.linalg.eigh(rho.blocks[0])
    basis = povm_from_columns(algebra, v)
    return [check_entropy_increase(as_operation(basis), identity_map(algebra), rho)]


def _fixtures_triangle():
    tp, bell = _bell_pair()
    pair = require_compatible(tp.factor_embeddings[0], tp.factor_embeddings[1])
    return [check_triangle(pair, bell)]


def _fixtures_holevo():
    # fully classical, maximal observables: both links are equalities
    tp = tensor_many([make_commutative([0, 1]), make_commutative([0, 1])])
    p = np.array([[0.4, 0.1], [0.2, 0.3]])
    blocks = [np.array([[p[bt[0], bt[1]] + 0j]]) for bt in tp.block_tuples]
    rho = DensityState(tp.algebra, blocks)
    pair = require_compatible(tp.factor_embeddings[0], tp.factor_embeddings[1])
    x = push_povm(tp.factor_embeddings[0], computational_povm(tp.factors[0]))
    y = push_povm(tp.factor_embeddings[1], computational_povm(tp.factors[1]))
    return check_holevo_chain(x, y, pair, rho)


def _fixtures_data_processing():
    parent, ex, ey, rho = random_factor_pair(23, 2, 2)
    psi1 = embedding_as_operation(ex)
    psi2 = embedding_as_operation(ey)
    return [check_data_processing(identity_map(ex.domain), identity_map(ey.domain),
                                  psi1, psi2, rho)]


def _fixtures_info_subadd():
    # independent channels with a product input distribution: equality
    rng = np.random.default_rng(29)
    xs_algs = [make_commutative([0, 1]), make_commutative([0, 1])]
    ys_algs = [BlockAlgebra((2,)), BlockAlgebra((2,))]
    tp = tensor_many(xs_algs + ys_algs)
    p1 = rng.dirichlet(np.ones(2))
    p2 = rng.dirichlet(np.ones(2))
    letters = [[random_density(ys_algs[i], rng) for _ in range(2)] for i in range(2)]
    blocks = [np.zeros((d, d), dtype=np.complex128) for d in tp.algebra.block_dims]
    for b, bt in enumerate(tp.block_tuples):
        w = p1[bt[0]] * p2[bt[1]]
        blocks[b] += w * np.kron(letters[0][bt[0]].blocks[bt[2]], letters[1][bt[1]].blocks[bt[3]])
    rho = DensityState(tp.algebra, blocks)
    legs = []
    for i in range(4):
        parts = [None] * 4
        parts[i] = "full"
        legs.append(leg_embedding(tp, parts))
    return [check_info_subadditivity(legs[0], legs[1], legs[2], legs[3], rho)]


def _fixtures_info_upper():
    tp, bell = _bell_pair()
    pair = require_compatible(tp.factor_embeddings[0], tp.factor_embeddings[1])
    return [check_info_upper_bound(pair, bell)]


def _fixtures_cond_entropy():
    # perfectly correlated classical pair: H(X|Y) = 0
    tp = tensor_many([make_commutative([0, 1]), make_commutative([0, 1])])
    blocks = [np.array([[0.5 + 0j]]) if bt[0] == bt[1] else np.array([[0.0 + 0j]])
              for bt in tp.block_tuples]
    rho = DensityState(tp.algebra, blocks)
    phi = embedding_as_operation(tp.factor_embeddings[0])
    psi = embedding_as_operation(tp.factor_embeddings[1])
    return [check_conditional_entropy_nonneg(phi, psi, rho)]


def _fixtures_knowledge():
    parent, ex, ey, rho = random_factor_pair(31, 2, 2)
    psi = embedding_as_operation(ey)
    phi = embedding_as_operation(ex)
    return [check_knowledge_decreases(psi, phi, identity_map(ex.domain), rho)[0]]


def _fixtures_fano():
    # perfect classical correlation: P_e = 0 and H(X|Y) = 0
    tp = tensor_many([make_commutative([0, 1]), make_commutative([0, 1])])
    blocks = [np.array([[0.5 + 0j]]) if bt[0] == bt[1] else np.array([[0.0 + 0j]])
              for bt in tp.block_tuples]
    rho = DensityState(tp.algebra, blocks)
    x = push_povm(tp.factor_embeddings[0], computational_povm(tp.factors[0]))
    y = push_povm(tp.factor_embeddings[1], computational_povm(tp.factors[1]))
    return check_fano(x, tp.factor_embeddings[1], y, rho, x_emb=tp.factor_embeddings[0])


def _fixtures_separability():
    # product state: H(X|Y) = H(X) >= 0, slack equals H(X)
    a = BlockAlgebra((2,))
    rho, cert = make_separable([(1.0, [random_density(a, 41), random_density(a, 42)])])
    return probe_separability_conjecture(rho, cert)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckerEntry:
    name: str
    fuzz: Callable[[int], list[InequalityVerdict]]
    fixtures: Callable[[], list[InequalityVerdict]]
    conjecture: bool = False


REGISTRY: dict[str, CheckerEntry] = {}


def _register(name, fuzz, fixtures, conjecture=False):
    REGISTRY[name] = CheckerEntry(name, fuzz, fixtures, conjecture)


_register("klein", _fuzz_klein, _fixtures_klein)
_register("monotonicity", _fuzz_monotonicity, _fixtures_monotonicity)
_register("ssa", _fuzz_ssa, _fixtures_ssa)
_register("pure_common_state", _fuzz_pure_common, _fixtures_pure_common)
_register("entropy_increase", _fuzz_entropy_increase, _fixtures_entropy_increase)
_register("triangle", _fuzz_triangle, _fixtures_triangle)
_register("holevo_chain", _fuzz_holevo_chain, _fixtures_holevo)
_register("data_processing", _fuzz_data_processing, _fixtures_data_processing)
_register("info_subadditivity", _fuzz_info_subadd, _fixtures_info_subadd)
_register("info_upper_bound", _fuzz_info_upper, _fixtures_info_upper)
_register("cond_entropy_nonneg", _fuzz_cond_entropy_nonneg, _fixtures_cond_entropy)
_register("knowledge_decreases", _fuzz_knowledge, _fixtures_knowledge)
_register("fano", _fuzz_fano, _fixtures_fano)
_register("separability_conjecture", _fuzz_separability, _fixtures_separability, conjecture=True)


def run_random_suite(name: str, count: int, seed: int = 0,
                     threads: int | None = None) -> list[InequalityVerdict]:
    """Run a checker on ``count`` seeded random instances, merged by index."""
    if name not in REGISTRY:
        raise ValidationError(f"unknown checker {name!r}; registered: {sorted(REGISTRY)}")
    entry = REGISTRY[name]
    if threads is None:
        threads = int(os.environ.get("QICALC_THREADS", "1"))
    seeds = [seed + i for i in range(count)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(entry.fuzz, seeds))
    else:
        chunks = [entry.fuzz(s) for s in seeds]
    return [v for chunk in chunks for v in chunk]


@dataclass(frozen=True)
class SuiteSummary:
    name: str
    count: int
    min_slack_bits: float
    failures: int
    skipped: int


def summarize(verdicts) -> list[SuiteSummary]:
    by_name: dict[str, list[InequalityVerdict]] = {}
    for v in verdicts:
        by_name.setdefault(v.name, []).append(v)
    out = []
    for name in sorted(by_name):
        vs = by_name[name]
        finite = [v.slack_bits for v in vs if not math.isinf(v.slack_bits)]
        min_slack = min(finite) if finite else math.inf
        failures = sum(1 for v in vs if v.passed is False and v.status == "ok")
        skipped = sum(1 for v in vs if v.passed is None)
        out.append(SuiteSummary(name, len(vs), float(min_slack), failures, skipped))
    return out
