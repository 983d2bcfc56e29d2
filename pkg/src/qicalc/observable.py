"""Finite POVMs: measurement, compatibility, joints, and operation forms.

An observable here is a finite resolution of the unit into positive
operators, indexed by outcome labels.  Measuring a state yields the outcome
distribution ``p_j = Tr(rho X_j)``.  Observables reappear as quantum
operations in three ways: the exterior part (linear extension of the effect
assignment from the outcome functions), the total operation on outcome-tagged
operators ``j (x) A -> sqrt(X_j) A sqrt(X_j)``, and its interior part.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _linalg as la
from .algebra import (
    AlgebraElement,
    BlockAlgebra,
    SubalgebraEmbedding,
    TensorProduct,
    make_commutative,
    tensor_many,
)
from .errors import IncompatibleError, ValidationError
from .operation import KrausMap
from .state import DensityState, expectation

EFFECT_FLOOR = 1e-8
SUM_TOL = 1e-10


class Povm:
    """Positive operators indexed by outcome labels, summing to the unit."""

    __slots__ = ("algebra", "outcomes", "effects")

    def __init__(self, algebra: BlockAlgebra, outcomes, effects, *,
                 sum_tol: float = SUM_TOL, effect_floor: float = EFFECT_FLOOR,
                 validate: bool = True):
        outcomes = tuple(outcomes)
        effects = tuple(effects)
        if validate:
            if len(outcomes) != len(effects) or not outcomes:
                raise ValidationError("need one effect per outcome, and at least one outcome")
            if len(set(outcomes)) != len(outcomes):
                raise ValidationError("outcome labels must be distinct")
            for e in effects:
                if e.algebra != algebra:
                    raise ValidationError("effects must live on the declared algebra")
                if not e.is_hermitian(1e-9):
                    raise ValidationError("effects must be Hermitian")
                if e.min_eigenvalue() < -effect_floor:
                    raise ValidationError(
                        f"effect has eigenvalue {e.min_eigenvalue():.3e} below the floor")
            total = algebra.zero()
            for e in effects:
                total = total + e
            defect = (total - algebra.identity()).norm()
            if defect > sum_tol:
                # one symmetric renormalization S^-1/2 X S^-1/2, then re-check
                if defect > 1e-6:
                    raise ValidationError(f"effects sum to the unit only within {defect:.3e}")
                s_inv = _inv_sqrt(total)
                effects = tuple(
                    AlgebraElement(algebra, [si @ b @ si for si, b in zip(s_inv, e.blocks)],
                                   validate=False).herm_part()
                    for e in effects)
            effects = tuple(e.herm_part() for e in effects)
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "effects", effects)

    def __setattr__(self, name, value):
        raise AttributeError("Povm is immutable")

    def effect(self, label) -> AlgebraElement:
        return self.effects[self.outcomes.index(label)]

    def unit_defect(self) -> float:
        total = self.algebra.zero()
        for e in self.effects:
            total = total + e
        return (total - self.algebra.identity()).norm()

    def outcome_algebra(self) -> BlockAlgebra:
        return make_commutative(self.outcomes)

    def digest_parts(self):
        return ("povm", self.algebra, tuple(map(repr, self.outcomes)),
                [e.digest_parts() for e in self.effects])


def _inv_sqrt(total: AlgebraElement):
    out = []
    for b in total.blocks:
        w, v = np.linalg.eigh(la.herm(b))
        out.append((v * (1.0 / np.sqrt(np.clip(w, 1e-12, None)))) @ la.dag(v))
    return out


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities attached to outcome labels."""

    outcomes: tuple
    probabilities: tuple[float, ...]

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if np.any(p < -1e-10):
            raise ValidationError("probabilities must be nonnegative")
        if abs(p.sum() - 1.0) > 1e-9:
            raise ValidationError(f"probabilities sum to {p.sum()!r}")

    def probability(self, label) -> float:
        return self.probabilities[self.outcomes.index(label)]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probabilities, dtype=float)

    def digest_parts(self):
        return ("distribution", tuple(map(repr, self.outcomes)), list(self.probabilities))


def measure(x: Povm, rho: DensityState) -> OutcomeDistribution:
    """Born statistics p_j = Tr(rho X_j), clamped against tiny negatives."""
    if x.algebra != rho.algebra:
        raise ValidationError("observable and state live on different algebras")
    probs = np.array([float(np.real(expectation(rho, e))) for e in x.effects])
    if np.any(probs < -1e-10):
        raise ValidationError(f"negative outcome probability {probs.min():.3e}")
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum()
    return OutcomeDistribution(x.outcomes, tuple(float(p) for p in probs))


@dataclass(frozen=True)
class ObservableCompatibility:
    """Outcome of an elementwise commutation check between two observables."""

    compatible: bool
    max_commutator_norm: float
    worst_pair: tuple | None
    tol: float


def check_observable_compatible(x: Povm, y: Povm, tol: float = 1e-9) -> ObservableCompatibility:
    if x.algebra != y.algebra:
        raise ValidationError("observables live on different algebras")
    worst = 0.0
    pair = None
    for jx, a in zip(x.outcomes, x.effects):
        for jy, b in zip(y.outcomes, y.effects):
            nrm = (a @ b - b @ a).norm()
            if nrm > worst:
                worst, pair = nrm, (jx, jy)
    return ObservableCompatibility(worst <= tol, worst, pair, tol)


def joint(x: Povm, y: Povm, *, tol: float = 1e-9) -> Povm:
    """Joint observable on pair labels, with effects X_j Y_k."""
    report = check_observable_compatible(x, y, tol)
    if not report.compatible:
        raise IncompatibleError(
            f"observables do not commute: worst commutator {report.max_commutator_norm:.3e} "
            f"at outcomes {report.worst_pair}",
            commutator_norm=report.max_commutator_norm)
    outcomes = []
    effects = []
    for jx, a in zip(x.outcomes, x.effects):
        for jy, b in zip(y.outcomes, y.effects):
            outcomes.append((jx, jy))
            effects.append((a @ b).herm_part())
    return Povm(x.algebra, outcomes, effects)


def joint_many(povms, *, tol: float = 1e-9) -> Povm:
    """Left fold of pairwise joints; labels nest as pairs."""
    povms = list(povms)
    acc = povms[0]
    for nxt in povms[1:]:
        acc = joint(acc, nxt, tol=tol)
    return acc


def as_operation(x: Povm) -> KrausMap:
    """The exterior operation from the outcome functions into the algebra."""
    source = x.outcome_algebra()
    return KrausMap.from_unit_action(source, x.algebra, list(x.effects))


@dataclass(frozen=True, eq=False)
class TotalObservableOperation:
    """Total operation of an observable with its interior part."""

    total: KrausMap
    interior: KrausMap
    source_structure: TensorProduct


def total_operation(x: Povm) -> TotalObservableOperation:
    """j (x) A -> sqrt(X_j) A sqrt(X_j), and the interior sum over outcomes."""
    algebra = x.algebra
    n = algebra.total_dim
    roots = []
    for e in x.effects:
        roots.append(la.blocks_to_dense([la.psd_sqrt(b, EFFECT_FLOOR) for b in e.blocks]))
    interior = KrausMap(algebra, algebra, roots, validate_structure=False)
    tp = tensor_many([x.outcome_algebra(), algebra])
    ns = tp.algebra.total_dim
    kraus = []
    for j, root in enumerate(roots):
        v = np.zeros((ns, n), dtype=np.complex128)
        v[j * n:(j + 1) * n, :] = root
        kraus.append(v)
    tot = KrausMap(tp.algebra, algebra, kraus, validate_structure=False)
    return TotalObservableOperation(tot, interior, tp)


def post_measurement_states(x: Povm, rho: DensityState):
    """Pairs (probability, sqrt(X_j) rho sqrt(X_j) / p_j); None for null outcomes."""
    out = []
    for label, e in zip(x.outcomes, x.effects):
        roots = [la.psd_sqrt(b, EFFECT_FLOOR) for b in e.blocks]
        blocks = [r @ s @ r for r, s in zip(roots, rho.blocks)]
        p = float(np.real(sum(np.trace(b) for b in blocks)))
        if p <= 1e-12:
            out.append((label, 0.0, None))
        else:
            out.append((label, p, DensityState(rho.algebra, [b / p for b in blocks])))
    return out


def push_povm(iota: SubalgebraEmbedding, x: Povm) -> Povm:
    """Image of an observable under a subalgebra embedding."""
    if x.algebra != iota.domain:
        raise ValidationError("observable does not live on the embedding's domain")
    return Povm(iota.parent, x.outcomes, [iota.apply(e) for e in x.effects])


def computational_povm(algebra: BlockAlgebra) -> Povm:
    """Projective measurement onto the canonical basis of every block.

    Outcomes are the block labels for commutative algebras, otherwise
    (block, index) pairs.
    """
    outcomes = []
    effects = []
    for i, d in enumerate(algebra.block_dims):
        for k in range(d):
            if algebra.labels is not None:
                outcomes.append(algebra.labels[i])
            elif algebra.is_commutative():
                outcomes.append(i)
            elif algebra.num_blocks == 1:
                outcomes.append(k)
            else:
                outcomes.append((i, k))
            effects.append(algebra.matrix_unit(i, k, k))
    return Povm(algebra, outcomes, effects, validate=False)


def povm_from_columns(algebra: BlockAlgebra, u: np.ndarray) -> Povm:
    """Von Neumann measurement in the basis given by unitary columns."""
    if algebra.num_blocks != 1:
        raise ValidationError("basis measurements need a single-block algebra")
    d = algebra.block_dims[0]
    u = la.as_complex(u)
    if u.shape != (d, d):
        raise ValidationError(f"unitary of shape {u.shape}, expected {(d, d)}")
    effects = [AlgebraElement(algebra, [np.outer(u[:, k], u[:, k].conj())], validate=False)
               for k in range(d)]
    return Povm(algebra, tuple(range(d)), effects)


def random_povm(algebra: BlockAlgebra, n_outcomes: int, seed) -> Povm:
    """Random POVM from normalized Ginibre positives; seeded and deterministic."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if n_outcomes < 1:
        raise ValidationError("need at least one outcome")
    raws = []
    for _ in range(n_outcomes):
        blocks = []
        for d in algebra.block_dims:
            g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            blocks.append(g @ la.dag(g))
        raws.append(blocks)
    totals = [sum(b[i] for b in raws) for i in range(algebra.num_blocks)]
    inv_roots = []
    for t in totals:
        w, v = np.linalg.eigh(la.herm(t))
        inv_roots.append((v * (1.0 / np.sqrt(np.clip(w, 1e-12, None)))) @ la.dag(v))
    effects = []
    for blocks in raws:
        effects.append(AlgebraElement(
            algebra, [la.herm(s @ b @ s) for s, b in zip(inv_roots, blocks)], validate=False))
    return Povm(algebra, tuple(range(n_outcomes)), effects)
