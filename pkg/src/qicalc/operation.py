"""Completely positive unital maps between block algebras, in Kraus form.

A :class:`KrausMap` acts on operators as ``phi(A) = sum_m V_m^dag A V_m``
with rectangular Kraus operators mapping the dense representation of the
target into the dense representation of the source.  Its preadjoint
``phi_*(rho) = sum_m V_m rho V_m^dag`` carries states of the target algebra
to states of the source algebra; unitality of the operator map is exactly
trace preservation of the preadjoint, and both are validated at
construction.  Complete positivity is structural.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _linalg as la
from .algebra import (
    TRIVIAL,
    AlgebraElement,
    BlockAlgebra,
    CompatiblePair,
    SubalgebraEmbedding,
    generated_product_algebra,
    tensor_many,
)
from .errors import IncompatibleError, ValidationError

UNITAL_TOL = 1e-10
TRACE_FLAG_TOL = 1e-9


class KrausMap:
    """A quantum operation ``phi: source -> target`` on the operator side."""

    __slots__ = ("source", "target", "kraus", "trace_preserving", "trace_nonincreasing")

    def __init__(self, source: BlockAlgebra, target: BlockAlgebra, kraus,
                 *, tol: float = UNITAL_TOL, validate_structure: bool = True):
        kraus = tuple(np.array(v, dtype=np.complex128) for v in kraus)
        if not kraus:
            raise ValidationError("a Kraus map needs at least one operator")
        ns, nt = source.total_dim, target.total_dim
        for v in kraus:
            if v.shape != (ns, nt):
                raise ValidationError(f"Kraus operator of shape {v.shape}, expected {(ns, nt)}")
            v.setflags(write=False)
        unit = sum(la.dag(v) @ v for v in kraus)
        defect = la.op_norm(unit - np.eye(nt))
        if defect > max(tol, 1e-9):
            raise ValidationError(f"map is not unital: defect {defect:.3e}")
        dual = sum(v @ la.dag(v) for v in kraus)
        gap = np.eye(ns) - dual
        tp = la.op_norm(gap) <= TRACE_FLAG_TOL
        tni = float(np.linalg.eigvalsh(la.herm(gap))[0]) >= -TRACE_FLAG_TOL
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "kraus", kraus)
        object.__setattr__(self, "trace_preserving", bool(tp))
        object.__setattr__(self, "trace_nonincreasing", bool(tni))
        if validate_structure:
            self._validate_blocks()

    def __setattr__(self, name, value):
        raise AttributeError("KrausMap is immutable")

    def _validate_blocks(self) -> None:
        # the operator map must send block-diagonal source elements to
        # block-diagonal target elements
        for i, k, l in self.source.unit_triples():
            unit = self.source.matrix_unit(i, k, l)
            out = self.apply_dense(unit.dense())
            la.dense_to_blocks(out, self.target.block_dims, tol=1e-8)

    # -- operator side -------------------------------------------------------

    def apply_dense(self, m: np.ndarray) -> np.ndarray:
        out = np.zeros((self.target.total_dim,) * 2, dtype=np.complex128)
        for v in self.kraus:
            out += la.dag(v) @ m @ v
        return out

    def apply(self, a: AlgebraElement) -> AlgebraElement:
        if a.algebra != self.source:
            raise ValidationError("element does not live on the map's operator domain")
        return AlgebraElement.from_dense(self.target, self.apply_dense(a.dense()), tol=1e-7)

    # -- state side ------------------------------------------------------------

    def preadjoint_dense(self, rho: np.ndarray) -> np.ndarray:
        out = np.zeros((self.source.total_dim,) * 2, dtype=np.complex128)
        for v in self.kraus:
            out += v @ rho @ la.dag(v)
        return out

    def choi(self) -> np.ndarray:
        """Choi matrix of the pinched extension; positive semidefinite."""
        ns, nt = self.source.total_dim, self.target.total_dim
        c = np.zeros((ns * nt, ns * nt), dtype=np.complex128)
        for i, k, l in self.source.unit_triples():
            a = self.source.block_offsets[i] + k
            b = self.source.block_offsets[i] + l
            img = self.apply_dense(self.source.matrix_unit(i, k, l).dense())
            c[a * nt:(a + 1) * nt, b * nt:(b + 1) * nt] += img
        return c

    @classmethod
    def from_unit_action(cls, source: BlockAlgebra, target: BlockAlgebra,
                         images: Sequence[AlgebraElement], *, cp_floor: float = 1e-8,
                         tol: float = UNITAL_TOL) -> "KrausMap":
        """Build the map from the images of the source matrix units.

        Kraus operators are extracted from the eigendecomposition of the Choi
        matrix; a failure of positive semidefiniteness beyond ``cp_floor``
        means the prescribed action is not completely positive.
        """
        images = list(images)
        if len(images) != source.element_dim:
            raise ValidationError(
                f"expected {source.element_dim} matrix-unit images, got {len(images)}")
        for img in images:
            if img.algebra != target:
                raise ValidationError("images must live on the target algebra")
        ns, nt = source.total_dim, target.total_dim
        unit = target.zero()
        idx = 0
        c = np.zeros((ns * nt, ns * nt), dtype=np.complex128)
        for i, d in enumerate(source.block_dims):
            off = source.block_offsets[i]
            for k in range(d):
                for l in range(d):
                    img = images[idx]
                    if k == l:
                        unit = unit + img
                    dense = img.dense()
                    a, b = off + k, off + l
                    c[a * nt:(a + 1) * nt, b * nt:(b + 1) * nt] += dense
                    idx += 1
        defect = (unit - target.identity()).norm()
        if defect > max(tol, 1e-9):
            raise ValidationError(f"prescribed action is not unital: defect {defect:.3e}")
        if la.op_norm(c - la.dag(c)) > 1e-8 * max(1.0, la.op_norm(c)):
            raise ValidationError("prescribed action does not preserve adjoints")
        w, v = np.linalg.eigh(la.herm(c))
        scale = max(1.0, float(w[-1]))
        if float(w[0]) < -cp_floor * scale:
            raise ValidationError(
                f"prescribed action is not completely positive: Choi eigenvalue {w[0]:.3e}")
        kraus = []
        for i in range(w.size):
            if w[i] > 1e-14 * scale:
                kraus.append(np.sqrt(w[i]) * np.conj(v[:, i].reshape(ns, nt)))
        return cls(source, target, kraus, tol=tol, validate_structure=False)

    def digest_parts(self):
        return ("kraus_map", self.source, self.target, list(self.kraus))


# ---------------------------------------------------------------------------
# stock maps
# ---------------------------------------------------------------------------

def identity_map(algebra: BlockAlgebra) -> KrausMap:
    n = algebra.total_dim
    return KrausMap(algebra, algebra, [np.eye(n, dtype=np.complex128)], validate_structure=False)


def trace_map(algebra: BlockAlgebra) -> KrausMap:
    """The unital map from the scalars whose preadjoint is the total trace."""
    n = algebra.total_dim
    kraus = [np.zeros((1, n), dtype=np.complex128) for _ in range(n)]
    for m in range(n):
        kraus[m][0, m] = 1.0
    return KrausMap(TRIVIAL, algebra, kraus, validate_structure=False)


def embedding_as_operation(iota: SubalgebraEmbedding) -> KrausMap:
    """A subalgebra inclusion, packaged as a quantum operation."""
    return KrausMap.from_unit_action(iota.domain, iota.parent, list(iota.unit_images))


def pinching_map(algebra: BlockAlgebra, projectors: Sequence[AlgebraElement]) -> KrausMap:
    """Decoherence onto a family of orthogonal projectors summing to the unit."""
    return KrausMap(algebra, algebra, [p.dense() for p in projectors], validate_structure=False)


# ---------------------------------------------------------------------------
# combinators
# ---------------------------------------------------------------------------

def compose(phi: KrausMap, psi: KrausMap) -> KrausMap:
    """Operator composition phi(psi(.)); states flow through phi_* first."""
    if psi.target != phi.source:
        raise ValidationError("maps do not chain: psi.target must equal phi.source")
    kraus = [w @ v for w in psi.kraus for v in phi.kraus]
    return KrausMap(psi.source, phi.target, kraus, validate_structure=False)


@dataclass(frozen=True)
class OperationCompatibility:
    """Certificate that the images of two operations commute elementwise."""

    max_commutator_norm: float
    tol: float


def operation_compatibility(phi: KrausMap, psi: KrausMap,
                            tol: float = 1e-9) -> OperationCompatibility:
    if phi.target != psi.target:
        raise ValidationError("operations map into different algebras")
    worst = 0.0
    xs = [phi.apply_dense(phi.source.matrix_unit(i, k, l).dense())
          for i, k, l in phi.source.unit_triples()]
    ys = [psi.apply_dense(psi.source.matrix_unit(i, k, l).dense())
          for i, k, l in psi.source.unit_triples()]
    for a in xs:
        for b in ys:
            worst = max(worst, la.op_norm(a @ b - b @ a))
    if worst > tol:
        raise IncompatibleError(
            f"operation images do not commute: worst commutator {worst:.3e}",
            commutator_norm=worst)
    return OperationCompatibility(worst, tol)


def product(phi: KrausMap, psi: KrausMap, certificate: OperationCompatibility | None = None,
            *, tol: float = 1e-9) -> KrausMap:
    """Product map on the tensor of the sources, sending X (x) Y to phi(X) psi(Y)."""
    if certificate is None:
        operation_compatibility(phi, psi, tol)
    tp = tensor_many([phi.source, psi.source])
    xs = {t: phi.apply_dense(phi.source.matrix_unit(*t).dense())
          for t in phi.source.unit_triples()}
    ys = {t: psi.apply_dense(psi.source.matrix_unit(*t).dense())
          for t in psi.source.unit_triples()}
    images = []
    for blk, row, col in tp.algebra.unit_triples():
        (ta, tb) = tp.unit_factors(blk, row, col)
        dense = xs[ta] @ ys[tb]
        images.append(AlgebraElement.from_dense(phi.target, dense, tol=1e-7))
    return KrausMap.from_unit_action(tp.algebra, phi.target, images)


def tensor_map(phi: KrausMap, psi: KrausMap) -> KrausMap:
    """Tensor product map between the tensor product algebras."""
    src = tensor_many([phi.source, psi.source])
    tgt = tensor_many([phi.target, psi.target])
    xs = {t: phi.apply(phi.source.matrix_unit(*t)) for t in phi.source.unit_triples()}
    ys = {t: psi.apply(psi.source.matrix_unit(*t)) for t in psi.source.unit_triples()}
    images = []
    for blk, row, col in src.algebra.unit_triples():
        ta, tb = src.unit_factors(blk, row, col)
        a, b = xs[ta], ys[tb]
        blocks = [np.kron(a.blocks[i], b.blocks[j]) for (i, j) in tgt.block_tuples]
        images.append(AlgebraElement(tgt.algebra, blocks, validate=False))
    return KrausMap.from_unit_action(src.algebra, tgt.algebra, images)


def tensor_power_map(phi: KrausMap, n: int) -> KrausMap:
    if n < 1:
        raise ValidationError("tensor power needs n >= 1")
    out = phi
    for _ in range(n - 1):
        out = tensor_map(out, phi)
    return out


def random_cptp(source_dim: int, target_dim: int, kraus_rank: int, seed: int) -> KrausMap:
    """Random quantum operation between full matrix algebras.

    A Haar-random isometry from the target space into ``kraus_rank`` copies
    of the source space is sliced into Kraus operators, so the preadjoint is
    trace preserving; with ``kraus_rank == 1`` and equal dimensions this is a
    random unitary conjugation.  Deterministic for a fixed seed.
    """
    if source_dim < 1 or target_dim < 1 or kraus_rank < 1:
        raise ValidationError("dimensions and Kraus rank must be positive")
    if kraus_rank * source_dim < target_dim:
        raise ValidationError(
            f"kraus_rank {kraus_rank} too small: {kraus_rank}*{source_dim} < {target_dim}")
    rng = np.random.default_rng(seed)
    iso = la.haar_isometry(rng, kraus_rank * source_dim, target_dim)
    kraus = [iso[m * source_dim:(m + 1) * source_dim, :] for m in range(kraus_rank)]
    return KrausMap(BlockAlgebra((source_dim,)), BlockAlgebra((target_dim,)), kraus,
                    validate_structure=False)


# ---------------------------------------------------------------------------
# the multiplication map of a compatible pair
# ---------------------------------------------------------------------------

def multiplication_map(pair: CompatiblePair, product_emb: SubalgebraEmbedding | None = None,
                       *, tol: float = 1e-9, seed: int = 0) -> KrausMap:
    """The surjective *-homomorphism from the tensor of two compatible
    subalgebras onto their generated product algebra.

    On elementary tensors of matrix units it multiplies the embedded images;
    expressing the result in the matrix units of the generated product
    algebra gives the abstract target coordinates.  Surjectivity and
    multiplicativity are verified numerically.
    """
    if product_emb is None:
        product_emb = generated_product_algebra(pair, tol=tol, seed=seed)
    target = product_emb.domain
    tp = tensor_many([pair.left.domain, pair.right.domain])
    e_dense = [img.dense() for img in product_emb.unit_images]
    mult = {}
    for j, d in enumerate(target.block_dims):
        mult[j] = float(np.real(np.trace(e_dense[target.unit_index(j, 0, 0)])))
    xs = {t: pair.left.image(*t).dense() for t in pair.left.domain.unit_triples()}
    ys = {t: pair.right.image(*t).dense() for t in pair.right.domain.unit_triples()}
    images = []
    for blk, row, col in tp.algebra.unit_triples():
        ta, tb = tp.unit_factors(blk, row, col)
        m = xs[ta] @ ys[tb]
        blocks = []
        recon = np.zeros_like(m)
        for j, d in enumerate(target.block_dims):
            coords = np.zeros((d, d), dtype=np.complex128)
            for a in range(d):
                for b in range(d):
                    e_ba = e_dense[target.unit_index(j, b, a)]
                    coords[a, b] = np.trace(e_ba @ m) / mult[j]
                    recon += coords[a, b] * e_dense[target.unit_index(j, a, b)]
            blocks.append(coords)
        if la.fro_norm(recon - m) > 1e-7 * max(1.0, la.fro_norm(m)):
            raise ValidationError("multiplication map is not well defined on the product span; "
                                  "inputs are not a compatible pair")
        images.append(AlgebraElement(target, blocks, validate=False))
    phi = KrausMap.from_unit_action(tp.algebra, target, images)
    # surjectivity: the images span the whole target algebra
    stack = np.stack([img.dense().ravel() for img in images])
    rank = int(np.linalg.matrix_rank(stack, tol=1e-9))
    if rank != target.element_dim:
        raise ValidationError(
            f"multiplication map is not surjective: rank {rank} < {target.element_dim}")
    # multiplicativity on random elements
    rng = np.random.default_rng(11)
    for _ in range(4):
        a = _random_el(rng, tp.algebra)
        b = _random_el(rng, tp.algebra)
        lhs = phi.apply(a @ b)
        rhs = phi.apply(a) @ phi.apply(b)
        if (lhs - rhs).norm() > 1e-7 * max(1.0, a.norm() * b.norm()):
            raise ValidationError("multiplication map failed the homomorphism check")
    return phi


def _random_el(rng, algebra):
    blocks = [rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
              for d in algebra.block_dims]
    return AlgebraElement(algebra, blocks, validate=False)
