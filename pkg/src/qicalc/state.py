"""Density operators on block algebras and the state-side maps.

States are positive unit-trace block-diagonal matrices.  Floating-point
positivity drift is absorbed deterministically: eigenvalues in
``[-1e-8, 0)`` are clamped to zero and the spectrum renormalized; anything
more negative raises.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _linalg as la
from .algebra import (
    AlgebraElement,
    BlockAlgebra,
    SubalgebraEmbedding,
    TensorProduct,
    tensor,
    tensor_many,
)
from .errors import ValidationError
from .operation import KrausMap

HERM_TOL = 1e-10
EIG_FLOOR = 1e-8
TRACE_TOL = 1e-10


class DensityState:
    """A positive unit-trace element of a block algebra."""

    __slots__ = ("algebra", "blocks")

    def __init__(self, algebra: BlockAlgebra, blocks, *, herm_tol: float = HERM_TOL,
                 eig_floor: float = EIG_FLOOR, trace_tol: float = TRACE_TOL,
                 validate: bool = True):
        blocks = [np.array(b, dtype=np.complex128) for b in blocks]
        if validate:
            if len(blocks) != algebra.num_blocks:
                raise ValidationError(f"expected {algebra.num_blocks} blocks, got {len(blocks)}")
            for b, d in zip(blocks, algebra.block_dims):
                if b.shape != (d, d):
                    raise ValidationError(f"state block of shape {b.shape}, expected {(d, d)}")
                if la.op_norm(b - la.dag(b)) > herm_tol:
                    raise ValidationError(
                        f"state block is not Hermitian within {herm_tol:.1e}")
            blocks = [la.herm(b) for b in blocks]
            tr = float(sum(np.real(np.trace(b)) for b in blocks))
            if abs(tr - 1.0) > max(trace_tol, 1e-9):
                raise ValidationError(f"state trace {tr!r} differs from 1")
            spectra = [np.linalg.eigh(b) for b in blocks]
            low = min((float(w[0]) for w, _ in spectra), default=0.0)
            if low < -eig_floor:
                raise ValidationError(
                    f"state has eigenvalue {low:.3e} below the -{eig_floor:.1e} floor")
            if low < 0.0:
                clamped = [(np.clip(w, 0.0, None), v) for w, v in spectra]
                total = float(sum(w.sum() for w, _ in clamped))
                blocks = [(v * (w / total)) @ la.dag(v) for w, v in clamped]
        blocks = tuple(blocks)
        for b in blocks:
            b.setflags(write=False)
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "blocks", blocks)

    def __setattr__(self, name, value):
        raise AttributeError("DensityState is immutable")

    def dense(self) -> np.ndarray:
        return la.blocks_to_dense(self.blocks)

    def to_element(self) -> AlgebraElement:
        return AlgebraElement(self.algebra, self.blocks, validate=False)

    def eigenvalues(self) -> np.ndarray:
        """All eigenvalues, descending, clamped at zero."""
        w = np.concatenate([np.linalg.eigvalsh(b) for b in self.blocks])
        return np.clip(np.sort(w)[::-1], 0.0, None)

    def is_pure(self, tol: float = 1e-9) -> bool:
        return bool(self.eigenvalues()[0] >= 1.0 - tol)

    def digest_parts(self):
        return ("state", self.algebra, list(self.blocks))


def expectation(rho: DensityState, x: AlgebraElement) -> complex:
    """Tr(rho x) for an element of the same algebra."""
    if x.algebra != rho.algebra:
        raise ValidationError("element and state live on different algebras")
    return complex(sum(np.trace(a @ b) for a, b in zip(rho.blocks, x.blocks)))


# ---------------------------------------------------------------------------
# diagonalization
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues (descending) with one rank-one pure state per eigenvalue."""

    eigenvalues: tuple[float, ...]
    projectors: tuple[DensityState, ...]

    def digest_parts(self):
        return ("spectrum", list(self.eigenvalues), [p.digest_parts() for p in self.projectors])


def diagonalize(rho: DensityState) -> Spectrum:
    entries = []
    for bi, block in enumerate(rho.blocks):
        w, v = np.linalg.eigh(block)
        for col in range(w.size):
            entries.append((max(float(w[col]), 0.0), bi, v[:, col]))
    entries.sort(key=lambda e: (-e[0], e[1]))
    eigenvalues = []
    projectors = []
    for val, bi, vec in entries:
        eigenvalues.append(val)
        blocks = [np.outer(vec, vec.conj()) if i == bi
                  else np.zeros((d, d), dtype=np.complex128)
                  for i, d in enumerate(rho.algebra.block_dims)]
        projectors.append(DensityState(rho.algebra, blocks, validate=False))
    return Spectrum(tuple(eigenvalues), tuple(projectors))


def reconstruct(spec: Spectrum, algebra: BlockAlgebra) -> DensityState:
    blocks = [np.zeros((d, d), dtype=np.complex128) for d in algebra.block_dims]
    for val, proj in zip(spec.eigenvalues, spec.projectors):
        for i, b in enumerate(proj.blocks):
            blocks[i] += val * b
    return DensityState(algebra, blocks)


# ---------------------------------------------------------------------------
# restriction / partial trace / preadjoints
# ---------------------------------------------------------------------------

def restrict(rho: DensityState, iota: SubalgebraEmbedding) -> DensityState:
    """The state seen through a subalgebra: the unique density operator
    ``sigma`` on the domain with Tr(sigma B) = Tr(rho iota(B)) for all B."""
    if rho.algebra != iota.parent:
        raise ValidationError("state does not live on the embedding's parent algebra")
    out = []
    for i, d in enumerate(iota.domain.block_dims):
        block = np.zeros((d, d), dtype=np.complex128)
        for k in range(d):
            for l in range(d):
                block[l, k] = expectation(rho, iota.image(i, k, l))
        out.append(block)
    return DensityState(iota.domain, out)


def partial_trace(rho: DensityState, tp: TensorProduct, keep) -> DensityState:
    """Trace out the unselected tensor factors by direct index contraction.

    ``keep`` is a factor index or a collection of them; the result lives on
    the tensor product of the kept factors in their original order.
    """
    if rho.algebra != tp.algebra:
        raise ValidationError("state does not live on the given tensor product algebra")
    if isinstance(keep, (int, np.integer)):
        keep = (int(keep),)
    keep = tuple(sorted(set(int(i) for i in keep)))
    nf = len(tp.factors)
    if not keep or any(i < 0 or i >= nf for i in keep):
        raise ValidationError(f"factor selector out of range: {keep} for {nf} factors")
    kept_factors = [tp.factors[i] for i in keep]
    out_tp = tensor_many(kept_factors)
    out_blocks = [np.zeros((d, d), dtype=np.complex128) for d in out_tp.algebra.block_dims]
    out_index = {bt: i for i, bt in enumerate(out_tp.block_tuples)}
    for b, bt in enumerate(tp.block_tuples):
        dims = [tp.factors[f].block_dims[i] for f, i in enumerate(bt)]
        arr = rho.blocks[b].reshape(dims + dims)
        row_idx = list(range(nf))
        col_idx = [i + nf if i in keep else i for i in range(nf)]
        out_idx = [i for i in keep] + [i + nf for i in keep]
        contracted = np.einsum(arr, row_idx + col_idx, out_idx)
        kept_dims = [dims[i] for i in keep]
        dim = int(np.prod(kept_dims))
        target = out_index[tuple(bt[i] for i in keep)]
        out_blocks[target] += contracted.reshape(dim, dim)
    return DensityState(out_tp.algebra, out_blocks)


def preadjoint_apply(phi: KrausMap, rho: DensityState) -> DensityState:
    """Push a state on the operator codomain back through the trace pairing."""
    if rho.algebra != phi.target:
        raise ValidationError("state does not live on the map's operator codomain")
    dense = phi.preadjoint_dense(rho.dense())
    blocks = la.dense_to_blocks(dense, phi.source.block_dims, tol=1e-7)
    return DensityState(phi.source, blocks)


# ---------------------------------------------------------------------------
# purification and friends
# ---------------------------------------------------------------------------

def purify(rho: DensityState) -> tuple[DensityState, TensorProduct]:
    """Purification |psi> = sum_i sqrt(a_i) |e_i> (x) |i> on H (x) L, dim L = rank."""
    if rho.algebra.num_blocks != 1:
        raise ValidationError(
            "purification needs a single full matrix block; embed the state with "
            "embed_into_full first")
    d = rho.algebra.block_dims[0]
    w, v = la.eigh_desc(rho.blocks[0])
    w = np.clip(w, 0.0, None)
    rank = max(1, int(np.sum(w > 1e-12)))
    vec = np.zeros(d * rank, dtype=np.complex128)
    for i in range(rank):
        basis = np.zeros(rank, dtype=np.complex128)
        basis[i] = 1.0
        vec += np.sqrt(w[i]) * np.kron(v[:, i], basis)
    tp = tensor(BlockAlgebra((d,)), BlockAlgebra((rank,)))
    state = DensityState(tp.algebra, [np.outer(vec, vec.conj())])
    return state, tp


def embed_into_full(rho: DensityState) -> tuple[DensityState, SubalgebraEmbedding]:
    """View a multi-block state inside the full matrix algebra on the direct
    sum space; entropies are unchanged."""
    n = rho.algebra.total_dim
    full = BlockAlgebra((n,))
    images = []
    for i, k, l in rho.algebra.unit_triples():
        images.append(AlgebraElement.from_dense(full, rho.algebra.matrix_unit(i, k, l).dense()))
    emb = SubalgebraEmbedding(rho.algebra, full, images, validate=False)
    return DensityState(full, [rho.dense()]), emb


def product_state(tp: TensorProduct, parts: Sequence[DensityState]) -> DensityState:
    if len(parts) != len(tp.factors):
        raise ValidationError("one state per factor is required")
    for p, f in zip(parts, tp.factors):
        if p.algebra != f:
            raise ValidationError("state does not match its tensor factor")
    blocks = [la.kron_list([p.blocks[i] for p, i in zip(parts, bt)]) for bt in tp.block_tuples]
    return DensityState(tp.algebra, blocks)


@dataclass(frozen=True, eq=False)
class SeparabilityCertificate:
    """Retained convex decomposition into product states."""

    structure: TensorProduct
    parts: tuple[tuple[float, tuple[DensityState, ...]], ...]

    def digest_parts(self):
        return ("separable", [(w, [s.digest_parts() for s in ss]) for w, ss in self.parts])


def make_separable(parts) -> tuple[DensityState, SeparabilityCertificate]:
    """Convex combination of product states, with the decomposition retained.

    ``parts`` is a sequence of ``(weight, [per-factor states])``.
    """
    parts = [(float(w), tuple(states)) for w, states in parts]
    if not parts:
        raise ValidationError("need at least one product term")
    weights = np.array([w for w, _ in parts])
    if np.any(weights < -1e-12):
        raise ValidationError("weights must be nonnegative")
    if abs(weights.sum() - 1.0) > 1e-9:
        raise ValidationError(f"weights sum to {weights.sum()!r}, expected 1")
    weights = np.clip(weights, 0.0, None)
    weights = weights / weights.sum()
    factors = [s.algebra for s in parts[0][1]]
    tp = tensor_many(factors)
    blocks = [np.zeros((d, d), dtype=np.complex128) for d in tp.algebra.block_dims]
    norm_parts = []
    for w, states in zip(weights, (ss for _, ss in parts)):
        if [s.algebra for s in states] != factors:
            raise ValidationError("every product term needs the same factor algebras")
        term = product_state(tp, states)
        for i, b in enumerate(term.blocks):
            blocks[i] += w * b
        norm_parts.append((float(w), states))
    state = DensityState(tp.algebra, blocks)
    return state, SeparabilityCertificate(tp, tuple(norm_parts))


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def pure_state(algebra: BlockAlgebra, block: int, vector) -> DensityState:
    """Rank-one state supported on one block, from an unnormalized vector."""
    vec = la.as_complex(np.asarray(vector)).ravel()
    d = algebra.block_dims[block]
    if vec.size != d:
        raise ValidationError(f"vector of length {vec.size}, block dimension {d}")
    nrm = np.linalg.norm(vec)
    if nrm == 0:
        raise ValidationError("zero vector")
    vec = vec / nrm
    blocks = [np.outer(vec, vec.conj()) if i == block else np.zeros((dd, dd), dtype=np.complex128)
              for i, dd in enumerate(algebra.block_dims)]
    return DensityState(algebra, blocks, validate=False)


def classical_state(algebra: BlockAlgebra, probs) -> DensityState:
    """Distribution over the blocks of a commutative algebra."""
    if not algebra.is_commutative():
        raise ValidationError("classical states need a commutative algebra")
    p = np.asarray(probs, dtype=float)
    if p.size != algebra.num_blocks:
        raise ValidationError("one probability per outcome is required")
    return DensityState(algebra, [np.array([[pi + 0j]]) for pi in p])


def random_density(algebra: BlockAlgebra, seed, rank: int | None = None) -> DensityState:
    """Ginibre-induced random state; deterministic for a fixed seed."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if rank is not None and algebra.num_blocks != 1:
        raise ValidationError("rank control is only supported for single-block algebras")
    blocks = []
    for d in algebra.block_dims:
        r = rank if rank is not None else d
        g = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
        blocks.append(g @ la.dag(g))
    total = float(sum(np.real(np.trace(b)) for b in blocks))
    return DensityState(algebra, [b / total for b in blocks])
