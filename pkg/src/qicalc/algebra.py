"""Finite-dimensional operator algebras and their unital *-embeddings.

A :class:`BlockAlgebra` with dimensions ``(d_1, ..., d_k)`` models the direct
sum of the full complex matrix algebras of those sizes.  Its elements are
block-diagonal matrices stored one block at a time, the trace functional is
the sum of the block traces (so every minimal positive idempotent has trace
one), and subalgebras are represented concretely by
:class:`SubalgebraEmbedding`: the images of every matrix unit ``e^(i)_kl`` of
an abstract domain algebra inside a parent algebra.  This turns restriction,
compatibility checking and the block decomposition of generated product
algebras into plain linear algebra.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterator, Sequence

import numpy as np

from . import _linalg as la
from .errors import IncompatibleError, ValidationError

DEFAULT_COMMUTE_TOL = 1e-9
DEFAULT_HOM_TOL = 1e-9


# ---------------------------------------------------------------------------
# algebras and elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BlockAlgebra:
    """Direct sum of full matrix algebras, given by the block dimensions.

    ``labels`` names the blocks of a commutative algebra (all dimensions 1)
    after the finite outcome set it was built from.
    """

    block_dims: tuple[int, ...]
    labels: tuple[Hashable, ...] | None = None

    def __post_init__(self):
        dims = tuple(int(d) for d in self.block_dims)
        object.__setattr__(self, "block_dims", dims)
        if len(dims) < 1:
            raise ValidationError("an algebra needs at least one block")
        if any(d < 1 for d in dims):
            raise ValidationError(f"block dimensions must be >= 1, got {dims}")
        if self.labels is not None:
            labels = tuple(self.labels)
            object.__setattr__(self, "labels", labels)
            if len(labels) != len(dims):
                raise ValidationError("one label per block is required")
            if len(set(labels)) != len(labels):
                raise ValidationError("labels must be distinct")
            if any(d != 1 for d in dims):
                raise ValidationError("labelled algebras must be commutative (all blocks 1x1)")

    @property
    def num_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def total_dim(self) -> int:
        """Size of the dense block-diagonal representation."""
        return sum(self.block_dims)

    @property
    def element_dim(self) -> int:
        """Complex dimension of the algebra, sum of d_i^2."""
        return sum(d * d for d in self.block_dims)

    @property
    def block_offsets(self) -> tuple[int, ...]:
        offs = []
        off = 0
        for d in self.block_dims:
            offs.append(off)
            off += d
        return tuple(offs)

    def is_commutative(self) -> bool:
        return all(d == 1 for d in self.block_dims)

    def is_trivial(self) -> bool:
        return self.block_dims == (1,)

    def label_index(self, label) -> int:
        if self.labels is None:
            raise ValidationError("algebra carries no outcome labels")
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValidationError(f"unknown label {label!r}") from None

    def identity(self) -> "AlgebraElement":
        return AlgebraElement(self, [np.eye(d, dtype=np.complex128) for d in self.block_dims],
                              validate=False)

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, [np.zeros((d, d), dtype=np.complex128) for d in self.block_dims],
                              validate=False)

    def unit_triples(self) -> Iterator[tuple[int, int, int]]:
        """Matrix-unit index triples (block, row, col) in canonical order."""
        for i, d in enumerate(self.block_dims):
            for k in range(d):
                for l in range(d):
                    yield (i, k, l)

    def unit_index(self, i: int, k: int, l: int) -> int:
        off = sum(d * d for d in self.block_dims[:i])
        return off + k * self.block_dims[i] + l

    def matrix_unit(self, i: int, k: int, l: int) -> "AlgebraElement":
        e = self.zero()
        blocks = [np.array(b) for b in e.blocks]
        blocks[i][k, l] = 1.0
        return AlgebraElement(self, blocks, validate=False)

    def digest_parts(self):
        return ("algebra", self.block_dims, None if self.labels is None else tuple(map(repr, self.labels)))


class AlgebraElement:
    """A block-diagonal matrix attached to its algebra."""

    __slots__ = ("algebra", "blocks")

    def __init__(self, algebra: BlockAlgebra, blocks, validate: bool = True):
        blocks = tuple(np.array(b, dtype=np.complex128) for b in blocks)
        if validate:
            if len(blocks) != algebra.num_blocks:
                raise ValidationError(f"expected {algebra.num_blocks} blocks, got {len(blocks)}")
            for b, d in zip(blocks, algebra.block_dims):
                if b.shape != (d, d):
                    raise ValidationError(f"block of shape {b.shape} does not match dimension {d}")
        for b in blocks:
            b.setflags(write=False)
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "blocks", blocks)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    @classmethod
    def from_dense(cls, algebra: BlockAlgebra, m: np.ndarray, tol: float = 1e-9) -> "AlgebraElement":
        blocks = la.dense_to_blocks(la.as_complex(m), algebra.block_dims, tol=tol)
        return cls(algebra, blocks, validate=False)

    def dense(self) -> np.ndarray:
        return la.blocks_to_dense(self.blocks)

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, [la.dag(b) for b in self.blocks], validate=False)

    def trace(self) -> complex:
        return complex(sum(np.trace(b) for b in self.blocks))

    def herm_part(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, [la.herm(b) for b in self.blocks], validate=False)

    def norm(self) -> float:
        """Operator norm (largest singular value over the blocks)."""
        return max(la.op_norm(b) for b in self.blocks)

    def fro_norm(self) -> float:
        return float(np.sqrt(sum(la.fro_norm(b) ** 2 for b in self.blocks)))

    def min_eigenvalue(self) -> float:
        return min(float(np.linalg.eigvalsh(la.herm(b))[0]) for b in self.blocks)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return all(la.op_norm(b - la.dag(b)) <= tol for b in self.blocks)

    def __add__(self, other):
        self._check_same(other)
        return AlgebraElement(self.algebra, [a + b for a, b in zip(self.blocks, other.blocks)],
                              validate=False)

    def __sub__(self, other):
        self._check_same(other)
        return AlgebraElement(self.algebra, [a - b for a, b in zip(self.blocks, other.blocks)],
                              validate=False)

    def __neg__(self):
        return AlgebraElement(self.algebra, [-b for b in self.blocks], validate=False)

    def __mul__(self, scalar):
        return AlgebraElement(self.algebra, [scalar * b for b in self.blocks], validate=False)

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._check_same(other)
        return AlgebraElement(self.algebra, [a @ b for a, b in zip(self.blocks, other.blocks)],
                              validate=False)

    def _check_same(self, other):
        if not isinstance(other, AlgebraElement) or other.algebra != self.algebra:
            raise ValidationError("elements live on different algebras")

    def digest_parts(self):
        return ("element", self.algebra, list(self.blocks))


def make_commutative(labels) -> BlockAlgebra:
    """The commutative algebra of complex functions on a finite outcome set."""
    labels = tuple(labels)
    if not labels:
        raise ValidationError("outcome set must be nonempty")
    return BlockAlgebra((1,) * len(labels), labels=labels)


TRIVIAL = BlockAlgebra((1,))


# ---------------------------------------------------------------------------
# embeddings
# ---------------------------------------------------------------------------

class SubalgebraEmbedding:
    """A unital injective *-homomorphism into a parent algebra.

    The map is recorded through the images of every matrix unit of the
    domain; linear extension gives the embedding on arbitrary elements.
    """

    __slots__ = ("domain", "parent", "unit_images", "_dense_images", "leg_info")

    def __init__(self, domain: BlockAlgebra, parent: BlockAlgebra, unit_images,
                 *, tol: float = DEFAULT_HOM_TOL, validate: bool = True):
        unit_images = tuple(unit_images)
        if len(unit_images) != domain.element_dim:
            raise ValidationError(
                f"expected {domain.element_dim} matrix-unit images, got {len(unit_images)}")
        for img in unit_images:
            if img.algebra != parent:
                raise ValidationError("matrix-unit images must live on the parent algebra")
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "unit_images", unit_images)
        object.__setattr__(self, "_dense_images", None)
        # set by tensor-product constructors: (TensorProduct, per-factor selectors)
        object.__setattr__(self, "leg_info", None)
        if validate:
            self._validate(tol)

    def __setattr__(self, name, value):
        raise AttributeError("SubalgebraEmbedding is immutable")

    # -- access ------------------------------------------------------------

    def image(self, i: int, k: int, l: int) -> AlgebraElement:
        return self.unit_images[self.domain.unit_index(i, k, l)]

    def dense_images(self):
        if self._dense_images is None:
            object.__setattr__(self, "_dense_images", tuple(img.dense() for img in self.unit_images))
        return self._dense_images

    def apply(self, a: AlgebraElement) -> AlgebraElement:
        """Linear extension of the matrix-unit images."""
        if a.algebra != self.domain:
            raise ValidationError("element does not live on the embedding's domain")
        out = [np.zeros((d, d), dtype=np.complex128) for d in self.parent.block_dims]
        idx = 0
        for i, d in enumerate(self.domain.block_dims):
            coeffs = a.blocks[i]
            for k in range(d):
                for l in range(d):
                    c = coeffs[k, l]
                    if c != 0:
                        img = self.unit_images[idx]
                        for bi, blk in enumerate(img.blocks):
                            out[bi] += c * blk
                    idx += 1
        return AlgebraElement(self.parent, out, validate=False)

    # -- validation ----------------------------------------------------------

    def _validate(self, tol: float) -> None:
        dom = self.domain
        # adjoints map to adjoints
        for i, k, l in dom.unit_triples():
            delta = self.image(i, k, l).adjoint() - self.image(i, l, k)
            if delta.norm() > tol:
                raise ValidationError(
                    f"embedding does not preserve adjoints at unit {(i, k, l)}: defect {delta.norm():.3e}")
        # unital
        ident = self.parent.zero()
        for i, d in enumerate(dom.block_dims):
            for k in range(d):
                ident = ident + self.image(i, k, k)
        defect = (ident - self.parent.identity()).norm()
        if defect > tol:
            raise ValidationError(f"embedding is not unital: defect {defect:.3e}")
        # injective on matrix units
        for n, img in enumerate(self.unit_images):
            if img.fro_norm() <= tol:
                raise ValidationError(f"matrix-unit image {n} vanishes; embedding not injective")
        # multiplicative on random elements (linear in both slots, so random
        # probing with a fixed seed pins the homomorphism property)
        rng = np.random.default_rng(7)
        for _ in range(6):
            a = _random_element(rng, dom)
            b = _random_element(rng, dom)
            lhs = self.apply(a @ b)
            rhs = self.apply(a) @ self.apply(b)
            scale = max(1.0, a.norm() * b.norm())
            if (lhs - rhs).norm() > 10 * tol * scale:
                raise ValidationError(
                    f"embedding is not multiplicative: defect {(lhs - rhs).norm():.3e}")

    def digest_parts(self):
        return ("embedding", self.domain, self.parent, [img.digest_parts() for img in self.unit_images])


def _random_element(rng: np.random.Generator, algebra: BlockAlgebra) -> AlgebraElement:
    blocks = [rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
              for d in algebra.block_dims]
    return AlgebraElement(algebra, blocks, validate=False)


def identity_embedding(algebra: BlockAlgebra) -> SubalgebraEmbedding:
    images = [algebra.matrix_unit(i, k, l) for i, k, l in algebra.unit_triples()]
    return SubalgebraEmbedding(algebra, algebra, images, validate=False)


def trivial_embedding(parent: BlockAlgebra) -> SubalgebraEmbedding:
    """The one-dimensional subalgebra spanned by the unit."""
    return SubalgebraEmbedding(TRIVIAL, parent, [parent.identity()], validate=False)


def compose_embeddings(outer: SubalgebraEmbedding, inner: SubalgebraEmbedding) -> SubalgebraEmbedding:
    """Embed inner.domain into outer.parent by mapping through outer."""
    if inner.parent != outer.domain:
        raise ValidationError("embeddings do not chain: inner.parent must equal outer.domain")
    images = [outer.apply(img) for img in inner.unit_images]
    return SubalgebraEmbedding(inner.domain, outer.parent, images, validate=False)


def partition_embedding(parent: BlockAlgebra, cells: Sequence[Sequence[int]],
                        labels=None) -> SubalgebraEmbedding:
    """Subalgebra of a commutative algebra given by a partition of its points."""
    if not parent.is_commutative():
        raise ValidationError("partition embeddings require a commutative parent")
    seen = sorted(i for cell in cells for i in cell)
    if seen != list(range(parent.num_blocks)):
        raise ValidationError("cells must partition the outcome set")
    domain = make_commutative(labels if labels is not None else range(len(cells)))
    images = []
    for cell in cells:
        blocks = [np.array([[1.0 + 0j]]) if i in cell else np.array([[0.0 + 0j]])
                  for i in range(parent.num_blocks)]
        images.append(AlgebraElement(parent, blocks, validate=False))
    return SubalgebraEmbedding(domain, parent, images, validate=False)


# ---------------------------------------------------------------------------
# compatibility
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompatiblePair:
    """Certificate that two embedded subalgebras commute elementwise."""

    left: SubalgebraEmbedding
    right: SubalgebraEmbedding
    max_commutator_norm: float
    tol: float


@dataclass(frozen=True)
class CompatibilityViolation:
    """Worst commutator found when a compatibility check fails."""

    left_index: tuple[int, int, int]
    right_index: tuple[int, int, int]
    commutator_norm: float
    tol: float


def check_compatible(x: SubalgebraEmbedding, y: SubalgebraEmbedding,
                     tol: float = DEFAULT_COMMUTE_TOL):
    """Certify elementwise commutation, or report the worst offending pair."""
    if x.parent != y.parent:
        raise ValidationError("embeddings have mismatched parent algebras")
    # screen with batched Frobenius norms (an upper bound on the operator
    # norm), refine only the worst pair
    nx, ny = len(x.unit_images), len(y.unit_images)
    fro_sq = np.zeros((nx, ny))
    for bi, d in enumerate(x.parent.block_dims):
        xs = np.stack([img.blocks[bi] for img in x.unit_images])
        ys = np.stack([img.blocks[bi] for img in y.unit_images])
        comm = np.einsum("iab,jbc->ijac", xs, ys) - np.einsum("jab,ibc->ijac", ys, xs)
        fro_sq += np.sum(np.abs(comm) ** 2, axis=(2, 3))
    bound = float(np.sqrt(fro_sq.max()))
    if bound <= tol:
        return CompatiblePair(x, y, bound, tol)
    xt = list(x.domain.unit_triples())
    yt = list(y.domain.unit_triples())
    worst = 0.0
    worst_pair = (xt[0], yt[0])
    for ia, ib in np.argwhere(np.sqrt(fro_sq) > tol):
        a, b = x.unit_images[ia], y.unit_images[ib]
        nrm = (a @ b - b @ a).norm()
        if nrm > worst:
            worst = nrm
            worst_pair = (xt[ia], yt[ib])
    if worst <= tol:
        return CompatiblePair(x, y, worst, tol)
    return CompatibilityViolation(worst_pair[0], worst_pair[1], worst, tol)


def require_compatible(x: SubalgebraEmbedding, y: SubalgebraEmbedding,
                       tol: float = DEFAULT_COMMUTE_TOL) -> CompatiblePair:
    result = check_compatible(x, y, tol)
    if isinstance(result, CompatibilityViolation):
        raise IncompatibleError(
            f"subalgebras do not commute: worst commutator {result.commutator_norm:.3e} "
            f"at units {result.left_index} / {result.right_index}",
            left_index=result.left_index, right_index=result.right_index,
            commutator_norm=result.commutator_norm)
    return result


# ---------------------------------------------------------------------------
# tensor products
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TensorProduct:
    """A tensor product algebra together with its factor embeddings.

    Block ``b`` of the product algebra corresponds to the tuple of factor
    blocks ``block_tuples[b]`` (lexicographic order), with the block matrix
    being the Kronecker product of the factor blocks in factor order.
    """

    algebra: BlockAlgebra
    factors: tuple[BlockAlgebra, ...]
    block_tuples: tuple[tuple[int, ...], ...]
    factor_embeddings: tuple[SubalgebraEmbedding, ...]
    leg_cache: dict = None  # memoized leg embeddings, keyed by selector ids

    def __post_init__(self):
        object.__setattr__(self, "leg_cache", {})

    def block_index(self, bt: tuple[int, ...]) -> int:
        return self.block_tuples.index(tuple(bt))

    def unit_factors(self, block: int, row: int, col: int):
        """Split a product matrix-unit index into per-factor unit indices."""
        bt = self.block_tuples[block]
        dims = [f.block_dims[i] for f, i in zip(self.factors, bt)]
        out = []
        r, c = row, col
        for pos in range(len(dims) - 1, -1, -1):
            d = dims[pos]
            out.append((bt[pos], r % d, c % d))
            r //= d
            c //= d
        return list(reversed(out))


def tensor_many(factors: Sequence[BlockAlgebra]) -> TensorProduct:
    factors = tuple(factors)
    if not factors:
        raise ValidationError("tensor product needs at least one factor")
    tuples = tuple(itertools.product(*[range(f.num_blocks) for f in factors]))
    dims = tuple(int(np.prod([f.block_dims[i] for f, i in zip(factors, bt)])) for bt in tuples)
    algebra = BlockAlgebra(dims)
    embeddings = []
    for pos, factor in enumerate(factors):
        images = []
        for i, k, l in factor.unit_triples():
            blocks = []
            for bt in tuples:
                if bt[pos] != i:
                    d = int(np.prod([f.block_dims[j] for f, j in zip(factors, bt)]))
                    blocks.append(np.zeros((d, d), dtype=np.complex128))
                    continue
                parts = []
                for p2, (f2, j2) in enumerate(zip(factors, bt)):
                    if p2 == pos:
                        unit = np.zeros((factor.block_dims[i],) * 2, dtype=np.complex128)
                        unit[k, l] = 1.0
                        parts.append(unit)
                    else:
                        parts.append(np.eye(f2.block_dims[j2], dtype=np.complex128))
                blocks.append(la.kron_list(parts))
            images.append(AlgebraElement(algebra, blocks, validate=False))
        embeddings.append(SubalgebraEmbedding(factor, algebra, images, validate=False))
    tp = TensorProduct(algebra, factors, tuples, tuple(embeddings))
    for pos, emb in enumerate(embeddings):
        parts = tuple("full" if p == pos else None for p in range(len(factors)))
        object.__setattr__(emb, "leg_info", (tp, parts))
    return tp


def tensor(a: BlockAlgebra, b: BlockAlgebra) -> TensorProduct:
    """Tensor product of two algebras; the factor embeddings commute."""
    return tensor_many([a, b])


def product_element(tp: TensorProduct, parts: Sequence[AlgebraElement]) -> AlgebraElement:
    """Elementary tensor of per-factor elements."""
    if len(parts) != len(tp.factors):
        raise ValidationError("one element per factor is required")
    for part, factor in zip(parts, tp.factors):
        if part.algebra != factor:
            raise ValidationError("element does not match its tensor factor")
    blocks = [la.kron_list([p.blocks[i] for p, i in zip(parts, bt)]) for bt in tp.block_tuples]
    return AlgebraElement(tp.algebra, blocks, validate=False)


def leg_embedding(tp: TensorProduct, parts) -> SubalgebraEmbedding:
    """Embed a sub-tensor of the factors, possibly through per-factor embeddings.

    ``parts[f]`` is ``None`` to drop factor f (replace it by the scalars),
    the string ``"full"`` to keep it whole, or a SubalgebraEmbedding into
    factor f.
    """
    parts = list(parts)
    if len(parts) != len(tp.factors):
        raise ValidationError("one selector per factor is required")
    key = tuple("F" if s == "full" else None if s is None else id(s) for s in parts)
    cached = tp.leg_cache.get(key)
    if cached is not None:
        return cached
    kept: list[tuple[int, SubalgebraEmbedding | None]] = []
    for pos, sel in enumerate(parts):
        if sel is None:
            continue
        if isinstance(sel, str):
            if sel != "full":
                raise ValidationError(f"unknown selector {sel!r}")
            kept.append((pos, None))
        else:
            if sel.parent != tp.factors[pos]:
                raise ValidationError(f"selector at factor {pos} does not embed into that factor")
            kept.append((pos, sel))
    if not kept:
        return trivial_embedding(tp.algebra)
    domains = [tp.factors[pos] if emb is None else emb.domain for pos, emb in kept]
    dom_tp = tensor_many(domains)
    images = []
    for blk, row, col in dom_tp.algebra.unit_triples():
        pieces = dom_tp.unit_factors(blk, row, col)
        leg_elems: dict[int, AlgebraElement] = {}
        for (pos, emb), (fi, fk, fl) in zip(kept, pieces):
            if emb is None:
                leg_elems[pos] = tp.factors[pos].matrix_unit(fi, fk, fl)
            else:
                leg_elems[pos] = emb.image(fi, fk, fl)
        blocks = []
        for bt, d in zip(tp.block_tuples, tp.algebra.block_dims):
            mats = []
            dead = False
            for pos, (factor, j) in enumerate(zip(tp.factors, bt)):
                if pos in leg_elems:
                    piece = leg_elems[pos].blocks[j]
                    if not piece.any():
                        dead = True
                        break
                    mats.append(piece)
                else:
                    mats.append(np.eye(factor.block_dims[j], dtype=np.complex128))
            if dead:
                blocks.append(np.zeros((d, d), dtype=np.complex128))
            else:
                blocks.append(la.kron_list(mats))
        images.append(AlgebraElement(tp.algebra, blocks, validate=False))
    emb = SubalgebraEmbedding(dom_tp.algebra, tp.algebra, images, validate=False)
    object.__setattr__(emb, "leg_info", (tp, tuple(parts)))
    tp.leg_cache[key] = emb
    return emb


# ---------------------------------------------------------------------------
# generated product algebras
# ---------------------------------------------------------------------------

class _SplitFailure(Exception):
    pass


def generated_product_algebra(pair: CompatiblePair, *, tol: float = DEFAULT_HOM_TOL,
                              seed: int = 0, max_attempts: int = 8) -> SubalgebraEmbedding:
    """Block decomposition of the span of all products from a compatible pair.

    The span of the pairwise products of the matrix-unit images is a unital
    *-subalgebra of the parent.  Its irreducible blocks are recovered by
    eigenspace splitting of a random Hermitian element of the commutant
    (seeded for reproducibility), grouping equivalent blocks through
    explicit intertwiners, and summing coherent rank-one bridges into
    matrix units.
    """
    left, right = pair.left, pair.right
    parent = left.parent
    n = parent.total_dim
    gx = [img.dense() for img in left.unit_images]
    gy = [img.dense() for img in right.unit_images]
    gens = gx + gy
    products = [a @ b for a in gx for b in gy]
    basis = la.orthonormal_operator_basis(products)
    if not basis:
        raise ValidationError("product span is empty")
    bstack = la.stack_basis(basis)
    probes = [la.dag(b) for b in basis]
    for b in basis:
        for g in gens:
            probes.append(b @ g)
            probes.append(g @ b)
    if la.max_span_residual(bstack, probes) > 1e-8:
        raise ValidationError("product span does not close under multiplication and "
                              "adjoints; compatibility certificate looks broken")
    comm = la.commutant_basis(gens, n)
    last = None
    for attempt in range(max_attempts):
        rng = np.random.default_rng(seed + attempt)
        try:
            return _split_product_span(parent, bstack, gens, comm, rng, tol)
        except (_SplitFailure, ValidationError) as exc:
            last = exc
    raise ValidationError(f"could not block-diagonalize the generated product algebra: {last}")


def _split_product_span(parent, bstack, gens, comm, rng, tol):
    n = parent.total_dim
    coeffs = rng.standard_normal(len(comm))
    h = np.zeros((n, n), dtype=np.complex128)
    for c, m in zip(coeffs, comm):
        h += c * la.herm(m)
    nrm = la.op_norm(h)
    if nrm < 1e-12:
        raise _SplitFailure("degenerate commutant sample")
    h = h / nrm
    w, v = np.linalg.eigh(h)
    clusters = []
    start = 0
    for i in range(1, n + 1):
        if i == n or w[i] - w[i - 1] > 1e-7:
            clusters.append(v[:, start:i])
            start = i

    reps = [[la.dag(q) @ g @ q for g in gens] for q in clusters]
    classes: list[dict] = []
    for t, (q, rep_t) in enumerate(zip(clusters, reps)):
        c = q.shape[1]
        char = np.array([np.trace(r) for r in rep_t])
        placed = False
        for cls in classes:
            if cls["dim"] != c or not np.allclose(cls["char"], char, atol=1e-6):
                continue
            tws = la.intertwiner_space(cls["reps"], rep_t)
            if len(tws) == 0:
                continue
            if len(tws) > 1:
                raise _SplitFailure("cluster carries a reducible representation")
            t0 = tws[0]
            u = t0 * (np.sqrt(c) / np.linalg.norm(t0))
            if la.op_norm(la.dag(u) @ u - np.eye(c)) > 1e-6:
                raise _SplitFailure("intertwiner failed to unitarize")
            cls["members"].append(q @ u)
            placed = True
            break
        if not placed:
            classes.append({"dim": c, "char": char, "reps": rep_t, "members": [q], "first": t})

    if sum(cls["dim"] * len(cls["members"]) for cls in classes) != n:
        raise _SplitFailure("block dimensions do not account for the parent")
    classes.sort(key=lambda cls: (cls["dim"], cls["first"]))

    domain = BlockAlgebra(tuple(cls["dim"] for cls in classes))
    images = []
    for cls in classes:
        c = cls["dim"]
        for k in range(c):
            for l in range(c):
                e = np.zeros((n, n), dtype=np.complex128)
                for m in cls["members"]:
                    e += np.outer(m[:, k], m[:, l].conj())
                if la.span_residual(bstack, e) > 1e-7:
                    raise _SplitFailure("matrix unit escapes the product span")
                images.append(AlgebraElement.from_dense(parent, e, tol=1e-7))
    return SubalgebraEmbedding(domain, parent, images, tol=tol)


def product_embedding(embs: Sequence[SubalgebraEmbedding], *, tol: float = DEFAULT_COMMUTE_TOL,
                      seed: int = 0) -> SubalgebraEmbedding:
    """Generated product of pairwise compatible embedded subalgebras (left fold).

    Products of disjoint tensor legs are assembled directly; everything else
    goes through the commutant splitting of ``generated_product_algebra``.
    """
    embs = list(embs)
    if not embs:
        raise ValidationError("need at least one embedding")
    acc = embs[0]
    for nxt in embs[1:]:
        acc = _fold_product(acc, nxt, tol, seed)
    return acc


def _fold_product(a: SubalgebraEmbedding, b: SubalgebraEmbedding,
                  tol: float, seed: int) -> SubalgebraEmbedding:
    if a.domain.is_trivial():
        return b
    if b.domain.is_trivial():
        return a
    # disjoint tensor legs commute by construction; assemble their union
    # directly and leave the commutant machinery for genuine overlaps
    merged = _merge_leg_selectors(a, b)
    if merged is not None:
        tp, parts = merged
        return leg_embedding(tp, parts)
    pair = require_compatible(a, b, tol)
    return generated_product_algebra(pair, tol=tol, seed=seed)


def _merge_leg_selectors(a: SubalgebraEmbedding, b: SubalgebraEmbedding):
    if a.leg_info is None or b.leg_info is None or a.leg_info[0] is not b.leg_info[0]:
        return None
    tp = a.leg_info[0]
    parts = []
    for sa, sb in zip(a.leg_info[1], b.leg_info[1]):
        if sa is None:
            parts.append(sb)
        elif sb is None:
            parts.append(sa)
        elif isinstance(sa, str) and isinstance(sb, str):
            parts.append("full")
        elif sa is sb and not isinstance(sa, str) and sa.domain.is_commutative():
            parts.append(sa)
        else:
            return None  # overlapping leg content: needs the general machinery
    return tp, tuple(parts)
