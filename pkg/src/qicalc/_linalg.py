"""Dense complex linear-algebra helpers shared across the package.

Everything here works on plain complex128 ndarrays; the structured types in
the rest of the package unwrap to dense matrices before calling in.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError


def as_complex(m) -> np.ndarray:
    return np.asarray(m, dtype=np.complex128)


def dag(m: np.ndarray) -> np.ndarray:
    return np.conjugate(m.T)


def herm(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + dag(m))


def op_norm(m: np.ndarray) -> float:
    """Largest singular value."""
    m = np.atleast_2d(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def fro_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m))


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product Tr(a^dag b)."""
    return complex(np.vdot(a, b))


def eigh_desc(m: np.ndarray):
    w, v = np.linalg.eigh(m)
    return w[::-1].copy(), v[:, ::-1].copy()


def clamped_spectrum(m: np.ndarray, floor: float):
    """Eigendecompose Hermitian ``m``; eigenvalues in [-floor, 0) are zeroed.

    Raises if an eigenvalue sits below ``-floor``.
    """
    w, v = np.linalg.eigh(m)
    if w.size and float(w[0]) < -floor:
        raise ValidationError(
            f"matrix is not positive semidefinite: smallest eigenvalue {w[0]:.3e} < -{floor:.1e}"
        )
    return np.clip(w, 0.0, None), v


def psd_sqrt(m: np.ndarray, floor: float = 1e-8) -> np.ndarray:
    w, v = clamped_spectrum(herm(m), floor)
    return (v * np.sqrt(w)) @ dag(v)


def support_projector(m: np.ndarray, cut: float = 1e-10) -> np.ndarray:
    w, v = np.linalg.eigh(herm(m))
    cols = v[:, w > cut]
    return cols @ dag(cols)


def xlog2x(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    safe = np.clip(p, 1e-300, None)
    return np.where(p > 0.0, p * np.log2(safe), 0.0)


def shannon_bits(probs) -> float:
    return float(-np.sum(xlog2x(np.asarray(probs, dtype=float))))


def orthonormal_operator_basis(mats, rel_tol: float = 1e-9):
    """Orthonormal (Hilbert-Schmidt) basis of the span of the given matrices."""
    shape = mats[0].shape
    stack = np.stack([m.ravel() for m in mats])
    _, s, vh = np.linalg.svd(stack, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return []
    keep = s > s[0] * rel_tol
    return [vh[i].reshape(shape) for i in np.nonzero(keep)[0]]


def stack_basis(basis) -> np.ndarray:
    return np.stack([b.ravel() for b in basis])


def span_residual(bstack: np.ndarray, m: np.ndarray) -> float:
    """Distance (Frobenius) from ``m`` to the span of an orthonormal basis stack."""
    vec = m.ravel()
    coeffs = bstack.conj() @ vec
    return float(np.linalg.norm(vec - bstack.T @ coeffs))


def span_coefficients(bstack: np.ndarray, m: np.ndarray) -> np.ndarray:
    return bstack.conj() @ m.ravel()


def max_span_residual(bstack: np.ndarray, mats, chunk: int = 2048) -> float:
    """Largest distance from the span over a batch of matrices."""
    worst = 0.0
    for start in range(0, len(mats), chunk):
        rows = np.stack([m.ravel() for m in mats[start:start + chunk]])
        coeffs = rows @ bstack.conj().T
        res = rows - coeffs @ bstack
        worst = max(worst, float(np.linalg.norm(res, axis=1).max()))
    return worst


def _zero_eigenspace(h: np.ndarray, rel_tol: float = 1e-12) -> np.ndarray:
    w, v = np.linalg.eigh(herm(h))
    scale = max(1.0, float(w[-1])) if w.size else 1.0
    return v[:, w <= rel_tol * scale]


def commutant_basis(gens, dim: int, rel_tol: float = 1e-12):
    """Basis of {X : XB = BX for every generator B} inside the full matrix algebra.

    Row-major vec convention: vec(XB - BX) = (I kron B^T - B kron I) vec(X).
    """
    eye = np.eye(dim)
    h = np.zeros((dim * dim, dim * dim), dtype=np.complex128)
    for b in gens:
        f = np.kron(eye, b.T) - np.kron(b, eye)
        h += dag(f) @ f
    cols = _zero_eigenspace(h, rel_tol)
    return [cols[:, i].reshape(dim, dim) for i in range(cols.shape[1])]


def intertwiner_space(reps_a, reps_b, rel_tol: float = 1e-10):
    """Solutions T of rep_b(g) T = T rep_a(g) for all paired generators g."""
    c = reps_a[0].shape[0]
    eye = np.eye(c)
    h = np.zeros((c * c, c * c), dtype=np.complex128)
    for a, b in zip(reps_a, reps_b):
        f = np.kron(b, eye) - np.kron(eye, a.T)
        h += dag(f) @ f
    cols = _zero_eigenspace(h, rel_tol)
    return [cols[:, i].reshape(c, c) for i in range(cols.shape[1])]


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    ph = d / np.abs(d)
    return q * ph.conj()[None, :]


def haar_isometry(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """Random isometry V (rows x cols, rows >= cols) with V^dag V = I."""
    if rows < cols:
        raise ValidationError(f"isometry needs rows >= cols, got {rows} < {cols}")
    g = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    ph = d / np.abs(d)
    return q * ph.conj()[None, :]


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return herm(g)


def kron_list(mats) -> np.ndarray:
    out = np.array([[1.0 + 0.0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def blocks_to_dense(blocks) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=np.complex128)
    off = 0
    for b in blocks:
        d = b.shape[0]
        out[off:off + d, off:off + d] = b
        off += d
    return out


def dense_to_blocks(m: np.ndarray, dims, tol: float | None = None):
    """Cut a dense matrix into diagonal blocks; optionally verify it is block diagonal."""
    blocks = []
    off = 0
    for d in dims:
        blocks.append(np.array(m[off:off + d, off:off + d]))
        off += d
    if tol is not None:
        residual = m - blocks_to_dense(blocks)
        if fro_norm(residual) > tol * max(1.0, fro_norm(m)):
            raise ValidationError(
                f"matrix is not block diagonal for dims {tuple(dims)}: off-block weight {fro_norm(residual):.3e}"
            )
    return blocks
