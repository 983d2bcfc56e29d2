"""Independent brute-force oracles the library is checked against.

Everything here works on explicit joint probability arrays or tiny dense
matrices and deliberately avoids the library's own code paths.
"""

import numpy as np


def shannon(p) -> float:
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def joint_entropy(pxy) -> float:
    return shannon(pxy)


def conditional_entropy(pxy) -> float:
    """H(X|Y) from a joint array with X on axis 0."""
    pxy = np.asarray(pxy, dtype=float)
    return shannon(pxy) - shannon(pxy.sum(axis=0))


def mutual_information(pxy) -> float:
    pxy = np.asarray(pxy, dtype=float)
    return shannon(pxy.sum(axis=1)) + shannon(pxy.sum(axis=0)) - shannon(pxy)


def conditional_mutual_information(pxyz) -> float:
    """I(X ^ Y | Z) from a joint array with axes (X, Y, Z)."""
    pxyz = np.asarray(pxyz, dtype=float)
    hxz = shannon(pxyz.sum(axis=1))
    hyz = shannon(pxyz.sum(axis=0))
    hxyz = shannon(pxyz)
    hz = shannon(pxyz.sum(axis=(0, 1)))
    return hxz + hyz - hxyz - hz


def kl_divergence(p, q) -> float:
    p = np.asarray(p, dtype=float).ravel()
    q = np.asarray(q, dtype=float).ravel()
    out = 0.0
    for pi, qi in zip(p, q):
        if pi > 1e-12:
            if qi <= 1e-14:
                return float("inf")
            out += pi * np.log2(pi / qi)
    return float(out)


def blahut_arimoto(kernel, tol: float = 1e-12, max_iter: int = 2000):
    """Capacity of a discrete memoryless channel given row-stochastic kernel."""
    kernel = np.asarray(kernel, dtype=float)
    m = kernel.shape[0]
    r = np.full(m, 1.0 / m)
    q = None
    for _ in range(max_iter):
        q = r[:, None] * kernel
        q = q / (q.sum(axis=0, keepdims=True) + 1e-300)
        log_r = np.sum(kernel * np.log(q + 1e-300), axis=1)
        r_new = np.exp(log_r)
        r_new = r_new / r_new.sum()
        if np.linalg.norm(r_new - r) < tol:
            r = r_new
            break
        r = r_new
    cap = 0.0
    for i in range(m):
        if r[i] > 0:
            cap += np.sum(r[i] * kernel[i] * np.log2((q[i] + 1e-300) / r[i]))
    return float(cap), r


def mutual_information_of_input(kernel, p) -> float:
    """I(X;Y) of a classical channel for a fixed input distribution."""
    kernel = np.asarray(kernel, dtype=float)
    p = np.asarray(p, dtype=float)
    joint = p[:, None] * kernel
    return mutual_information(joint)


def helstrom_error(rho0, rho1, p0: float = 0.5) -> float:
    """Optimal two-state discrimination error 0.5 (1 - ||p0 r0 - p1 r1||_1)."""
    delta = p0 * np.asarray(rho0) - (1 - p0) * np.asarray(rho1)
    sv = np.linalg.svd(delta, compute_uv=False)
    return float(0.5 * (1.0 - sv.sum()))


def span_rank(mats, tol: float = 1e-9) -> int:
    """Rank of the linear span via Gram elimination."""
    vecs = [np.asarray(m).ravel() for m in mats]
    gram = np.zeros((len(vecs), len(vecs)), dtype=complex)
    for i, a in enumerate(vecs):
        for j, b in enumerate(vecs):
            gram[i, j] = np.vdot(a, b)
    eig = np.linalg.eigvalsh(0.5 * (gram + gram.conj().T))
    return int(np.sum(eig > tol * max(1.0, float(eig[-1]))))


def bsc_flip(a: float, b: float) -> float:
    """Composition parameter of two symmetric binary flips."""
    return a * (1.0 - b) + (1.0 - a) * b


def h2(x: float) -> float:
    return shannon([x, 1.0 - x])
