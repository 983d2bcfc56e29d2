"""Entropy, divergence and information quantities in three languages.

Everything is measured in bits (logarithms base 2).  The same quantities can
be computed for compatible observables (Shannon theory of the joint outcome
distribution), for compatible embedded subalgebras (entropies of restricted
states, with products realized through generated product algebras), and for
compatible quantum operations (entropies of preadjoint images), plus the
hybrid subalgebra/observable forms.  Conditional quantities are always the
defining entropy differences; closed-form alternatives serve as test oracles
elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _linalg as la
from ._digest import inputs_digest
from .algebra import SubalgebraEmbedding, product_embedding
from .errors import ValidationError
from .observable import Povm, joint, joint_many, measure, as_operation
from .operation import KrausMap, embedding_as_operation, product
from .state import DensityState, preadjoint_apply, restrict

SUPPORT_EIG_CUT = 1e-10
SUPPORT_LEAK_TOL = 1e-8


def binary_entropy(x: float) -> float:
    """h(x) = -x log x - (1-x) log(1-x) with h(0) = h(1) = 0."""
    if x < -1e-12 or x > 1.0 + 1e-12:
        raise ValidationError(f"binary entropy argument {x!r} outside [0, 1]")
    x = min(max(float(x), 0.0), 1.0)
    return la.shannon_bits([x, 1.0 - x])


def shannon_entropy(probs) -> float:
    return la.shannon_bits(probs)


def von_neumann_entropy(rho: DensityState) -> float:
    """H(rho) = -Tr(rho log rho), from the spectrum."""
    return la.shannon_bits(rho.eigenvalues())


@dataclass(frozen=True)
class DivergenceValue:
    """A divergence in bits; infinite when the support condition fails."""

    bits: float

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.bits)

    def __float__(self) -> float:
        return self.bits


def divergence(rho: DensityState, sigma: DensityState) -> DivergenceValue:
    """Umegaki divergence D(rho||sigma) = Tr rho (log rho - log sigma)."""
    if rho.algebra != sigma.algebra:
        raise ValidationError("divergence needs both states on the same algebra")
    return DivergenceValue(_divergence_blocks(rho.blocks, sigma.blocks))


def _divergence_blocks(rho_blocks, sigma_blocks) -> float:
    """Divergence of positive block families (not necessarily normalized)."""
    plain = 0.0
    cross = 0.0
    for rb, sb in zip(rho_blocks, sigma_blocks):
        w_r, v_r = np.linalg.eigh(la.herm(rb))
        w_s, v_s = np.linalg.eigh(la.herm(sb))
        supp = v_s[:, w_s > SUPPORT_EIG_CUT]
        outside = np.eye(rb.shape[0]) - supp @ la.dag(supp)
        for i in range(w_r.size):
            if w_r[i] > SUPPORT_EIG_CUT:
                if la.fro_norm(outside @ v_r[:, i:i + 1]) > SUPPORT_LEAK_TOL:
                    return math.inf
        plain += float(np.sum(la.xlog2x(np.clip(w_r, 0.0, None))))
        keep = w_s > SUPPORT_EIG_CUT
        log_s = (v_s[:, keep] * np.log2(w_s[keep])) @ la.dag(v_s[:, keep])
        proj = supp @ la.dag(supp)
        rho_proj = proj @ rb @ proj
        cross += float(np.real(np.trace(rho_proj @ log_s)))
    return plain - cross


# ---------------------------------------------------------------------------
# observable language
# ---------------------------------------------------------------------------

def entropy_of_observable(x: Povm, rho: DensityState) -> float:
    return la.shannon_bits(measure(x, rho).as_array())


def conditional_entropy_obs(x: Povm, y: Povm, rho: DensityState, *, tol: float = 1e-9) -> float:
    """H(X|Y) = H(X.Y) - H(Y), from the joint outcome distribution."""
    hxy = la.shannon_bits(measure(joint(x, y, tol=tol), rho).as_array())
    return hxy - entropy_of_observable(y, rho)


def mutual_info_obs(x: Povm, y: Povm, rho: DensityState, *, tol: float = 1e-9) -> float:
    hxy = la.shannon_bits(measure(joint(x, y, tol=tol), rho).as_array())
    return entropy_of_observable(x, rho) + entropy_of_observable(y, rho) - hxy


def cond_mutual_info_obs(x: Povm, y: Povm, z: Povm, rho: DensityState,
                         *, tol: float = 1e-9) -> float:
    """I(X ^ Y | Z) = H(XZ) + H(YZ) - H(XYZ) - H(Z)."""
    hxz = la.shannon_bits(measure(joint(x, z, tol=tol), rho).as_array())
    hyz = la.shannon_bits(measure(joint(y, z, tol=tol), rho).as_array())
    hxyz = la.shannon_bits(measure(joint_many([x, y, z], tol=tol), rho).as_array())
    return hxz + hyz - hxyz - entropy_of_observable(z, rho)


# ---------------------------------------------------------------------------
# subalgebra language
# ---------------------------------------------------------------------------

def entropy_of_subalgebra(iota: SubalgebraEmbedding, rho: DensityState) -> float:
    """Entropy of the global state viewed through the subsystem."""
    return von_neumann_entropy(restrict(rho, iota))


def conditional_entropy_subalg(x: SubalgebraEmbedding, y: SubalgebraEmbedding,
                               rho: DensityState, *, tol: float = 1e-9,
                               seed: int = 0) -> float:
    """H(X|Y) = H(XY) - H(Y); may be negative for entangled states."""
    xy = product_embedding([x, y], tol=tol, seed=seed)
    return entropy_of_subalgebra(xy, rho) - entropy_of_subalgebra(y, rho)


def mutual_info_subalg(x: SubalgebraEmbedding, y: SubalgebraEmbedding,
                       rho: DensityState, *, tol: float = 1e-9, seed: int = 0) -> float:
    xy = product_embedding([x, y], tol=tol, seed=seed)
    return (entropy_of_subalgebra(x, rho) + entropy_of_subalgebra(y, rho)
            - entropy_of_subalgebra(xy, rho))


def cond_mutual_info_subalg(x1: SubalgebraEmbedding, x2: SubalgebraEmbedding,
                            y: SubalgebraEmbedding, rho: DensityState,
                            *, tol: float = 1e-9, seed: int = 0) -> float:
    """I(X1 ^ X2 | Y) = H(X1 Y) + H(X2 Y) - H(X1 X2 Y) - H(Y)."""
    x1y = product_embedding([x1, y], tol=tol, seed=seed)
    x2y = product_embedding([x2, y], tol=tol, seed=seed)
    x1x2y = product_embedding([x1, x2, y], tol=tol, seed=seed)
    return (entropy_of_subalgebra(x1y, rho) + entropy_of_subalgebra(x2y, rho)
            - entropy_of_subalgebra(x1x2y, rho) - entropy_of_subalgebra(y, rho))


# ---------------------------------------------------------------------------
# operation language
# ---------------------------------------------------------------------------

def entropy_of_operation(phi: KrausMap, rho: DensityState) -> float:
    """H(phi) = H(phi_* rho): the state viewed through the operation."""
    return von_neumann_entropy(preadjoint_apply(phi, rho))


def conditional_entropy_op(phi: KrausMap, psi: KrausMap, rho: DensityState,
                           *, tol: float = 1e-9) -> float:
    return entropy_of_operation(product(phi, psi, tol=tol), rho) - entropy_of_operation(psi, rho)


def mutual_info_op(phi: KrausMap, psi: KrausMap, rho: DensityState,
                   *, tol: float = 1e-9) -> float:
    return (entropy_of_operation(phi, rho) + entropy_of_operation(psi, rho)
            - entropy_of_operation(product(phi, psi, tol=tol), rho))


def cond_mutual_info_op(phi: KrausMap, psi: KrausMap, chi: KrausMap, rho: DensityState,
                        *, tol: float = 1e-9) -> float:
    phichi = product(phi, chi, tol=tol)
    psichi = product(psi, chi, tol=tol)
    all3 = product(product(phi, psi, tol=tol), chi, tol=tol)
    return (entropy_of_operation(phichi, rho) + entropy_of_operation(psichi, rho)
            - entropy_of_operation(all3, rho) - entropy_of_operation(chi, rho))


# ---------------------------------------------------------------------------
# hybrid (subalgebra with observable) forms
# ---------------------------------------------------------------------------

def cond_entropy_subalgebra_given_obs(iota: SubalgebraEmbedding, y: Povm,
                                      rho: DensityState, *, tol: float = 1e-9) -> float:
    """H(X|Y) for a subalgebra conditioned on an observable; always >= 0."""
    return conditional_entropy_op(embedding_as_operation(iota), as_operation(y), rho, tol=tol)


def mutual_info_subalgebra_obs(iota: SubalgebraEmbedding, y: Povm,
                               rho: DensityState, *, tol: float = 1e-9) -> float:
    return mutual_info_op(embedding_as_operation(iota), as_operation(y), rho, tol=tol)


def cond_entropy_obs_given_subalgebra(x: Povm, jota: SubalgebraEmbedding,
                                      rho: DensityState, *, tol: float = 1e-9) -> float:
    """H(X|Y) for an observable conditioned on a subalgebra; always >= 0."""
    return conditional_entropy_op(as_operation(x), embedding_as_operation(jota), rho, tol=tol)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EntropyReport:
    """A computed information quantity tagged with its language and inputs."""

    quantity: str
    language: str
    value_bits: float
    inputs_digest: str
    context: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        value = "inf" if math.isinf(self.value_bits) else self.value_bits
        return {"quantity": self.quantity, "language": self.language,
                "value_bits": value, "inputs_digest": self.inputs_digest}


def report(quantity: str, language: str, value_bits: float, *inputs) -> EntropyReport:
    return EntropyReport(quantity, language, float(value_bits), inputs_digest(*inputs))
