"""Classical-quantum channels, channel states, capacity bounds and codes.

A channel is a finite input alphabet together with one output state per
letter.  Correlation between input and output is carried by the channel
state on (input functions) (x) (output algebra); information quantities of
that state reproduce the process quantities, which is what the capacity
bounds below are built from.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import _linalg as la
from ._digest import inputs_digest
from .algebra import (
    AlgebraElement,
    BlockAlgebra,
    SubalgebraEmbedding,
    TensorProduct,
    leg_embedding,
    make_commutative,
    require_compatible,
    tensor_many,
)
from .errors import BudgetError, ValidationError
from .infotheory import (
    binary_entropy,
    cond_mutual_info_subalg,
    conditional_entropy_subalg,
    entropy_of_subalgebra,
    mutual_info_subalg,
    von_neumann_entropy,
)
from .inequalities import InequalityVerdict, _verdict
from .observable import Povm, measure, povm_from_columns
from .operation import KrausMap, tensor_power_map
from .state import DensityState, preadjoint_apply, restrict

MAX_SENDERS = 4
MAX_ALPHABET = 8
MAX_OUTPUT_DIM = 16
MAX_BLOCK_DIM = 512


# ---------------------------------------------------------------------------
# channels and channel states
# ---------------------------------------------------------------------------

class CqChannel:
    """A classical-quantum channel: one output state per input letter."""

    __slots__ = ("input_labels", "output_algebra", "letter_states")

    def __init__(self, input_labels, output_algebra: BlockAlgebra, letter_states):
        input_labels = tuple(input_labels)
        letter_states = tuple(letter_states)
        if not input_labels or len(set(input_labels)) != len(input_labels):
            raise ValidationError("input labels must be nonempty and distinct")
        if len(letter_states) != len(input_labels):
            raise ValidationError("one letter state per input label is required")
        for w in letter_states:
            if w.algebra != output_algebra:
                raise ValidationError("letter states must live on the output algebra")
        object.__setattr__(self, "input_labels", input_labels)
        object.__setattr__(self, "output_algebra", output_algebra)
        object.__setattr__(self, "letter_states", letter_states)

    def __setattr__(self, name, value):
        raise AttributeError("CqChannel is immutable")

    def input_algebra(self) -> BlockAlgebra:
        return make_commutative(self.input_labels)

    def letter(self, label) -> DensityState:
        return self.letter_states[self.input_labels.index(label)]

    def digest_parts(self):
        return ("channel", tuple(map(repr, self.input_labels)), self.output_algebra,
                [w.digest_parts() for w in self.letter_states])


def _as_distribution(p, labels) -> np.ndarray:
    if isinstance(p, Mapping):
        arr = np.array([float(p.get(x, 0.0)) for x in labels])
    else:
        arr = np.asarray(p, dtype=float)
    if arr.size != len(labels):
        raise ValidationError("distribution does not match the input alphabet")
    if np.any(arr < -1e-12) or abs(arr.sum() - 1.0) > 1e-9:
        raise ValidationError("not a probability distribution")
    arr = np.clip(arr, 0.0, None)
    return arr / arr.sum()


def average_output(p, w: CqChannel) -> DensityState:
    """The averaged output sum_x P(x) W_x."""
    arr = _as_distribution(p, w.input_labels)
    blocks = [np.zeros((d, d), dtype=np.complex128) for d in w.output_algebra.block_dims]
    for px, wx in zip(arr, w.letter_states):
        for i, b in enumerate(wx.blocks):
            blocks[i] += px * b
    return DensityState(w.output_algebra, blocks)


def mutual_information_pw(p, w: CqChannel) -> float:
    """I(P, W) = H(PW) - sum_x P(x) H(W_x), in bits."""
    arr = _as_distribution(p, w.input_labels)
    out = von_neumann_entropy(average_output(arr, w))
    return out - float(sum(px * von_neumann_entropy(wx)
                           for px, wx in zip(arr, w.letter_states)))


@dataclass(frozen=True, eq=False)
class ChannelState:
    """A correlation state over classical input legs and quantum output legs.

    ``sender_legs`` index the commutative input factors of ``structure``,
    ``output_leg`` the channel output; ``extra_leg`` names the detection
    stage of a three-stage state.  Receiver subalgebras, when present, embed
    into the output factor.
    """

    state: DensityState
    structure: TensorProduct
    sender_legs: tuple[int, ...]
    output_leg: int
    extra_leg: int | None = None
    receivers: tuple[SubalgebraEmbedding, ...] = ()

    def leg(self, selectors: Mapping[int, object]) -> SubalgebraEmbedding:
        parts = [None] * len(self.structure.factors)
        for pos, sel in selectors.items():
            parts[pos] = sel
        return leg_embedding(self.structure, parts)

    def digest_parts(self):
        return ("channel_state", self.state.digest_parts(), self.sender_legs,
                self.output_leg, self.extra_leg)


def build_channel_state(p, w: CqChannel) -> ChannelState:
    """gamma = sum_x P(x) [x] (x) W_x, with both marginals verified."""
    arr = _as_distribution(p, w.input_labels)
    tp = tensor_many([w.input_algebra(), w.output_algebra])
    blocks = []
    for bt in tp.block_tuples:
        x_idx, out_idx = bt
        blocks.append(arr[x_idx] * w.letter_states[x_idx].blocks[out_idx])
    gamma = DensityState(tp.algebra, blocks)
    cs = ChannelState(gamma, tp, (0,), 1)
    _check_marginals(cs, arr, w)
    return cs


def _check_marginals(cs: ChannelState, arr, w: CqChannel) -> None:
    from .state import partial_trace
    inp = partial_trace(cs.state, cs.structure, cs.sender_legs[0])
    got = np.array([float(np.real(b[0, 0])) for b in inp.blocks])
    if np.max(np.abs(got - arr)) > 1e-9:
        raise ValidationError("channel state does not reproduce the input distribution")
    out = partial_trace(cs.state, cs.structure, cs.output_leg)
    avg = average_output(arr, w)
    if max((np.abs(a - b)).max() for a, b in zip(out.blocks, avg.blocks)) > 1e-9:
        raise ValidationError("channel state does not reproduce the averaged output")


def build_three_stage(p, w: CqChannel, phi: KrausMap) -> ChannelState:
    """gamma = sum_x P(x) [x] (x) W_x (x) phi_*(W_x) for a detection stage phi."""
    if phi.target != w.output_algebra:
        raise ValidationError("detection stage must act on states of the output algebra")
    arr = _as_distribution(p, w.input_labels)
    z_alg = phi.source
    tp = tensor_many([w.input_algebra(), w.output_algebra, z_alg])
    detections = [preadjoint_apply(phi, wx) for wx in w.letter_states]
    blocks = []
    for bt in tp.block_tuples:
        x_idx, out_idx, z_idx = bt
        blocks.append(arr[x_idx] * np.kron(w.letter_states[x_idx].blocks[out_idx],
                                           detections[x_idx].blocks[z_idx]))
    gamma = DensityState(tp.algebra, blocks)
    return ChannelState(gamma, tp, (0,), 1, extra_leg=2)


def build_three_stage_decomposed(p, kernel, pure_states: Sequence[DensityState],
                                 w: CqChannel, phi: KrausMap,
                                 *, tol: float = 1e-9) -> ChannelState:
    """Three-stage state from an explicit pure decomposition W_x = sum_y k(y|x) V_y.

    The decomposition is a caller choice (it is not unique); it must
    reconstruct every letter state within ``tol``.
    """
    kernel = np.asarray(kernel, dtype=float)
    if kernel.shape != (len(w.input_labels), len(pure_states)):
        raise ValidationError("kernel must be |inputs| x |pure states|")
    if np.any(kernel < -1e-12) or np.max(np.abs(kernel.sum(axis=1) - 1.0)) > 1e-9:
        raise ValidationError("kernel rows must be probability distributions")
    for v in pure_states:
        if v.algebra != w.output_algebra or not v.is_pure(1e-8):
            raise ValidationError("decomposition states must be pure on the output algebra")
    for xi, wx in enumerate(w.letter_states):
        recon = [np.zeros_like(b) for b in wx.blocks]
        for yi, v in enumerate(pure_states):
            for bi, b in enumerate(v.blocks):
                recon[bi] += kernel[xi, yi] * b
        if max(np.abs(a - b).max() for a, b in zip(recon, wx.blocks)) > tol:
            raise ValidationError(f"decomposition does not reconstruct letter state {xi}")
    arr = _as_distribution(p, w.input_labels)
    z_alg = phi.source
    tp = tensor_many([w.input_algebra(), w.output_algebra, z_alg])
    detections = [preadjoint_apply(phi, v) for v in pure_states]
    blocks = [np.zeros((d, d), dtype=np.complex128) for d in tp.algebra.block_dims]
    for b, bt in enumerate(tp.block_tuples):
        x_idx, out_idx, z_idx = bt
        for yi, v in enumerate(pure_states):
            weight = arr[x_idx] * kernel[x_idx, yi]
            if weight > 0:
                blocks[b] += weight * np.kron(v.blocks[out_idx], detections[yi].blocks[z_idx])
    gamma = DensityState(tp.algebra, blocks)
    return ChannelState(gamma, tp, (0,), 1, extra_leg=2)


# ---------------------------------------------------------------------------
# information bound for channels
# ---------------------------------------------------------------------------

def degrade_channel(w: CqChannel, phi: KrausMap) -> CqChannel:
    """The processed channel x -> phi_*(W_x)."""
    if phi.target != w.output_algebra:
        raise ValidationError("post-processing must act on states of the output algebra")
    return CqChannel(w.input_labels, phi.source,
                     [preadjoint_apply(phi, wx) for wx in w.letter_states])


def check_holevo_bound(p, w: CqChannel, phi_or_povm, *, tol: float = 1e-8) -> list[InequalityVerdict]:
    """I(P, W) >= I(P, phi_* o W) for any post-processing, and I(P, W) <= H(P)."""
    from .observable import as_operation
    phi = as_operation(phi_or_povm) if isinstance(phi_or_povm, Povm) else phi_or_povm
    arr = _as_distribution(p, w.input_labels)
    i_pw = mutual_information_pw(arr, w)
    i_processed = mutual_information_pw(arr, degrade_channel(w, phi))
    h_p = la.shannon_bits(arr)
    digest = inputs_digest("holevo_bound", arr, w, phi)
    return [
        _verdict("holevo_bound_processing", i_processed, i_pw, tol, digest),
        _verdict("holevo_bound_entropy_cap", i_pw, h_p, tol, digest),
    ]


def max_projective_information(p, w: CqChannel, resolution: int = 48) -> tuple[float, np.ndarray]:
    """Grid search over von Neumann measurements of a qubit output for the
    largest classical mutual information; returns (bits, best basis)."""
    if w.output_algebra.block_dims != (2,):
        raise ValidationError("the grid search supports qubit outputs only")
    arr = _as_distribution(p, w.input_labels)
    best = -1.0
    best_u = np.eye(2, dtype=np.complex128)
    for it in range(resolution):
        theta = math.pi * (it + 0.5) / resolution
        for ip in range(2 * resolution):
            phase = 2.0 * math.pi * ip / (2 * resolution)
            v0 = np.array([math.cos(theta / 2.0),
                           math.sin(theta / 2.0) * np.exp(1j * phase)])
            v1 = np.array([-math.sin(theta / 2.0),
                           math.cos(theta / 2.0) * np.exp(1j * phase)])
            u = np.stack([v0, v1], axis=1)
            povm = povm_from_columns(w.output_algebra, u)
            joint = np.stack([arr[xi] * measure(povm, wx).as_array()
                              for xi, wx in enumerate(w.letter_states)])
            hx = la.shannon_bits(joint.sum(axis=1))
            hy = la.shannon_bits(joint.sum(axis=0))
            hxy = la.shannon_bits(joint.ravel())
            mi = hx + hy - hxy
            if mi > best:
                best, best_u = mi, u
    return best, best_u


# ---------------------------------------------------------------------------
# the binary-channel double-use table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExampleScenario:
    cond_entropy_given_output: float      # H(inputs | output)
    cond_entropy_given_both: float        # H(inputs | output and detection)
    cond_mutual_info: float               # I(inputs ^ detection | output)
    closed_form_given_output: float
    closed_form_given_both: float


@dataclass(frozen=True)
class ExampleTable:
    cloning: ExampleScenario
    measuring: ExampleScenario


def binary_example_channel() -> CqChannel:
    """Binary inputs into a qubit: W_0 = |0><0|, W_1 = |+><+|."""
    out = BlockAlgebra((2,))
    w0 = DensityState(out, [np.array([[1.0, 0.0], [0.0, 0.0]], dtype=np.complex128)])
    plus = np.full((2, 2), 0.5, dtype=np.complex128)
    w1 = DensityState(out, [plus])
    return CqChannel((0, 1), out, (w0, w1))


def example_counterexample_table() -> ExampleTable:
    """Conditional entropies of the two three-stage scenarios of the binary
    channel, demonstrating that conditioning on the detection stage lowers
    the uncertainty (the double-use effect), so I(inputs ^ detection |
    output) cannot vanish."""
    from .operation import identity_map
    from .observable import as_operation
    w = binary_example_channel()
    p = (0.5, 0.5)
    alpha = math.cos(math.pi / 8.0) ** 2
    beta = 0.5 * (1.0 + math.sqrt(1.0 - 2.0 * alpha * (1.0 - alpha)))

    def scenario(phi, closed_both):
        cs = build_three_stage(p, w, phi)
        x = cs.leg({0: "full"})
        y = cs.leg({1: "full"})
        z = cs.leg({2: "full"})
        h_given_y = conditional_entropy_subalg(x, y, cs.state)
        yz = cs.leg({1: "full", 2: "full"})
        h_given_yz = conditional_entropy_subalg(x, yz, cs.state)
        cmi = cond_mutual_info_subalg(x, z, y, cs.state)
        return ExampleScenario(h_given_y, h_given_yz, cmi,
                               1.0 - binary_entropy(alpha), closed_both)

    cloning = scenario(identity_map(w.output_algebra),
                       1.0 - binary_entropy(math.cos(math.pi / 6.0) ** 2))
    c, s = math.cos(math.pi / 8.0), math.sin(math.pi / 8.0)
    uv = np.array([[c, s], [-s, c]], dtype=np.complex128)
    measuring = scenario(as_operation(povm_from_columns(w.output_algebra, uv)),
                         binary_entropy(alpha) - binary_entropy(beta))
    table = ExampleTable(cloning, measuring)
    for sc in (table.cloning, table.measuring):
        if sc.cond_mutual_info <= 1e-3:
            raise ValidationError("double-use effect missing: the conditional mutual "
                                  "information between inputs and detection vanished")
        if not sc.cond_entropy_given_both < sc.cond_entropy_given_output:
            raise ValidationError("double-use effect missing: conditioning on the "
                                  "detection stage did not lower the uncertainty")
    return table


# ---------------------------------------------------------------------------
# multiway channels
# ---------------------------------------------------------------------------

class MultiwayChannel:
    """s classical senders into one quantum output read by r compatible receivers."""

    __slots__ = ("sender_alphabets", "output_algebra", "letter_states", "receivers")

    def __init__(self, sender_alphabets, output_algebra: BlockAlgebra, letter_states,
                 receivers, *, tol: float = 1e-9):
        sender_alphabets = tuple(tuple(a) for a in sender_alphabets)
        receivers = tuple(receivers)
        if not sender_alphabets:
            raise ValidationError("need at least one sender")
        letters = dict(letter_states)
        for combo in itertools.product(*sender_alphabets):
            if combo not in letters:
                raise ValidationError(f"missing letter state for input {combo}")
            if letters[combo].algebra != output_algebra:
                raise ValidationError("letter states must live on the output algebra")
        for r in receivers:
            if r.parent != output_algebra:
                raise ValidationError("receivers must embed into the output algebra")
        for i in range(len(receivers)):
            for j in range(i + 1, len(receivers)):
                require_compatible(receivers[i], receivers[j], tol)
        object.__setattr__(self, "sender_alphabets", sender_alphabets)
        object.__setattr__(self, "output_algebra", output_algebra)
        object.__setattr__(self, "letter_states", letters)
        object.__setattr__(self, "receivers", receivers)

    def __setattr__(self, name, value):
        raise AttributeError("MultiwayChannel is immutable")

    @property
    def num_senders(self) -> int:
        return len(self.sender_alphabets)

    @property
    def num_receivers(self) -> int:
        return len(self.receivers)

    def digest_parts(self):
        keys = sorted(self.letter_states.keys(), key=repr)
        return ("multiway", tuple(map(repr, keys)), self.output_algebra,
                [self.letter_states[k].digest_parts() for k in keys],
                [r.digest_parts() for r in self.receivers])


def multiway_channel_state(mc: MultiwayChannel, input_dists=None, joint=None) -> ChannelState:
    """Channel state for product input distributions or an explicit joint."""
    sizes = tuple(len(a) for a in mc.sender_alphabets)
    if joint is not None:
        p = np.asarray(joint, dtype=float)
        if p.shape != sizes:
            raise ValidationError(f"joint distribution must have shape {sizes}")
    else:
        dists = [_as_distribution(d, a) for d, a in zip(input_dists, mc.sender_alphabets)]
        p = dists[0]
        for d in dists[1:]:
            p = np.multiply.outer(p, d)
    if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9:
        raise ValidationError("not a probability distribution")
    p = np.clip(p, 0.0, None)
    p = p / p.sum()
    sender_algs = [make_commutative(a) for a in mc.sender_alphabets]
    tp = tensor_many(sender_algs + [mc.output_algebra])
    blocks = []
    for bt in tp.block_tuples:
        x_idx = bt[:-1]
        combo = tuple(a[i] for a, i in zip(mc.sender_alphabets, x_idx))
        blocks.append(p[x_idx] * mc.letter_states[combo].blocks[bt[-1]])
    gamma = DensityState(tp.algebra, blocks)
    return ChannelState(gamma, tp, tuple(range(mc.num_senders)), mc.num_senders,
                        receivers=mc.receivers)


def conditional_mi_constraint(gamma: ChannelState, subset, receiver: int) -> float:
    """I(X(J) ^ Y_j | X(J^c)) on a multiway channel state, in bits."""
    senders = set(gamma.sender_legs)
    subset = tuple(sorted(set(int(i) for i in subset)))
    if any(i not in senders for i in subset):
        raise ValidationError(f"sender subset out of range: {subset}")
    if not gamma.receivers or receiver < 0 or receiver >= len(gamma.receivers):
        raise ValidationError(f"receiver index out of range: {receiver}")
    if not subset:
        return 0.0
    comp = tuple(sorted(senders - set(subset)))
    y_sel = {gamma.output_leg: gamma.receivers[receiver]}
    h_all_x = entropy_of_subalgebra(gamma.leg({i: "full" for i in senders}), gamma.state)
    h_comp_y = entropy_of_subalgebra(
        gamma.leg({**{i: "full" for i in comp}, **y_sel}), gamma.state)
    h_all_y = entropy_of_subalgebra(
        gamma.leg({**{i: "full" for i in senders}, **y_sel}), gamma.state)
    h_comp = entropy_of_subalgebra(gamma.leg({i: "full" for i in comp}), gamma.state)
    return h_all_x + h_comp_y - h_all_y - h_comp


# ---------------------------------------------------------------------------
# outer bound sampling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegionSamplerConfig:
    mode: str = "product"        # "product" or "joint" input distributions
    num_samples: int = 32
    mixture_size: int = 3
    seed: int = 0


@dataclass(frozen=True, eq=False)
class MixtureComponent:
    weight: float
    input_dists: tuple            # per-sender tuples (product) or a joint array


@dataclass(frozen=True, eq=False)
class RateRegionSample:
    """One convex mixture of channel states with its constraint table."""

    components: tuple[MixtureComponent, ...]
    table: dict                    # (subset tuple, receiver) -> bits


@dataclass(frozen=True, eq=False)
class RegionResult:
    samples: tuple[RateRegionSample, ...]
    constraint_max: dict           # (subset, receiver) -> max over mixtures
    sum_rate_outer: dict           # subset -> max over mixtures of min over receivers


def _region_budget_check(mc: MultiwayChannel) -> None:
    if mc.num_senders > MAX_SENDERS:
        raise BudgetError(f"at most {MAX_SENDERS} senders are supported, got {mc.num_senders}")
    for a in mc.sender_alphabets:
        if len(a) > MAX_ALPHABET:
            raise BudgetError(f"alphabet size {len(a)} exceeds the limit {MAX_ALPHABET}")
    if mc.output_algebra.total_dim > MAX_OUTPUT_DIM:
        raise BudgetError(
            f"output dimension {mc.output_algebra.total_dim} exceeds the limit {MAX_OUTPUT_DIM}")


def outer_bound_region(mc: MultiwayChannel, config: RegionSamplerConfig = RegionSamplerConfig()) -> RegionResult:
    """Sampled description of the capacity outer bound.

    Constraint tables are evaluated on sampled input distributions; mixtures
    are then formed greedily from the top-valued samples per constraint
    (bounds are linear in the mixture weights, so singleton mixtures already
    attain each per-constraint maximum; the greedy mixtures describe joint
    trade-offs).  Deterministic for a fixed seed.
    """
    _region_budget_check(mc)
    if config.mode not in ("product", "joint"):
        raise ValidationError(f"unknown sampling mode {config.mode!r}")
    rng = np.random.default_rng(config.seed)
    sizes = tuple(len(a) for a in mc.sender_alphabets)
    subsets = [tuple(s) for n in range(1, mc.num_senders + 1)
               for s in itertools.combinations(range(mc.num_senders), n)]
    base: list[tuple[tuple, dict]] = []
    for _ in range(config.num_samples):
        if config.mode == "product":
            dists = tuple(tuple(rng.dirichlet(np.ones(s))) for s in sizes)
            gamma = multiway_channel_state(mc, input_dists=dists)
        else:
            joint = rng.dirichlet(np.ones(int(np.prod(sizes)))).reshape(sizes)
            dists = (tuple(joint.ravel()),)
            gamma = multiway_channel_state(mc, joint=joint)
        table = {(subset, j): conditional_mi_constraint(gamma, subset, j)
                 for subset in subsets for j in range(mc.num_receivers)}
        base.append((dists, table))
    samples = [RateRegionSample((MixtureComponent(1.0, dists),), table)
               for dists, table in base]
    mixtures: list[RateRegionSample] = []
    k = max(1, min(config.mixture_size, len(base)))
    for subset in subsets:
        for j in range(mc.num_receivers):
            order = sorted(range(len(base)), key=lambda i: -base[i][1][(subset, j)])[:k]
            weight = 1.0 / len(order)
            comp = tuple(MixtureComponent(weight, base[i][0]) for i in order)
            table = {key: weight * sum(base[i][1][key] for i in order)
                     for key in base[0][1]}
            mixtures.append(RateRegionSample(comp, table))
    everything = samples + mixtures
    constraint_max = {key: max(s.table[key] for s in everything) for key in base[0][1]}
    sum_rate_outer = {}
    for subset in subsets:
        sum_rate_outer[subset] = max(
            min(s.table[(subset, j)] for j in range(mc.num_receivers)) for s in everything)
    return RegionResult(tuple(everything), constraint_max, sum_rate_outer)


# ---------------------------------------------------------------------------
# codes and the converse
# ---------------------------------------------------------------------------

class MultiwayCode:
    """Block encoders per sender, plus per-receiver decoding observables.

    Encoders must be injective; the decoding observables live on the n-fold
    tensor power of the output algebra with outcomes indexed by message
    tuples (receiver compatibility is inherited from the receivers).
    """

    __slots__ = ("n", "message_sets", "encoders", "decoders")

    def __init__(self, n: int, message_sets, encoders, decoders):
        message_sets = tuple(tuple(m) for m in message_sets)
        encoders = tuple(dict(e) for e in encoders)
        decoders = tuple(decoders)
        if n < 1:
            raise ValidationError("block length must be >= 1")
        for ms, enc in zip(message_sets, encoders):
            words = [tuple(enc[m]) for m in ms]
            if any(len(wd) != n for wd in words):
                raise ValidationError("codewords must have the block length")
            if len(set(words)) != len(words):
                raise ValidationError("encoders must be injective")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "message_sets", message_sets)
        object.__setattr__(self, "encoders", encoders)
        object.__setattr__(self, "decoders", decoders)

    def __setattr__(self, name, value):
        raise AttributeError("MultiwayCode is immutable")

    def rates(self) -> tuple[float, ...]:
        return tuple(math.log2(len(ms)) / self.n for ms in self.message_sets)

    def digest_parts(self):
        return ("code", self.n, tuple(map(repr, (m for ms in self.message_sets for m in ms))))


def output_power(mc: MultiwayChannel, n: int) -> TensorProduct:
    if mc.output_algebra.total_dim ** n > MAX_BLOCK_DIM:
        raise BudgetError(
            f"output power dimension {mc.output_algebra.total_dim ** n} exceeds {MAX_BLOCK_DIM}")
    return tensor_many([mc.output_algebra] * n)


def word_state(mc: MultiwayChannel, power: TensorProduct, words) -> DensityState:
    """W^(x)n evaluated on one codeword tuple (one letter state per use)."""
    from .state import product_state
    letters = []
    for u in range(len(words[0])):
        combo = tuple(wd[u] for wd in words)
        letters.append(mc.letter_states[combo])
    return product_state(power, letters)


def code_error_probabilities(mc: MultiwayChannel, code: MultiwayCode) -> tuple[float, ...]:
    """Average error probability per receiver, by exact evaluation."""
    power = output_power(mc, code.n)
    combos = list(itertools.product(*code.message_sets))
    states = {}
    for m in combos:
        words = [tuple(code.encoders[i][mi]) for i, mi in enumerate(m)]
        states[m] = word_state(mc, power, words)
    errors = []
    for j in range(mc.num_receivers):
        decoder: Povm = code.decoders[j]
        if decoder.algebra != power.algebra:
            raise ValidationError("decoder does not live on the n-fold output algebra")
        total = 0.0
        for m in combos:
            from .state import expectation
            total += float(np.real(expectation(states[m], decoder.effect(m))))
        errors.append(1.0 - total / len(combos))
    return tuple(errors)


@dataclass(frozen=True, eq=False)
class ConverseReport:
    verdicts: tuple[InequalityVerdict, ...]
    epsilon: float
    per_letter_states: tuple[ChannelState, ...]


def code_channel_state(mc: MultiwayChannel, code: MultiwayCode) -> tuple[DensityState, TensorProduct]:
    """The n-block channel state induced by uniformly distributed codewords.

    Legs are grouped per channel use: (senders..., output) repeated n times.
    """
    sender_algs = [make_commutative(a) for a in mc.sender_alphabets]
    factors = (sender_algs + [mc.output_algebra]) * code.n
    total_block = max(int(np.prod([f.block_dims[-1] for f in factors])), 1)
    if mc.output_algebra.total_dim ** code.n > MAX_BLOCK_DIM or total_block > MAX_BLOCK_DIM * 8:
        raise BudgetError("n-block channel state exceeds the dimension budget")
    tp = tensor_many(factors)
    combos = list(itertools.product(*code.message_sets))
    weight = 1.0 / len(combos)
    blocks = [np.zeros((d, d), dtype=np.complex128) for d in tp.algebra.block_dims]
    s = mc.num_senders
    label_index = [{lab: i for i, lab in enumerate(a)} for a in mc.sender_alphabets]
    for m in combos:
        words = [tuple(code.encoders[i][mi]) for i, mi in enumerate(m)]
        letter_rows = []
        for u in range(code.n):
            combo = tuple(wd[u] for wd in words)
            letter_rows.append((tuple(label_index[i][combo[i]] for i in range(s)),
                                mc.letter_states[combo]))
        for b, bt in enumerate(tp.block_tuples):
            mats = []
            dead = False
            for u in range(code.n):
                x_idx = bt[u * (s + 1):u * (s + 1) + s]
                if x_idx != letter_rows[u][0]:
                    dead = True
                    break
                mats.append(letter_rows[u][1].blocks[bt[u * (s + 1) + s]])
            if not dead:
                blocks[b] += weight * la.kron_list(mats)
    return DensityState(tp.algebra, blocks), tp


def converse_check(mc: MultiwayChannel, code: MultiwayCode, *, tol: float = 1e-8) -> ConverseReport:
    """Verify, per sender subset and receiver, the displayed converse chain

        (1 - eps) R(J) <= 1/n + (1/n) I(X^n(J) ^ Y_j^n X^n(J^c))
                       <= 1/n + (1/n) sum_u I_{gamma_u}(X(J) ^ Y_j X(J^c))

    on the code-induced channel state with uniformly distributed messages.
    """
    errors = code_error_probabilities(mc, code)
    eps = max(errors)
    gamma_n, tp = code_channel_state(mc, code)
    s, n = mc.num_senders, code.n
    rates = code.rates()
    per_letter = []
    from .state import partial_trace
    for u in range(n):
        legs = tuple(range(u * (s + 1), (u + 1) * (s + 1)))
        marg = partial_trace(gamma_n, tp, legs)
        sub_tp = tensor_many([tp.factors[i] for i in legs])
        per_letter.append(ChannelState(
            DensityState(sub_tp.algebra, marg.blocks), sub_tp,
            tuple(range(s)), s, receivers=mc.receivers))
    verdicts = []
    subsets = [tuple(c) for size in range(1, s + 1)
               for c in itertools.combinations(range(s), size)]
    for subset in subsets:
        r_j = sum(rates[i] for i in subset)
        comp = tuple(i for i in range(s) if i not in subset)
        for j in range(mc.num_receivers):
            sel_j = {u * (s + 1) + i: "full" for u in range(n) for i in subset}
            sel_rest = {u * (s + 1) + i: "full" for u in range(n) for i in comp}
            sel_y = {u * (s + 1) + s: mc.receivers[j] for u in range(n)}
            emb_j = leg_embedding(tp, _selector_list(tp, sel_j))
            emb_rest = leg_embedding(tp, _selector_list(tp, {**sel_rest, **sel_y}))
            i_block = mutual_info_subalg(emb_j, emb_rest, gamma_n)
            lhs = (1.0 - eps) * r_j
            mid = 1.0 / n + i_block / n
            digest = inputs_digest("converse", code, subset, j)
            verdicts.append(_verdict("converse_fano_step", lhs, mid, tol, digest,
                                     subset=subset, receiver=j))
            per_letter_sum = 0.0
            for u in range(n):
                cs = per_letter[u]
                e_j = cs.leg({i: "full" for i in subset})
                e_rest = cs.leg({**{i: "full" for i in comp},
                                 cs.output_leg: mc.receivers[j]})
                per_letter_sum += mutual_info_subalg(e_j, e_rest, cs.state)
            rhs = 1.0 / n + per_letter_sum / n
            verdicts.append(_verdict("converse_per_letter_step", mid, rhs, tol, digest,
                                     subset=subset, receiver=j))
    return ConverseReport(tuple(verdicts), eps, tuple(per_letter))


def _selector_list(tp: TensorProduct, selectors: Mapping[int, object]):
    parts = [None] * len(tp.factors)
    for pos, sel in selectors.items():
        parts[pos] = sel
    return parts


# ---------------------------------------------------------------------------
# broadcast channels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BroadcastPoint:
    """The three conjectured rate bounds of a degraded broadcast point.

    This is an evaluation of the conjectured region, not a capacity claim.
    """

    private_bound: float          # R_1
    common_plus_degraded_bound: float   # R_0 + R_2
    total_bound: float            # R_1 + R_0 + R_2
    tag: str = "conjecture"


def broadcast_region_point(q, v_kernel, w: CqChannel, phi: KrausMap) -> BroadcastPoint:
    """Evaluate the conjectured degraded-broadcast bounds for an auxiliary
    distribution Q and a classical kernel V from the auxiliary set to the
    channel inputs."""
    v = np.asarray(v_kernel, dtype=float)
    if v.ndim != 2 or v.shape[1] != len(w.input_labels):
        raise ValidationError("kernel must be |U| x |inputs|")
    if np.any(v < -1e-12) or np.max(np.abs(v.sum(axis=1) - 1.0)) > 1e-9:
        raise ValidationError("kernel rows must be probability distributions")
    q_arr = _as_distribution(q, tuple(range(v.shape[0])))
    degraded = degrade_channel(w, phi)
    private = float(sum(q_arr[u] * mutual_information_pw(v[u], w) for u in range(v.shape[0])))
    # the channel u -> phi_*(W(V(.|u)))
    mixed_letters = []
    for u in range(v.shape[0]):
        blocks = [np.zeros((d, d), dtype=np.complex128) for d in degraded.output_algebra.block_dims]
        for xi, wx in enumerate(degraded.letter_states):
            for i, b in enumerate(wx.blocks):
                blocks[i] += v[u, xi] * b
        mixed_letters.append(DensityState(degraded.output_algebra, blocks))
    through = CqChannel(tuple(range(v.shape[0])), degraded.output_algebra, mixed_letters)
    common = mutual_information_pw(q_arr, through)
    qv = q_arr @ v
    total = mutual_information_pw(qv, w)
    return BroadcastPoint(private, common, total)


class BroadcastCode:
    """Encoder plus receiver-1 operation elements and a receiver-2 observable."""

    __slots__ = ("n", "message_sets", "encoder", "e_operators", "d2")

    def __init__(self, n: int, message_sets, encoder, e_operators, d2: Povm):
        message_sets = tuple(tuple(m) for m in message_sets)
        if len(message_sets) != 3:
            raise ValidationError("need message sets (common, first, second)")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "message_sets", message_sets)
        object.__setattr__(self, "encoder", dict(encoder))
        object.__setattr__(self, "e_operators", dict(e_operators))
        object.__setattr__(self, "d2", d2)

    def __setattr__(self, name, value):
        raise AttributeError("BroadcastCode is immutable")


def broadcast_code_error(w: CqChannel, phi: KrausMap, code: BroadcastCode,
                         *, tol: float = 1e-8) -> tuple[float, float, Povm]:
    """Exact maximum and average error of a degraded-broadcast code.

    Success on a message triple is Tr(E* W E phi^(x)n(D_2)); the operators
    E_{m0 m1} must induce a valid observable D_1 = E E*, which is returned
    for inspection.
    """
    m0s, m1s, m2s = code.message_sets
    power = tensor_many([w.output_algebra] * code.n)
    d1_effects = []
    d1_outcomes = []
    total = power.algebra.zero()
    es = {}
    for m0 in m0s:
        for m1 in m1s:
            e = code.e_operators[(m0, m1)]
            if e.algebra != power.algebra:
                raise ValidationError("E operators must live on the n-fold output algebra")
            es[(m0, m1)] = e
            eff = e @ e.adjoint()
            d1_effects.append(eff.herm_part())
            d1_outcomes.append((m0, m1))
            total = total + eff
    if (total - power.algebra.identity()).norm() > 1e-8:
        raise ValidationError("E operators do not induce an observable: sum E E* != 1")
    d1 = Povm(power.algebra, d1_outcomes, d1_effects)
    phi_n = tensor_power_map(phi, code.n)
    if code.d2.algebra != phi_n.source:
        raise ValidationError("second decoder must live on the n-fold degraded algebra")
    worst = 0.0
    total_err = 0.0
    count = 0
    from .state import product_state
    for m0 in m0s:
        for m1 in m1s:
            e = es[(m0, m1)]
            for m2 in m2s:
                word = tuple(code.encoder[(m0, m1, m2)])
                if len(word) != code.n:
                    raise ValidationError("codewords must have the block length")
                state = product_state(power, [w.letter(x) for x in word])
                lifted = phi_n.apply(code.d2.effect((m0, m2)))
                inner = e.adjoint() @ state.to_element() @ e @ lifted
                success = float(np.real(inner.trace()))
                err = 1.0 - success
                worst = max(worst, err)
                total_err += err
                count += 1
    return worst, total_err / count, d1
