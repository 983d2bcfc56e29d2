"""The repository-wide JSON document format.

Every persisted object is wrapped as ``{"schema_version": 1, "kind": ...,
"payload": ...}``.  Complex scalars are two-element ``[re, im]`` arrays,
matrices are row-major nested arrays of those pairs, and outcome labels may
be any JSON scalar or (nested) array; arrays decode back to tuples.  Unknown
kinds are rejected with a versioned error.  Infinite divergences serialize
as the string ``"inf"``, never as a floating-point infinity.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .algebra import AlgebraElement, BlockAlgebra, SubalgebraEmbedding, tensor_many
from .channels import (
    BroadcastPoint,
    ChannelState,
    CqChannel,
    MultiwayChannel,
    MultiwayCode,
    RegionResult,
)
from .errors import DocumentError, ValidationError
from .infotheory import EntropyReport
from .inequalities import InequalityVerdict
from .observable import OutcomeDistribution, Povm
from .operation import KrausMap
from .state import DensityState, Spectrum

SCHEMA_VERSION = 1

KINDS = (
    "algebra", "element", "state", "spectrum", "embedding", "povm", "kraus_map",
    "distribution", "channel", "multiway", "code", "verdicts", "region",
)


def document(kind: str, payload: dict) -> dict:
    if kind not in KINDS:
        raise DocumentError(f"unknown document kind {kind!r} (schema {SCHEMA_VERSION}); "
                            f"known kinds: {', '.join(KINDS)}")
    return {"schema_version": SCHEMA_VERSION, "kind": kind, "payload": payload}


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def loads(text: str) -> dict:
    doc = json.loads(text)
    if not isinstance(doc, dict) or "kind" not in doc or "payload" not in doc:
        raise DocumentError("not a document: expected schema_version/kind/payload")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise DocumentError(f"unsupported schema_version {doc.get('schema_version')!r}; "
                            f"this build reads version {SCHEMA_VERSION}")
    if doc["kind"] not in KINDS:
        raise DocumentError(f"unknown document kind {doc['kind']!r} (schema {SCHEMA_VERSION}); "
                            f"known kinds: {', '.join(KINDS)}")
    return doc


# ---------------------------------------------------------------------------
# scalars, matrices, labels
# ---------------------------------------------------------------------------

def encode_matrix(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def decode_matrix(rows) -> np.ndarray:
    try:
        return np.array([[complex(c[0], c[1]) for c in row] for row in rows],
                        dtype=np.complex128)
    except (TypeError, IndexError) as exc:
        raise DocumentError(f"malformed matrix: {exc}") from None


def encode_label(label):
    if isinstance(label, tuple):
        return [encode_label(x) for x in label]
    if isinstance(label, (str, bool)) or label is None:
        return label
    if isinstance(label, (int, np.integer)):
        return int(label)
    if isinstance(label, (float, np.floating)):
        return float(label)
    raise DocumentError(f"label {label!r} is not serializable")


def decode_label(obj):
    if isinstance(obj, list):
        return tuple(decode_label(x) for x in obj)
    return obj


def _finite(x: float):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


# ---------------------------------------------------------------------------
# per-kind payloads
# ---------------------------------------------------------------------------

def encode_algebra(a: BlockAlgebra) -> dict:
    return {"block_dims": list(a.block_dims),
            "labels": None if a.labels is None else [encode_label(x) for x in a.labels]}


def decode_algebra(p: dict) -> BlockAlgebra:
    labels = p.get("labels")
    return BlockAlgebra(tuple(p["block_dims"]),
                        labels=None if labels is None else tuple(decode_label(x) for x in labels))


def encode_element(e: AlgebraElement) -> dict:
    return {"algebra": encode_algebra(e.algebra),
            "blocks": [encode_matrix(b) for b in e.blocks]}


def decode_element(p: dict) -> AlgebraElement:
    return AlgebraElement(decode_algebra(p["algebra"]),
                          [decode_matrix(b) for b in p["blocks"]])


def encode_state(s: DensityState, factors=None) -> dict:
    out = {"algebra": encode_algebra(s.algebra),
           "blocks": [encode_matrix(b) for b in s.blocks]}
    if factors is not None:
        out["factors"] = [encode_algebra(f) for f in factors]
    return out


def decode_state(p: dict) -> DensityState:
    state = DensityState(decode_algebra(p["algebra"]), [decode_matrix(b) for b in p["blocks"]])
    if p.get("factors"):
        factors = [decode_algebra(f) for f in p["factors"]]
        if tensor_many(factors).algebra.block_dims != state.algebra.block_dims:
            raise DocumentError("declared tensor factors do not match the state's algebra")
    return state


def state_factors(p: dict):
    if not p.get("factors"):
        return None
    return [decode_algebra(f) for f in p["factors"]]


def encode_spectrum(sp: Spectrum) -> dict:
    return {"eigenvalues": [float(x) for x in sp.eigenvalues],
            "projectors": [encode_state(pr) for pr in sp.projectors]}


def decode_spectrum(p: dict) -> Spectrum:
    return Spectrum(tuple(float(x) for x in p["eigenvalues"]),
                    tuple(decode_state(x) for x in p["projectors"]))


def encode_embedding(e: SubalgebraEmbedding) -> dict:
    units = []
    for (i, k, l), img in zip(e.domain.unit_triples(), e.unit_images):
        units.append({"block": i, "row": k, "col": l,
                      "image": [encode_matrix(b) for b in img.blocks]})
    return {"domain": encode_algebra(e.domain), "parent": encode_algebra(e.parent),
            "units": units}


def decode_embedding(p: dict) -> SubalgebraEmbedding:
    domain = decode_algebra(p["domain"])
    parent = decode_algebra(p["parent"])
    by_index = {}
    for u in p["units"]:
        idx = domain.unit_index(int(u["block"]), int(u["row"]), int(u["col"]))
        by_index[idx] = AlgebraElement(parent, [decode_matrix(b) for b in u["image"]])
    if sorted(by_index) != list(range(domain.element_dim)):
        raise DocumentError("embedding document does not cover every matrix unit")
    return SubalgebraEmbedding(domain, parent, [by_index[i] for i in range(domain.element_dim)])


def encode_povm(x: Povm) -> dict:
    return {"algebra": encode_algebra(x.algebra),
            "outcomes": [encode_label(o) for o in x.outcomes],
            "effects": [[encode_matrix(b) for b in e.blocks] for e in x.effects]}


def decode_povm(p: dict) -> Povm:
    algebra = decode_algebra(p["algebra"])
    effects = [AlgebraElement(algebra, [decode_matrix(b) for b in blocks])
               for blocks in p["effects"]]
    return Povm(algebra, [decode_label(o) for o in p["outcomes"]], effects)


def encode_kraus_map(m: KrausMap) -> dict:
    return {"source": encode_algebra(m.source), "target": encode_algebra(m.target),
            "kraus": [encode_matrix(v) for v in m.kraus],
            "flags": {"trace_preserving": m.trace_preserving,
                      "trace_nonincreasing": m.trace_nonincreasing}}


def decode_kraus_map(p: dict) -> KrausMap:
    return KrausMap(decode_algebra(p["source"]), decode_algebra(p["target"]),
                    [decode_matrix(v) for v in p["kraus"]])


def encode_distribution(d: OutcomeDistribution) -> dict:
    return {"outcomes": [encode_label(o) for o in d.outcomes],
            "probabilities": [float(x) for x in d.probabilities]}


def decode_distribution(p: dict) -> OutcomeDistribution:
    return OutcomeDistribution(tuple(decode_label(o) for o in p["outcomes"]),
                               tuple(float(x) for x in p["probabilities"]))


def encode_channel(w: CqChannel) -> dict:
    return {"input_labels": [encode_label(x) for x in w.input_labels],
            "output_algebra": encode_algebra(w.output_algebra),
            "letter_states": [[encode_label(x), [encode_matrix(b) for b in s.blocks]]
                              for x, s in zip(w.input_labels, w.letter_states)]}


def decode_channel(p: dict) -> CqChannel:
    out = decode_algebra(p["output_algebra"])
    labels = [decode_label(x) for x in p["input_labels"]]
    by_label = {decode_label(x): DensityState(out, [decode_matrix(b) for b in blocks])
                for x, blocks in p["letter_states"]}
    return CqChannel(labels, out, [by_label[x] for x in labels])


def encode_multiway(mc: MultiwayChannel) -> dict:
    combos = sorted(mc.letter_states.keys(), key=repr)
    return {"sender_alphabets": [[encode_label(x) for x in a] for a in mc.sender_alphabets],
            "output_algebra": encode_algebra(mc.output_algebra),
            "letter_states": [[[encode_label(x) for x in combo],
                               [encode_matrix(b) for b in mc.letter_states[combo].blocks]]
                              for combo in combos],
            "receivers": [encode_embedding(r) for r in mc.receivers]}


def decode_multiway(p: dict) -> MultiwayChannel:
    out = decode_algebra(p["output_algebra"])
    letters = {}
    for combo, blocks in p["letter_states"]:
        letters[tuple(decode_label(x) for x in combo)] = DensityState(
            out, [decode_matrix(b) for b in blocks])
    return MultiwayChannel([[decode_label(x) for x in a] for a in p["sender_alphabets"]],
                           out, letters, [decode_embedding(r) for r in p["receivers"]])


def encode_code(c: MultiwayCode) -> dict:
    return {"n": c.n,
            "message_sets": [[encode_label(m) for m in ms] for ms in c.message_sets],
            "encoders": [[[encode_label(m), [encode_label(x) for x in word]]
                          for m, word in sorted(enc.items(), key=lambda kv: repr(kv[0]))]
                         for enc in c.encoders],
            "decoders": [encode_povm(d) for d in c.decoders]}


def decode_code(p: dict) -> MultiwayCode:
    encoders = []
    for enc in p["encoders"]:
        encoders.append({decode_label(m): tuple(decode_label(x) for x in word)
                         for m, word in enc})
    return MultiwayCode(int(p["n"]),
                        [[decode_label(m) for m in ms] for ms in p["message_sets"]],
                        encoders, [decode_povm(d) for d in p["decoders"]])


def encode_verdicts(verdicts) -> dict:
    records = []
    for v in verdicts:
        records.append(v.to_record() if isinstance(v, InequalityVerdict) else dict(v))
    return {"verdicts": records}


def decode_verdicts(p: dict) -> list:
    return [dict(r) for r in p["verdicts"]]


def encode_region(r: RegionResult) -> dict:
    def key(subset, j=None):
        out = {"senders": list(subset)}
        if j is not None:
            out["receiver"] = j
        return out
    samples = []
    for s in r.samples:
        samples.append({
            "components": [{"weight": c.weight,
                            "input_dists": json.loads(json.dumps(c.input_dists))}
                           for c in s.components],
            "table": [[key(sub, j), float(v)] for (sub, j), v in sorted(s.table.items())],
        })
    return {"samples": samples,
            "constraint_max": [[key(sub, j), float(v)]
                               for (sub, j), v in sorted(r.constraint_max.items())],
            "sum_rate_outer": [[key(sub), float(v)]
                               for sub, v in sorted(r.sum_rate_outer.items())]}


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

_ENCODERS = {
    BlockAlgebra: ("algebra", encode_algebra),
    AlgebraElement: ("element", encode_element),
    DensityState: ("state", encode_state),
    Spectrum: ("spectrum", encode_spectrum),
    SubalgebraEmbedding: ("embedding", encode_embedding),
    Povm: ("povm", encode_povm),
    KrausMap: ("kraus_map", encode_kraus_map),
    OutcomeDistribution: ("distribution", encode_distribution),
    CqChannel: ("channel", encode_channel),
    MultiwayChannel: ("multiway", encode_multiway),
    MultiwayCode: ("code", encode_code),
    RegionResult: ("region", encode_region),
}

_DECODERS = {
    "algebra": decode_algebra,
    "element": decode_element,
    "state": decode_state,
    "spectrum": decode_spectrum,
    "embedding": decode_embedding,
    "povm": decode_povm,
    "kraus_map": decode_kraus_map,
    "distribution": decode_distribution,
    "channel": decode_channel,
    "multiway": decode_multiway,
    "code": decode_code,
    "verdicts": decode_verdicts,
}


def to_document(obj) -> dict:
    for cls, (kind, enc) in _ENCODERS.items():
        if isinstance(obj, cls):
            return document(kind, enc(obj))
    if isinstance(obj, (list, tuple)) and all(isinstance(v, InequalityVerdict) for v in obj):
        return document("verdicts", encode_verdicts(obj))
    raise DocumentError(f"no document encoding for {type(obj).__name__}")


def from_document(doc: dict):
    doc = doc if isinstance(doc, dict) else loads(doc)
    kind = doc.get("kind")
    if kind not in _DECODERS:
        raise DocumentError(f"unknown document kind {kind!r} (schema {SCHEMA_VERSION})")
    try:
        return _DECODERS[kind](doc["payload"])
    except (KeyError, TypeError) as exc:
        raise DocumentError(f"malformed {kind} payload: {exc}") from None


def read_document(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


def write_document(path: str, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(doc))
        fh.write("\n")
