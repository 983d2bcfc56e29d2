"""Batch command-line front end.

Subcommands: entropy, check, example, region, measure, channel-state,
code-error, broadcast-point.  Every command is deterministic given its flags
and seed; JSON payloads are byte-identical across identical invocations.
Exit codes: 0 success, 1 inequality violation, 2 input or validation error.
The only environment variable consulted is QICALC_THREADS (fuzzing fan-out).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import serialize as ser
from ._digest import inputs_digest
from .algebra import tensor_many, trivial_embedding
from .channels import (
    MultiwayChannel,
    RegionSamplerConfig,
    binary_entropy,
    broadcast_code_error,
    broadcast_region_point,
    build_channel_state,
    build_three_stage,
    code_error_probabilities,
    example_counterexample_table,
    outer_bound_region,
)
from .errors import DocumentError, ValidationError
from .inequalities import (
    REGISTRY,
    check_klein,
    check_info_upper_bound,
    check_monotonicity,
    check_pure_common_state,
    check_subadditivity,
    check_triangle,
    run_random_suite,
    summarize,
)
from .algebra import leg_embedding, require_compatible
from .infotheory import (
    cond_mutual_info_obs,
    cond_mutual_info_op,
    cond_mutual_info_subalg,
    conditional_entropy_obs,
    conditional_entropy_op,
    conditional_entropy_subalg,
    entropy_of_observable,
    entropy_of_operation,
    entropy_of_subalgebra,
    mutual_info_obs,
    mutual_info_op,
    mutual_info_subalg,
    report,
)
from .observable import measure
from .serialize import from_document, read_document


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, DocumentError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qicalc",
                                     description="entropy and channel calculus over "
                                                 "finite-dimensional operator algebras")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="information quantities of stored objects")
    p.add_argument("--state", required=True, help="state document")
    p.add_argument("--language", choices=("obs", "alg", "op"), required=True)
    p.add_argument("--quantity", choices=("H", "Hcond", "I", "Icond"), required=True)
    p.add_argument("objects", nargs="+", help="povm / embedding / kraus_map documents")
    p.add_argument("--output")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("check", help="run an inequality checker")
    p.add_argument("--theorem", required=True)
    p.add_argument("--random", type=int, default=None, metavar="N")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("files", nargs="*", help="input documents (file mode)")
    p.add_argument("--output", help="write the verdict stream to a file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("example", help="reproduce the binary-channel double-use table")
    p.add_argument("--output")
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("region", help="sample the multiway capacity outer bound")
    p.add_argument("multiway", help="multiway channel document")
    p.add_argument("--samples", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("product", "joint"), default="product")
    p.add_argument("--mixture", type=int, default=3)
    p.add_argument("--output")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("measure", help="outcome distribution of an observable")
    p.add_argument("--povm", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("channel-state", help="build the channel state gamma")
    p.add_argument("--channel", required=True)
    p.add_argument("--dist", required=True, help="distribution document")
    p.add_argument("--detect", help="kraus_map document for a three-stage state")
    p.add_argument("--output")
    p.set_defaults(func=cmd_channel_state)

    p = sub.add_parser("code-error", help="average error probabilities of a code")
    p.add_argument("--multiway", required=True)
    p.add_argument("--code", required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_code_error)

    p = sub.add_parser("broadcast-point", help="conjectured degraded-broadcast bounds")
    p.add_argument("--q", required=True, help="distribution document on the auxiliary set")
    p.add_argument("--kernel", required=True, help="plain JSON stochastic matrix |U| x |X|")
    p.add_argument("--channel", required=True)
    p.add_argument("--degrade", required=True, help="kraus_map document")
    p.add_argument("--output")
    p.set_defaults(func=cmd_broadcast_point)
    return parser


def _emit(args, payload: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(payload)
            if not payload.endswith("\n"):
                fh.write("\n")
    else:
        print(payload)


def _load(path: str):
    return from_document(read_document(path))


# ---------------------------------------------------------------------------
# entropy
# ---------------------------------------------------------------------------

_ARITY = {"H": 1, "Hcond": 2, "I": 2, "Icond": 3}

_DISPATCH = {
    ("obs", "H"): lambda o, rho: entropy_of_observable(o[0], rho),
    ("obs", "Hcond"): lambda o, rho: conditional_entropy_obs(o[0], o[1], rho),
    ("obs", "I"): lambda o, rho: mutual_info_obs(o[0], o[1], rho),
    ("obs", "Icond"): lambda o, rho: cond_mutual_info_obs(o[0], o[1], o[2], rho),
    ("alg", "H"): lambda o, rho: entropy_of_subalgebra(o[0], rho),
    ("alg", "Hcond"): lambda o, rho: conditional_entropy_subalg(o[0], o[1], rho),
    ("alg", "I"): lambda o, rho: mutual_info_subalg(o[0], o[1], rho),
    ("alg", "Icond"): lambda o, rho: cond_mutual_info_subalg(o[0], o[1], o[2], rho),
    ("op", "H"): lambda o, rho: entropy_of_operation(o[0], rho),
    ("op", "Hcond"): lambda o, rho: conditional_entropy_op(o[0], o[1], rho),
    ("op", "I"): lambda o, rho: mutual_info_op(o[0], o[1], rho),
    ("op", "Icond"): lambda o, rho: cond_mutual_info_op(o[0], o[1], o[2], rho),
}


def cmd_entropy(args) -> int:
    rho = _load(args.state)
    objects = [_load(path) for path in args.objects]
    needed = _ARITY[args.quantity]
    if len(objects) != needed:
        raise ValidationError(f"{args.quantity} needs {needed} object(s), got {len(objects)}")
    value = _DISPATCH[(args.language, args.quantity)](objects, rho)
    rec = report(args.quantity, args.language, value, rho, *objects).to_record()
    _emit(args, json.dumps(rec, sort_keys=True))
    print(f"{args.quantity}[{args.language}] = {value:+.9f} bits")
    return 0


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

def _file_mode_verdicts(theorem, files, tol):
    objs = [_load(f) for f in files]
    payloads = [read_document(f)["payload"] for f in files]
    if theorem == "klein":
        if len(objs) != 2:
            raise ValidationError("klein file mode needs two state documents")
        return [check_klein(objs[0], objs[1], tol=tol)]
    if theorem == "monotonicity":
        if len(objs) != 3:
            raise ValidationError("monotonicity file mode needs state, state, kraus_map")
        return [check_monotonicity(objs[0], objs[1], objs[2], tol=tol)]
    if theorem in ("ssa", "triangle", "pure_common_state", "info_upper_bound"):
        if len(objs) != 1:
            raise ValidationError(f"{theorem} file mode needs one state document "
                                  "carrying tensor factors")
        factors = ser.state_factors(payloads[0])
        if not factors or len(factors) < 2:
            raise ValidationError("the state document must declare at least two tensor factors")
        tp = tensor_many(factors)
        rho = type(objs[0])(tp.algebra, objs[0].blocks)
        legs = []
        for i in range(len(factors)):
            parts = [None] * len(factors)
            parts[i] = "full"
            legs.append(leg_embedding(tp, parts))
        if theorem == "ssa":
            if len(legs) >= 3:
                return [check_subadditivity(legs[0], legs[1], legs[2], rho, tol=tol)]
            return [check_subadditivity(legs[0], legs[1], None, rho, tol=tol)]
        pair = require_compatible(legs[0], legs[1])
        if theorem == "triangle":
            return [check_triangle(pair, rho, tol=tol)]
        if theorem == "pure_common_state":
            return [check_pure_common_state(pair, rho, tol=tol)]
        return [check_info_upper_bound(pair, rho, tol=tol)]
    raise ValidationError(f"theorem {theorem!r} supports --random mode only")


def cmd_check(args) -> int:
    if args.theorem not in REGISTRY:
        raise ValidationError(f"unknown theorem {args.theorem!r}; registered: "
                              f"{', '.join(sorted(REGISTRY))}")
    if args.random is not None:
        verdicts = run_random_suite(args.theorem, args.random, seed=args.seed)
    else:
        if not args.files:
            raise ValidationError("provide input documents or --random N")
        verdicts = _file_mode_verdicts(args.theorem, args.files, args.tol)
    stream = "\n".join(json.dumps(v.to_record(), sort_keys=True) for v in verdicts)
    _emit(args, stream)
    print()
    print(f"{'checker':32s} {'count':>6s} {'min slack':>13s} {'failures':>9s} {'skipped':>8s}")
    for row in summarize(verdicts):
        print(f"{row.name:32s} {row.count:6d} {row.min_slack_bits:13.3e} "
              f"{row.failures:9d} {row.skipped:8d}")
    conjecture = REGISTRY[args.theorem].conjecture
    failed = sum(1 for v in verdicts if v.passed is False and v.status == "ok")
    return 0 if conjecture or failed == 0 else 1


# ---------------------------------------------------------------------------
# example
# ---------------------------------------------------------------------------

def cmd_example(args) -> int:
    table = example_counterexample_table()
    rows = [
        ("cloning", table.cloning),
        ("measuring", table.measuring),
    ]
    payload = {}
    worst = 0.0
    for name, sc in rows:
        payload[name] = {
            "cond_entropy_given_output": sc.cond_entropy_given_output,
            "cond_entropy_given_both": sc.cond_entropy_given_both,
            "cond_mutual_info": sc.cond_mutual_info,
            "closed_form_given_output": sc.closed_form_given_output,
            "closed_form_given_both": sc.closed_form_given_both,
        }
        worst = max(worst,
                    abs(sc.cond_entropy_given_output - sc.closed_form_given_output),
                    abs(sc.cond_entropy_given_both - sc.closed_form_given_both))
    _emit(args, json.dumps(payload, sort_keys=True))
    print(f"{'scenario':12s} {'H(X|Y)':>10s} {'H(X|YZ)':>10s} {'closed Y':>10s} {'closed YZ':>10s}")
    for name, sc in rows:
        print(f"{name:12s} {sc.cond_entropy_given_output:10.6f} "
              f"{sc.cond_entropy_given_both:10.6f} {sc.closed_form_given_output:10.6f} "
              f"{sc.closed_form_given_both:10.6f}")
    print(f"largest deviation from closed forms: {worst:.3e}")
    return 0 if worst <= 1e-6 else 1


# ---------------------------------------------------------------------------
# region / measure / channel-state / code-error / broadcast-point
# ---------------------------------------------------------------------------

def cmd_region(args) -> int:
    mc = _load(args.multiway)
    config = RegionSamplerConfig(mode=args.mode, num_samples=args.samples,
                                 mixture_size=args.mixture, seed=args.seed)
    result = outer_bound_region(mc, config)
    doc = ser.document("region", ser.encode_region(result))
    _emit(args, ser.dumps(doc))
    print(f"{'senders':>12s} {'receiver':>9s} {'bound (bits)':>13s}")
    for (subset, j), v in sorted(result.constraint_max.items()):
        print(f"{str(list(subset)):>12s} {j:9d} {v:13.6f}")
    for subset, v in sorted(result.sum_rate_outer.items()):
        print(f"sum-rate outer bound for senders {list(subset)}: {v:.6f}")
    return 0


def cmd_measure(args) -> int:
    povm = _load(args.povm)
    rho = _load(args.state)
    dist = measure(povm, rho)
    doc = ser.document("distribution", ser.encode_distribution(dist))
    _emit(args, ser.dumps(doc))
    for label, p in zip(dist.outcomes, dist.probabilities):
        print(f"P({label!r}) = {p:.9f}")
    return 0


def cmd_channel_state(args) -> int:
    channel = _load(args.channel)
    dist = _load(args.dist)
    probs = dict(zip(dist.outcomes, dist.probabilities))
    if args.detect:
        phi = _load(args.detect)
        cs = build_three_stage(probs, channel, phi)
    else:
        cs = build_channel_state(probs, channel)
    doc = ser.document("state", ser.encode_state(cs.state, factors=cs.structure.factors))
    _emit(args, ser.dumps(doc))
    print(f"channel state on blocks {cs.state.algebra.block_dims}; "
          f"sender legs {cs.sender_legs}, output leg {cs.output_leg}"
          + (f", detection leg {cs.extra_leg}" if cs.extra_leg is not None else ""))
    return 0


def cmd_code_error(args) -> int:
    mc = _load(args.multiway)
    code = _load(args.code)
    errors = code_error_probabilities(mc, code)
    payload = {"average_errors": list(errors),
               "rates": list(code.rates()),
               "inputs_digest": inputs_digest(mc, code)}
    _emit(args, json.dumps(payload, sort_keys=True))
    for j, e in enumerate(errors):
        print(f"receiver {j}: average error {e:.9f}")
    return 0


def cmd_broadcast_point(args) -> int:
    q = _load(args.q)
    with open(args.kernel, "r", encoding="utf-8") as fh:
        kernel = json.load(fh)
    channel = _load(args.channel)
    phi = _load(args.degrade)
    point = broadcast_region_point(list(q.probabilities), kernel, channel, phi)
    payload = {"tag": point.tag,
               "private_bound": point.private_bound,
               "common_plus_degraded_bound": point.common_plus_degraded_bound,
               "total_bound": point.total_bound}
    _emit(args, json.dumps(payload, sort_keys=True))
    print(f"[{point.tag}] R1 <= {point.private_bound:.6f}, "
          f"R0+R2 <= {point.common_plus_degraded_bound:.6f}, "
          f"R1+R0+R2 <= {point.total_bound:.6f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
