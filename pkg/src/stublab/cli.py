"""Batch command-line surface: one library pipeline per invocation.

Every subcommand prints a JSON report on stdout (deterministic byte-for-byte
for identical invocations) and signals its outcome through the exit code:

  0  every checked property holds (bounded verdicts included)
  1  a property fails; the report carries a replayable witness
  2  usage or input error
  3  a cap or enumeration limit was exceeded (inconclusive)
"""

from __future__ import annotations

import argparse
import json
import sys

from . import models
from .lsts import Lsts, lsts_from_json, lsts_to_json, validate_lsts
from .oracle import (
    EnumLimits,
    LimitsExceeded,
    check_consistent_labelling,
    check_deadlock_preservation,
    check_reachable_labellings,
    check_stutter_trace_equivalence,
    check_weak_trace_equivalence,
)
from .petri import CapExceeded, build_lsts_report, net_from_json, net_to_json
from .props import AtomicProp, InvisibilityFlags, classify_invisibility
from .stubborn import (
    ReductionFunction,
    check_condition,
    check_L,
    explore_with_por,
    reduce,
    subgraph_view,
)
from .verdict import Verdict

EXIT_OK = 0
EXIT_FAILS = 1
EXIT_USAGE = 2
EXIT_LIMITS = 3


def _load(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_props(path) -> list[AtomicProp]:
    doc = _load(path)
    if isinstance(doc, dict):
        doc = doc.get("props", [doc])
    return [AtomicProp.from_json(p) for p in doc]


def _emit(doc: dict) -> None:
    print(json.dumps(doc, indent=2, sort_keys=True))


def _verdict_exit(v: Verdict) -> int:
    return EXIT_OK if v.ok else EXIT_FAILS


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stublab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("net-to-lsts", help="build the reachable LSTS of a net")
    p.add_argument("--net", required=True)
    p.add_argument("--props")
    p.add_argument("--invisibility", default="plain")
    p.add_argument("--state-cap", type=int, default=10000)
    p.add_argument("--box", type=int, default=6)

    p = sub.add_parser("classify", help="decide one invisibility notion for one transition")
    p.add_argument("--net", required=True)
    p.add_argument("--props", required=True)
    p.add_argument("--prop", required=True)
    p.add_argument("--transition", required=True)
    p.add_argument("--invisibility", default="plain")
    p.add_argument("--box", type=int, default=6)
    p.add_argument("--state-cap", type=int, default=10000)

    p = sub.add_parser("check", help="run side-condition checkers at one state")
    p.add_argument("--lsts", required=True)
    p.add_argument("--r", required=True)
    p.add_argument("--conds", required=True)
    p.add_argument("--state", type=int, required=True)
    p.add_argument("--bound", type=int, default=None)

    p = sub.add_parser("check-l", help="check the cycle condition of a reduction")
    p.add_argument("--lsts", required=True)
    p.add_argument("--r", required=True)

    p = sub.add_parser("reduce", help="build the reduced LSTS of a reduction function")
    p.add_argument("--lsts", required=True)
    p.add_argument("--r", required=True)

    p = sub.add_parser("explore", help="reduced exploration of a net with stubborn sets")
    p.add_argument("--net", required=True)
    p.add_argument("--props")
    p.add_argument("--invisibility", default="plain")
    p.add_argument("--mode", default="ltl_weak", choices=("deadlock", "ltl_weak", "ltl_strong"))
    p.add_argument("--state-cap", type=int, default=10000)
    p.add_argument("--box", type=int, default=6)

    p = sub.add_parser("compare", help="equivalence oracles between a full and a reduced LSTS")
    p.add_argument("--full", required=True)
    p.add_argument("--reduced", required=True)
    p.add_argument("--mode", required=True, choices=("stutter", "weak", "deadlock", "labels"))
    p.add_argument("--repeat", type=int, default=2)
    p.add_argument("--count", type=int, default=100000)

    p = sub.add_parser("consistent", help="weak equivalence must imply stutter equivalence")
    p.add_argument("--lsts", required=True)
    p.add_argument("--proj", help="comma-joined action names; defaults to the declared invisible set")
    p.add_argument("--repeat", type=int, default=2)
    p.add_argument("--count", type=int, default=100000)

    sub.add_parser("suite", help="run every bundled-model expectation")

    p = sub.add_parser("gen", help="emit a seeded random artifact")
    p.add_argument("--kind", required=True, choices=("lsts", "pn"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--states", type=int, default=8)
    p.add_argument("--actions", type=int, default=4)
    p.add_argument("--props", type=int, default=2)
    p.add_argument("--places", type=int, default=6)
    p.add_argument("--transitions", type=int, default=5)
    p.add_argument("--token-bound", type=int, default=3)
    return ap


def _cmd_net_to_lsts(args) -> int:
    net = net_from_json(_load(args.net))
    props = _load_props(args.props) if args.props else []
    flags = InvisibilityFlags.parse(args.invisibility)
    lsts, warnings = build_lsts_report(net, props, flags, args.state_cap, args.box)
    _emit({"lsts": lsts_to_json(lsts), "warnings": warnings})
    return EXIT_OK


def _cmd_classify(args) -> int:
    net = net_from_json(_load(args.net))
    props = {q.name: q for q in _load_props(args.props)}
    if args.prop not in props:
        raise ValueError(f"unknown proposition {args.prop!r}")
    if args.transition not in net.transition_names:
        raise ValueError(f"unknown transition {args.transition!r}")
    t = net.transition_names.index(args.transition)
    flags = InvisibilityFlags.parse(args.invisibility)
    v = classify_invisibility(net, props[args.prop], t, flags, args.box, args.state_cap)
    _emit({
        "transition": args.transition,
        "prop": args.prop,
        "invisibility": flags.label(),
        "verdict": v.to_json(),
    })
    return _verdict_exit(v)


def _cmd_check(args) -> int:
    ts = lsts_from_json(_load(args.lsts))
    rf = ReductionFunction.from_json(_load(args.r))
    conds = [c.strip() for c in args.conds.split(",") if c.strip()]
    rset = rf.resolve(ts, args.state)
    verdicts = {}
    for cond in conds:
        verdicts[cond] = check_condition(ts, args.state, rset, cond, args.bound)
    _emit({
        "state": args.state,
        "rset": sorted(rset),
        "verdicts": {c: v.to_json() for c, v in verdicts.items()},
    })
    return EXIT_OK if all(v.ok for v in verdicts.values()) else EXIT_FAILS


def _cmd_check_l(args) -> int:
    ts = lsts_from_json(_load(args.lsts))
    rf = ReductionFunction.from_json(_load(args.r))
    red = reduce(ts, rf)
    v = check_L(red)
    _emit({"reduced_states": len(red.states), "verdict": v.to_json()})
    return _verdict_exit(v)


def _cmd_reduce(args) -> int:
    ts = lsts_from_json(_load(args.lsts))
    rf = ReductionFunction.from_json(_load(args.r))
    red = reduce(ts, rf)
    _emit({
        "reduced": lsts_to_json(red.to_lsts()),
        "kept_states": len(red.states),
        "dropped_states": ts.n_states - len(red.states),
        "dropped_transitions": len(ts.transitions) - len(red.transitions),
        "r_table": {str(s): list(a) for s, a in sorted(red.r_table.items())},
    })
    return EXIT_OK


def _cmd_explore(args) -> int:
    net = net_from_json(_load(args.net))
    props = _load_props(args.props) if args.props else []
    flags = InvisibilityFlags.parse(args.invisibility)
    red = explore_with_por(net, props, flags, args.mode, args.state_cap, args.box)
    _emit({
        "mode": args.mode,
        "full_states": red.parent.n_states,
        "reduced_states": len(red.states),
        "full_transitions": len(red.parent.transitions),
        "reduced_transitions": len(red.transitions),
        "reduced": lsts_to_json(red.to_lsts()),
        "r_table": {str(s): list(a) for s, a in sorted(red.r_table.items())},
    })
    return EXIT_OK


def _cmd_compare(args) -> int:
    full = lsts_from_json(_load(args.full))
    sub = lsts_from_json(_load(args.reduced))
    red = subgraph_view(full, sub)
    limits = EnumLimits(args.repeat, args.count)
    if args.mode == "stutter":
        v = check_stutter_trace_equivalence(full, red, limits)
    elif args.mode == "weak":
        v = check_weak_trace_equivalence(full, red, None, limits)
    elif args.mode == "deadlock":
        v = check_deadlock_preservation(full, red, limits)
    else:
        v = check_reachable_labellings(full, red)
    _emit({"mode": args.mode, "verdict": v.to_json()})
    return _verdict_exit(v)


def _cmd_consistent(args) -> int:
    ts = lsts_from_json(_load(args.lsts))
    proj = None
    if args.proj:
        proj = ts.action_ids([x.strip() for x in args.proj.split(",") if x.strip()])
    v = check_consistent_labelling(ts, proj, EnumLimits(args.repeat, args.count))
    _emit({"verdict": v.to_json()})
    return _verdict_exit(v)


def _cmd_suite(args) -> int:
    report = models.run_paper_suite()
    _emit(report.to_json())
    return EXIT_OK if report.all_passed else EXIT_FAILS


def _cmd_gen(args) -> int:
    params = models.GenParams(
        seed=args.seed,
        n_states=args.states,
        n_actions=args.actions,
        n_props=args.props,
        n_places=args.places,
        n_transitions=args.transitions,
        token_bound=args.token_bound,
    )
    if args.kind == "lsts":
        artifact = models.random_lsts(params)
        bad = validate_lsts(artifact)
        _emit({"lsts": lsts_to_json(artifact), "valid": not bad})
        return EXIT_OK if not bad else EXIT_FAILS
    net = models.random_pn(params)
    _emit({"net": net_to_json(net)})
    return EXIT_OK


_COMMANDS = {
    "net-to-lsts": _cmd_net_to_lsts,
    "classify": _cmd_classify,
    "check": _cmd_check,
    "check-l": _cmd_check_l,
    "reduce": _cmd_reduce,
    "explore": _cmd_explore,
    "compare": _cmd_compare,
    "consistent": _cmd_consistent,
    "suite": _cmd_suite,
    "gen": _cmd_gen,
}


def run_cli(argv=None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except (CapExceeded, LimitsExceeded) as e:
        print(f"stublab: inconclusive: {e}", file=sys.stderr)
        return EXIT_LIMITS
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as e:
        print(f"stublab: error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_cli())
