"""Petri nets: syntax, firing semantics, and the induced bounded-reachable LSTS.

Markings are plain tuples of token counts indexed by place id.  The induced
LSTS takes structural transitions as its action alphabet, labels each
reachable marking by the propositions it satisfies, and declares invisible
exactly the transitions the classifier certifies (soundly) under the chosen
invisibility notion.
"""

from __future__ import annotations

from collections import deque

from . import props as props_mod
from .lsts import Lsts
from .props import InvisibilityFlags, PLAIN, classify_invisibility
from .verdict import BOUNDED, HOLDS

Marking = tuple


class CapExceeded(RuntimeError):
    """The reachable set ran past the state cap (net possibly unbounded)."""


class PetriNet:
    __slots__ = (
        "place_names",
        "transition_names",
        "initial",
        "_w_in",
        "_w_out",
        "_delta",
        "_reach_cache",
    )

    def __init__(self, place_names, transition_names, arcs, initial):
        """arcs: iterable of (source name, target name, weight) with weight >= 0."""
        self.place_names = tuple(place_names)
        self.transition_names = tuple(transition_names)
        if set(self.place_names) & set(self.transition_names):
            raise ValueError("place and transition names must be disjoint")
        pidx = {p: i for i, p in enumerate(self.place_names)}
        tidx = {t: i for i, t in enumerate(self.transition_names)}
        w_in = [dict() for _ in self.transition_names]
        w_out = [dict() for _ in self.transition_names]
        for src, dst, w in arcs:
            w = int(w)
            if w < 0:
                raise ValueError("arc weights must be nonnegative")
            if w == 0:
                continue
            if src in pidx and dst in tidx:
                w_in[tidx[dst]][pidx[src]] = w_in[tidx[dst]].get(pidx[src], 0) + w
            elif src in tidx and dst in pidx:
                w_out[tidx[src]][pidx[dst]] = w_out[tidx[src]].get(pidx[dst], 0) + w
            else:
                raise ValueError(f"arc ({src!r}, {dst!r}) does not join a place and a transition")
        self._w_in = tuple(tuple(sorted(d.items())) for d in w_in)
        self._w_out = tuple(tuple(sorted(d.items())) for d in w_out)
        self.initial = tuple(int(x) for x in initial)
        if len(self.initial) != len(self.place_names) or min(self.initial, default=0) < 0:
            raise ValueError("initial marking must assign a token count to every place")
        deltas = []
        for t in range(len(self.transition_names)):
            d = [0] * len(self.place_names)
            for p, w in self._w_in[t]:
                d[p] -= w
            for p, w in self._w_out[t]:
                d[p] += w
            deltas.append(tuple(d))
        self._delta = tuple(deltas)
        self._reach_cache = {}

    @property
    def n_places(self) -> int:
        return len(self.place_names)

    @property
    def n_transitions(self) -> int:
        return len(self.transition_names)

    def inputs(self, t: int):
        return self._w_in[t]

    def outputs(self, t: int):
        return self._w_out[t]

    def w(self, p: int, t: int) -> int:
        return dict(self._w_in[t]).get(p, 0)

    def w_out(self, t: int, p: int) -> int:
        return dict(self._w_out[t]).get(p, 0)

    def t_enabled(self, m: Marking, t: int) -> bool:
        return all(m[p] >= w for p, w in self._w_in[t])

    def enabled(self, m: Marking) -> tuple[int, ...]:
        return tuple(t for t in range(self.n_transitions) if self.t_enabled(m, t))

    def fire(self, m: Marking, t: int) -> Marking:
        if not self.t_enabled(m, t):
            raise ValueError(f"transition {self.transition_names[t]} is disabled")
        return tuple(x + dx for x, dx in zip(m, self._delta[t]))

    def delta(self, t: int) -> tuple[int, ...]:
        return self._delta[t]

    def marking_dict(self, m: Marking) -> dict:
        return dict(zip(self.place_names, m))

    def marking_name(self, m: Marking) -> str:
        if all(x <= 9 for x in m):
            return "".join(str(x) for x in m)
        return ",".join(str(x) for x in m)

    def reachable(self, cap: int = 200000) -> list[Marking]:
        """Reachable markings, breadth-first with lexicographic tie-break."""
        cached = self._reach_cache.get("r")
        if cached is not None and cached[0] >= cap:
            if len(cached[1]) > cap:
                raise CapExceeded(f"reachable set exceeds {cap} markings")
            return cached[1]
        order = [self.initial]
        seen = {self.initial}
        frontier = [self.initial]
        while frontier:
            new = set()
            for m in frontier:
                for t in self.enabled(m):
                    m2 = self.fire(m, t)
                    if m2 not in seen:
                        new.add(m2)
            frontier = sorted(new)
            seen |= new
            order.extend(frontier)
            if len(order) > cap:
                raise CapExceeded(f"reachable set exceeds {cap} markings")
        self._reach_cache["r"] = (cap, order)
        return order


class MarkingGraphView:
    """A lazily explored LSTS view of a net, with markings as state ids.

    Lets the condition checkers and key-action closures run directly on a net
    whose reachable set may be infinite; only the states an operation actually
    touches are ever materialized.
    """

    def __init__(self, net: PetriNet, props=(), invisible=()):
        self.net = net
        self.props = tuple(props)
        self.invisible = frozenset(invisible)
        self.initial = net.initial

    @property
    def n_actions(self) -> int:
        return self.net.n_transitions

    @property
    def action_names(self):
        return self.net.transition_names

    @property
    def prop_names(self):
        return tuple(q.name for q in self.props)

    def succ(self, m):
        return tuple((t, self.net.fire(m, t)) for t in self.net.enabled(m))

    def succ_by_action(self, m, t):
        return (self.net.fire(m, t),) if self.net.t_enabled(m, t) else ()

    def has_edge(self, m, t, m2):
        return self.net.t_enabled(m, t) and self.net.fire(m, t) == m2

    def enabled(self, m):
        return self.net.enabled(m)

    def is_deadlock(self, m) -> bool:
        return not self.net.enabled(m)

    def label(self, m) -> int:
        md = self.net.marking_dict(m)
        mask = 0
        for j, q in enumerate(self.props):
            if q.eval(md):
                mask |= 1 << j
        return mask

    def visible_actions(self):
        return frozenset(range(self.n_actions)) - self.invisible


def pn_enabled(net: PetriNet, m: Marking) -> tuple[int, ...]:
    return net.enabled(m)


def fire(net: PetriNet, m: Marking, t: int) -> Marking:
    return net.fire(m, t)


def transition_delta(net: PetriNet, t: int) -> tuple[int, ...]:
    return net.delta(t)


def build_lsts_report(
    net: PetriNet,
    props=(),
    invisibility: InvisibilityFlags = PLAIN,
    state_cap: int = 10000,
    box_bound: int = 6,
    invisible_override=None,
) -> tuple[Lsts, list[str]]:
    """The induced LSTS over reachable markings, plus classifier warnings.

    The declared invisible set must stay a sound under-approximation: exact
    Holds verdicts are always accepted; BoundedHolds only when every reachable
    marking fits inside the verified box (bounded is then exact on the pairs
    that matter); anything else leaves the transition visible.
    """
    markings = net.reachable(state_cap)
    index = {m: i for i, m in enumerate(markings)}
    transitions = []
    for i, m in enumerate(markings):
        for t in net.enabled(m):
            transitions.append((i, t, index[net.fire(m, t)]))
    labels = []
    for m in markings:
        md = net.marking_dict(m)
        mask = 0
        for j, q in enumerate(props):
            if q.eval(md):
                mask |= 1 << j
        labels.append(mask)
    warnings: list[str] = []
    if invisible_override is not None:
        invisible = frozenset(invisible_override)
    else:
        max_tokens = max((max(m) for m in markings), default=0)
        invisible = set()
        for t in range(net.n_transitions):
            verdicts = [
                classify_invisibility(net, q, t, invisibility, box_bound, state_cap)
                for q in props
            ]
            if all(v.status == HOLDS for v in verdicts):
                invisible.add(t)
            elif all(v.ok for v in verdicts):
                if max_tokens <= box_bound:
                    invisible.add(t)
                    warnings.append(
                        f"{net.transition_names[t]}: invisibility is bounded-certified "
                        f"(box {box_bound}); accepted because all reachable markings fit"
                    )
                else:
                    warnings.append(
                        f"{net.transition_names[t]}: bounded invisibility verdict not "
                        f"accepted (reachable markings leave the box); kept visible"
                    )
    lsts = Lsts(
        state_names=[net.marking_name(m) for m in markings],
        action_names=net.transition_names,
        prop_names=[q.name for q in props],
        initial=0,
        transitions=transitions,
        labels=labels,
        invisible=invisible,
    )
    return lsts, warnings


def build_lsts(net, props=(), invisibility=PLAIN, state_cap=10000, box_bound=6, invisible_override=None) -> Lsts:
    return build_lsts_report(net, props, invisibility, state_cap, box_bound, invisible_override)[0]


# -- JSON interchange ------------------------------------------------------


def net_to_json(net: PetriNet) -> dict:
    arcs = []
    for t in range(net.n_transitions):
        for p, w in net.inputs(t):
            arcs.append({"from": net.place_names[p], "to": net.transition_names[t], "w": w})
        for p, w in net.outputs(t):
            arcs.append({"from": net.transition_names[t], "to": net.place_names[p], "w": w})
    return {
        "places": [
            {"id": p, "tokens": net.initial[i]} for i, p in enumerate(net.place_names)
        ],
        "transitions": list(net.transition_names),
        "arcs": sorted(arcs, key=lambda a: (a["from"], a["to"])),
    }


def net_from_json(doc: dict) -> PetriNet:
    places = doc["places"]
    return PetriNet(
        place_names=[p["id"] for p in places],
        transition_names=doc["transitions"],
        arcs=[(a["from"], a["to"], a.get("w", 1)) for a in doc.get("arcs", ())],
        initial=[p.get("tokens", 0) for p in places],
    )
