"""Reduction functions, executable side conditions, and stubborn-set search.

The condition checkers are exact for D0, D2, D2w, V, I, C4 and L (via the
key-action closure or cycle analysis) and bounded-exhaustive for D1 and D1p
(all rset-avoiding paths up to a length bound).  D1p strengthens D1: when the
commuted action is invisible, a single matching path must also exhibit every
intermediate vertical transition of that action.

For Petri nets, stubborn sets are computed per marking by closing a seed
(the key-action candidate) under a lead-to relation on structural transitions:

  - the seed pulls in everything that may disable it (its key status must
    survive any outside sequence);
  - an enabled member pulls in everything it may disable (so commuting it to
    the front never strands an outside action), and, for input places that
    some transition can net-produce, everything that may disable the member
    itself (so the intermediate vertical transitions of D1p exist; without a
    producer a disabling is permanent and the obligation is vacuous);
  - a disabled member pulls in the net producers of its scapegoat place
    (outside actions then can never enable it).

Arc-weight guarantees refine "may disable": a transition leaving at least as
many tokens as the victim needs is harmless.  Candidate closures are computed
for every admissible seed and the one with the fewest enabled members wins.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .lsts import Lsts
from .petri import PetriNet, build_lsts
from .props import PLAIN, InvisibilityFlags
from .verdict import Verdict, bounded, fails, holds

MODES = ("deadlock", "ltl_weak", "ltl_strong")
CONDITIONS = ("D0", "D1", "D1p", "D2", "D2w", "V", "I", "C4")


@dataclass
class ReductionFunction:
    """Per-state action sets; `default` covers states without an entry."""

    default: str | None = "all"  # "all" | "enabled" | "empty" | None (undefined)
    entries: dict[int, frozenset[int]] = field(default_factory=dict)

    def with_entry(self, state: int, actions) -> "ReductionFunction":
        new = dict(self.entries)
        new[state] = frozenset(actions)
        return ReductionFunction(self.default, new)

    def resolve(self, ts, s: int) -> frozenset[int]:
        if s in self.entries:
            return self.entries[s]
        if self.default == "all":
            return frozenset(range(ts.n_actions))
        if self.default == "enabled":
            return frozenset(ts.enabled(s))
        if self.default == "empty":
            return frozenset()
        raise ValueError(f"reduction function undefined at state {s}")

    def to_json(self) -> dict:
        return {
            "default": self.default,
            "entries": [
                {"state": s, "actions": sorted(a)} for s, a in sorted(self.entries.items())
            ],
        }

    @staticmethod
    def from_json(doc: dict) -> "ReductionFunction":
        return ReductionFunction(
            doc.get("default", "all"),
            {e["state"]: frozenset(e["actions"]) for e in doc.get("entries", ())},
        )


class ReducedLsts:
    """The least subgraph of `parent` generated by a reduction function.

    State ids are the parent's; the object exposes the same traversal
    interface as Lsts so the trace oracles work on either.
    """

    __slots__ = ("parent", "states", "transitions", "r_table", "_succ")

    def __init__(self, parent: Lsts, states, transitions, r_table=None):
        self.parent = parent
        self.states = tuple(sorted(states))
        self.transitions = tuple(sorted(transitions))
        self.r_table = dict(r_table) if r_table is not None else None
        succ: dict[int, list] = {s: [] for s in self.states}
        for s, a, t in self.transitions:
            succ[s].append((a, t))
        self._succ = {s: tuple(sorted(set(x))) for s, x in succ.items()}

    # -- Lsts-compatible traversal interface --------------------------------

    @property
    def initial(self) -> int:
        return self.parent.initial

    @property
    def n_states(self) -> int:
        return self.parent.n_states

    @property
    def n_actions(self) -> int:
        return self.parent.n_actions

    @property
    def action_names(self):
        return self.parent.action_names

    @property
    def prop_names(self):
        return self.parent.prop_names

    @property
    def state_names(self):
        return self.parent.state_names

    @property
    def invisible(self):
        return self.parent.invisible

    def state_ids(self):
        return self.states

    def succ(self, s):
        return self._succ.get(s, ())

    def succ_by_action(self, s, a):
        return tuple(t for b, t in self.succ(s) if b == a)

    def has_edge(self, s, a, t):
        return (a, t) in self.succ(s)

    def enabled(self, s):
        return tuple(sorted({a for a, _ in self.succ(s)}))

    def is_deadlock(self, s):
        return not self.succ(s)

    def label(self, s):
        return self.parent.label(s)

    def label_names(self, s):
        return self.parent.label_names(s)

    def visible_actions(self):
        return self.parent.visible_actions()

    def r_of(self, s) -> frozenset[int]:
        if self.r_table is None:
            raise ValueError("this reduced LSTS carries no reduction-function table")
        return frozenset(self.r_table[s])

    def subgraph_violations(self) -> list[str]:
        out = []
        if self.initial not in set(self.states):
            out.append("initial state missing from the reduced state set")
        parent_states = set(self.parent.state_ids())
        if not set(self.states) <= parent_states:
            out.append("reduced states are not a subset of the parent's")
        for s, a, t in self.transitions:
            if not self.parent.has_edge(s, a, t):
                out.append(f"transition ({s},{a},{t}) not present in the parent")
        return out

    def to_lsts(self) -> Lsts:
        remap = {s: i for i, s in enumerate(self.states)}
        return Lsts(
            state_names=[self.parent.state_names[s] for s in self.states],
            action_names=self.parent.action_names,
            prop_names=self.parent.prop_names,
            initial=remap[self.parent.initial],
            transitions=[(remap[s], a, remap[t]) for s, a, t in self.transitions],
            labels=[self.parent.labels[s] for s in self.states],
            invisible=self.parent.invisible,
        )


def subgraph_view(full: Lsts, sub: Lsts) -> ReducedLsts:
    """Interpret `sub` as a subgraph of `full`, matching states by name."""
    name_to_id = {n: i for i, n in enumerate(full.state_names)}
    if len(name_to_id) != full.n_states:
        raise ValueError("parent state names must be unique to match a subgraph")
    try:
        state_map = {s: name_to_id[sub.state_names[s]] for s in sub.state_ids()}
    except KeyError as e:
        raise ValueError(f"subgraph state {e} has no counterpart in the parent")
    if tuple(sub.action_names) != tuple(full.action_names):
        raise ValueError("subgraph must share the parent's action table")
    if state_map[sub.initial] != full.initial:
        raise ValueError("subgraph initial state differs from the parent's")
    transitions = [(state_map[s], a, state_map[t]) for s, a, t in sub.transitions]
    view = ReducedLsts(full, sorted(state_map.values()), transitions)
    bad = view.subgraph_violations()
    if bad:
        raise ValueError("; ".join(bad))
    return view


# -- key actions and condition checkers -------------------------------------


def _avoid_closure(ts, s: int, rset: frozenset[int]) -> list[int]:
    """States reachable from s using only actions outside rset (incl. s)."""
    seen = {s}
    queue = deque([s])
    while queue:
        x = queue.popleft()
        for a, t in ts.succ(x):
            if a not in rset and t not in seen:
                seen.add(t)
                queue.append(t)
    return sorted(seen)


def key_actions(ts, s: int, rset) -> tuple[int, ...]:
    """Members of rset enabled in every state reachable by outside actions."""
    rset = frozenset(rset)
    closure = _avoid_closure(ts, s, rset)
    out = []
    for a in sorted(rset):
        if all(a in ts.enabled(x) for x in closure):
            out.append(a)
    return tuple(out)


def default_bound(ts) -> int:
    return min(2 * ts.n_states, 12)


def _commute_match(ts, s, steps, a, end, need_verticals) -> bool:
    """Does some path s -a-> x0 -a1..an-> end exist (with verticals if asked)?"""
    acts = [b for b, _ in steps]
    mids = [t for _, t in steps]  # s_1 .. s_n
    n = len(steps)
    dead: set[tuple[int, int]] = set()

    def rec(i, x):
        if i == n:
            return x == end
        if (i, x) in dead:
            return False
        for x2 in ts.succ_by_action(x, acts[i]):
            if need_verticals and i + 1 < n and not ts.has_edge(mids[i], a, x2):
                continue
            if rec(i + 1, x2):
                return True
        dead.add((i, x))
        return False

    return any(rec(0, x0) for x0 in ts.succ_by_action(s, a))


def _check_d1(ts, s, rset, bound, strengthened) -> Verdict:
    """Bounded-exhaustive D1 / D1p over rset-avoiding paths from s."""
    queue = deque([(s, ())])
    while queue:
        sn, steps = queue.popleft()
        if steps:
            mids = [t for _, t in steps]
            for a in sorted(rset):
                verticals = strengthened and a in ts.invisible
                for end in ts.succ_by_action(sn, a):
                    if not _commute_match(ts, s, steps, a, end, verticals):
                        return fails(
                            state=s,
                            word=[b for b, _ in steps],
                            word_names=[ts.action_names[b] for b, _ in steps],
                            action=a,
                            action_name=ts.action_names[a],
                            end_state=end,
                            intermediate_states=mids,
                        )
        if len(steps) < bound:
            for b, t in ts.succ(sn):
                if b not in rset:
                    queue.append((t, steps + ((b, t),)))
    return bounded(bound=bound)


def check_condition(ts, s: int, rset, which: str, bound: int | None = None) -> Verdict:
    """Decide one side condition for the candidate set rset at state s.

    D0, D2, D2w, V, I, C4 are decided exactly; D1 and D1p are checked over
    all rset-avoiding paths up to `bound` steps, so a passing verdict is
    BoundedHolds(bound).
    """
    if which not in CONDITIONS:
        raise ValueError(f"unknown condition {which!r}")
    rset = frozenset(rset)
    enabled = frozenset(ts.enabled(s))
    if which in ("D1", "D1p"):
        b = default_bound(ts) if bound is None else int(bound)
        if b < 1:
            raise ValueError("D1/D1p need a positive path bound")
        return _check_d1(ts, s, rset, b, which == "D1p")
    if which == "D0":
        if enabled and not (rset & enabled):
            return fails(state=s, reason="enabled state with no enabled member")
        return holds()
    if which == "D2":
        keys = set(key_actions(ts, s, rset))
        bad = sorted((rset & enabled) - keys)
        if bad:
            return fails(state=s, action=bad[0], action_name=ts.action_names[bad[0]],
                         reason="enabled member is not a key action")
        return holds()
    if which == "D2w":
        if enabled and not key_actions(ts, s, rset):
            return fails(state=s, reason="no key action in the set")
        return holds()
    if which == "V":
        visible = ts.visible_actions()
        if (rset & enabled & visible) and not visible <= rset:
            missing = sorted(visible - rset)
            return fails(state=s, action=missing[0], action_name=ts.action_names[missing[0]],
                         reason="enabled visible member but not all visible actions")
        return holds()
    if which == "I":
        if enabled & ts.invisible:
            keys = set(key_actions(ts, s, rset))
            if not (keys & ts.invisible):
                return fails(state=s, reason="invisible action enabled but no invisible key action")
        return holds()
    # C4
    if rset == frozenset(range(ts.n_actions)) or len(rset & enabled) == 1:
        return holds()
    return fails(state=s, reason="set is neither everything nor single-enabled")


def check_L(reduced: ReducedLsts) -> Verdict:
    """Every cycle must contain, per visible action, a state whose set has it.

    Equivalently: for each visible action a, the subgraph of states with
    a outside their set is acyclic.
    """
    visible = sorted(reduced.visible_actions())
    for a in visible:
        nodes = [s for s in reduced.states if a not in reduced.r_of(s)]
        node_set = set(nodes)
        color = {s: 0 for s in nodes}  # 0 new, 1 on stack, 2 done
        for root in nodes:
            if color[root]:
                continue
            stack = [(root, iter(reduced.succ(root)))]
            color[root] = 1
            trail = [root]
            while stack:
                s, it = stack[-1]
                hit = None
                for _, t in it:
                    if t not in node_set:
                        continue
                    if color[t] == 0:
                        color[t] = 1
                        stack.append((t, iter(reduced.succ(t))))
                        trail.append(t)
                        hit = t
                        break
                    if color[t] == 1:
                        cycle = trail[trail.index(t):]
                        return fails(
                            action=a,
                            action_name=reduced.action_names[a],
                            cycle=cycle,
                            cycle_names=[reduced.state_names[x] for x in cycle],
                        )
                if hit is None:
                    color[s] = 2
                    stack.pop()
                    trail.pop()
    return holds()


def reduce(ts: Lsts, r: ReductionFunction) -> ReducedLsts:
    """Least fixpoint from the initial state following only r(s)-actions."""
    r_table = {}
    visited = {ts.initial}
    queue = deque([ts.initial])
    transitions = []
    while queue:
        s = queue.popleft()
        rset = r.resolve(ts, s)
        r_table[s] = tuple(sorted(rset))
        for a, t in ts.succ(s):
            if a in rset:
                transitions.append((s, a, t))
                if t not in visited:
                    visited.add(t)
                    queue.append(t)
    return ReducedLsts(ts, visited, transitions, r_table)


# -- lead-to relation and stubborn sets for Petri nets ----------------------


def _may_disable(net: PetriNet, killer: int, victim: int) -> bool:
    """Can one occurrence of `killer` push an input place below victim's need?"""
    if killer == victim:
        return False
    for p, need in net.inputs(victim):
        take = net.w(p, killer)
        give = net.w_out(killer, p)
        if take > give and give < need:
            return True
    return False


def _has_net_producer(net: PetriNet, p: int) -> bool:
    return any(net.w_out(t, p) > net.w(p, t) for t in range(net.n_transitions))


def _scapegoat(net: PetriNet, m, t: int) -> int:
    for p, w in net.inputs(t):
        if m[p] < w:
            return p
    raise ValueError("no scapegoat: transition is enabled")


def leadsto_successors(net: PetriNet, m, t: int, keyed: bool) -> tuple[int, ...]:
    """The lead-to successors of t at marking m; `keyed` adds disabler threats."""
    out: set[int] = set()
    if net.t_enabled(m, t):
        # whom t may disable (commuting t to the front must not strand anyone)
        for p, take in net.inputs(t):
            give = net.w_out(t, p)
            if take <= give:
                continue
            for t2 in range(net.n_transitions):
                if t2 != t and net.w(p, t2) > give:
                    out.add(t2)
        if keyed:
            out |= {t2 for t2 in range(net.n_transitions) if _may_disable(net, t2, t)}
        else:
            # who may disable t, where a later re-enabling is possible at all
            for p, need in net.inputs(t):
                if not _has_net_producer(net, p):
                    continue
                for t2 in range(net.n_transitions):
                    if t2 != t and net.w(p, t2) > net.w_out(t2, p) and net.w_out(t2, p) < need:
                        out.add(t2)
    else:
        p = _scapegoat(net, m, t)
        out |= {
            t2
            for t2 in range(net.n_transitions)
            if t2 != t and net.w_out(t2, p) > net.w(p, t2)
        }
    return tuple(sorted(out))


@dataclass(frozen=True)
class LeadstoGraph:
    """The per-marking lead-to graph under a fixed role assignment."""

    marking: tuple
    seed: int | None
    strong: bool
    edges: dict

    @staticmethod
    def at(net: PetriNet, m, seed: int | None = None, strong: bool = False) -> "LeadstoGraph":
        edges = {}
        for t in range(net.n_transitions):
            keyed = strong if net.t_enabled(m, t) else False
            keyed = keyed or t == seed
            edges[t] = leadsto_successors(net, m, t, keyed and net.t_enabled(m, t))
        return LeadstoGraph(tuple(m), seed, strong, edges)


def _close_members(net: PetriNet, m, members, seed: int | None, strong: bool) -> set[int]:
    members = set(members)
    queue = deque(sorted(members))
    while queue:
        t = queue.popleft()
        keyed = (t == seed) or (strong and net.t_enabled(m, t))
        for t2 in leadsto_successors(net, m, t, keyed):
            if t2 not in members:
                members.add(t2)
                queue.append(t2)
    return members


def stubborn_closure(net: PetriNet, m, seed: int, strong: bool = False, extra=()) -> tuple[int, ...]:
    """The lead-to closure of a seed (treated as the key-action candidate)."""
    return tuple(sorted(_close_members(net, m, {seed} | set(extra), seed, strong)))


def _apply_visibility(net, m, members, seed, strong, visible) -> set[int]:
    vis = set(visible)
    while True:
        has_enabled_visible = any(net.t_enabled(m, t) for t in members & vis)
        if has_enabled_visible and not vis <= members:
            members = _close_members(net, m, members | vis, seed, strong)
        else:
            return members


def compute_stubborn_pn(net: PetriNet, m, visible=frozenset(), mode: str = "deadlock") -> tuple[int, ...]:
    """A stubborn set at marking m: smallest-enabled closure over all seeds.

    In the LTL modes the result is additionally closed under V (all visible
    transitions join once an enabled visible member appears) and respects I
    (seeds are restricted to enabled invisible transitions whenever one
    exists, so the guaranteed key action is invisible).  Deadlocked markings
    yield the empty set.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    enabled = net.enabled(m)
    if not enabled:
        return ()
    ltl = mode != "deadlock"
    strong = mode == "ltl_strong"
    visible = frozenset(visible)
    seeds = list(enabled)
    if ltl:
        inv = [t for t in enabled if t not in visible]
        if inv:
            seeds = inv
    best = None
    best_key = None
    for seed in seeds:
        members = _close_members(net, m, {seed}, seed, strong)
        if ltl:
            members = _apply_visibility(net, m, members, seed, strong, visible)
        rank = (sum(1 for t in members if net.t_enabled(m, t)), seed)
        if best is None or rank < best_key:
            best, best_key = members, rank
    return tuple(sorted(best))


def widened_stubborn_pn(net: PetriNet, m, visible) -> tuple[int, ...]:
    """Cycle-proviso repair set: all enabled plus all visible, strongly closed."""
    members = set(net.enabled(m)) | set(visible)
    return tuple(sorted(_close_members(net, m, members, None, True)))


def explore_with_por(
    net: PetriNet,
    props=(),
    invisibility: InvisibilityFlags = PLAIN,
    mode: str = "ltl_weak",
    state_cap: int = 10000,
    box_bound: int = 6,
    invisible_override=None,
) -> ReducedLsts:
    """Depth-first reduced-state-space construction with the stack proviso.

    Each new state gets a stubborn set from compute_stubborn_pn.  When an
    edge closes a cycle onto the DFS stack and the cycle lacks a state whose
    set covers every visible action, the source state's set is widened to all
    enabled actions plus all visible actions (closed).  The final table is
    re-verified with check_L; any surviving uncovered cycle pins one more
    state and the exploration reruns (monotone, hence convergent).
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    full = build_lsts(net, props, invisibility, state_cap, box_bound, invisible_override)
    markings = net.reachable(state_cap)
    visible = tuple(sorted(full.visible_actions()))
    ltl = mode != "deadlock"
    pinned: set[int] = set()
    for _ in range(full.n_states + 1):
        result = _dfs_explore(net, full, markings, visible, mode, pinned)
        if not ltl:
            return result
        verdict = check_L(result)
        if verdict.ok:
            return result
        fresh = [s for s in verdict.witness["cycle"] if s not in pinned]
        if not fresh:
            raise AssertionError("uncovered cycle with every state already widened")
        pinned.add(min(fresh))
    raise AssertionError("cycle proviso did not converge")


def _dfs_explore(net, full, markings, visible, mode, pinned):
    ltl = mode != "deadlock"
    vis_set = frozenset(visible)

    def rset_of(s):
        if s in pinned:
            return widened_stubborn_pn(net, markings[s], visible)
        return compute_stubborn_pn(net, markings[s], vis_set, mode)

    r_table = {}
    edges = set()
    init = full.initial
    r_table[init] = rset_of(init)
    frames = [[init, [e for e in full.succ(init) if e[0] in set(r_table[init])], 0]]
    on_stack = [init]
    on_set = {init}
    visited = {init}
    while frames:
        frame = frames[-1]
        s, elist, i = frame
        if i >= len(elist):
            frames.pop()
            on_stack.pop()
            on_set.discard(s)
            continue
        frame[2] += 1
        a, v = elist[i]
        edges.add((s, a, v))
        if v not in visited:
            visited.add(v)
            r_table[v] = rset_of(v)
            frames.append([v, [e for e in full.succ(v) if e[0] in set(r_table[v])], 0])
            on_stack.append(v)
            on_set.add(v)
        elif ltl and v in on_set:
            cycle = on_stack[on_stack.index(v):]
            covered = set()
            for x in cycle:
                covered |= set(r_table[x])
            if any(b not in covered for b in visible):
                pinned.add(s)
                widened = widened_stubborn_pn(net, markings[s], visible)
                added = set(widened) - set(r_table[s])
                r_table[s] = widened
                elist.extend(e for e in full.succ(s) if e[0] in added)
    return ReducedLsts(full, visited, edges, {s: tuple(sorted(r_table[s])) for s in visited})
