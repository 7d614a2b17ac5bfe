"""Brute-force truth for the preservation claims.

Complete behaviour of a finite system is enumerated as witnesses: deadlocking
initial paths (each transition used at most `repeat` times) and lassos with a
simple stem and a simple cycle.  Membership of a trace in the other system is
then decided exactly by a product search, so every verdict is per-witness
exact while "holds" verdicts stay honest about the enumeration bounds.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass

from .lsts import (
    EVENTUALLY_CONSTANT,
    EVENTUALLY_EMPTY,
    FINITE,
    PERIODIC,
    Lasso,
    NoStutterTrace,
    Path,
    VisWord,
    nostut_trace,
    vis_projection,
)
from .verdict import Verdict, bounded, fails, holds


class LimitsExceeded(RuntimeError):
    """Witness enumeration ran past the configured budget."""


@dataclass(frozen=True)
class EnumLimits:
    repeat: int = 2
    count: int = 100000

    def to_json(self) -> dict:
        return {"repeat": self.repeat, "count": self.count}


@dataclass(frozen=True)
class CompleteWitness:
    """A complete (deadlocking or infinite) initial path with its traces."""

    path: Path | Lasso
    nostut: NoStutterTrace
    vis: VisWord

    @property
    def is_finite(self) -> bool:
        return isinstance(self.path, Path)


def _witness(ts, p, proj) -> CompleteWitness:
    return CompleteWitness(p, nostut_trace(ts, p), vis_projection(p, proj))


def path_to_json(p) -> dict:
    if isinstance(p, Lasso):
        return {
            "kind": "lasso",
            "start": p.stem.start,
            "stem": [list(x) for x in p.stem.steps],
            "cycle": [list(x) for x in p.cycle.steps],
        }
    return {"kind": "path", "start": p.start, "steps": [list(x) for x in p.steps]}


def path_from_json(doc) -> Path | Lasso:
    if doc["kind"] == "lasso":
        stem = Path(doc["start"], tuple(tuple(x) for x in doc["stem"]))
        return Lasso(stem, Path(stem.end, tuple(tuple(x) for x in doc["cycle"])))
    return Path(doc["start"], tuple(tuple(x) for x in doc["steps"]))


def witness_to_json(ts, w: CompleteWitness) -> dict:
    def letters(word):
        return [sorted(q for i, q in enumerate(ts.prop_names) if x >> i & 1) for x in word]

    return {
        "path": path_to_json(w.path),
        "nostut": {
            "kind": w.nostut.kind,
            "word": letters(w.nostut.word),
            "period": letters(w.nostut.period),
        },
        "vis": {
            "kind": w.vis.kind,
            "word": [ts.action_names[a] for a in w.vis.word],
            "period": [ts.action_names[a] for a in w.vis.period],
        },
    }


# -- enumeration -------------------------------------------------------------


def _deadlocking_paths_from(ts, start: int, limits: EnumLimits):
    """All deadlocking paths from `start` with per-transition occurrence caps."""
    budget = limits.count
    if ts.is_deadlock(start):
        yield Path(start)
        return
    counts: Counter = Counter()
    trail: list[tuple[int, int, int]] = []
    stack = [(start, list(ts.succ(start)), 0)]
    while stack:
        budget -= 1
        if budget < 0:
            raise LimitsExceeded(f"more than {limits.count} enumeration steps")
        s, elist, i = stack[-1]
        if i >= len(elist):
            stack.pop()
            if trail:
                counts[trail.pop()] -= 1
            continue
        stack[-1] = (s, elist, i + 1)
        a, t = elist[i]
        e = (s, a, t)
        if counts[e] >= limits.repeat:
            continue
        counts[e] += 1
        trail.append(e)
        if ts.is_deadlock(t):
            yield Path(start, tuple((b, u) for _, b, u in trail))
            counts[trail.pop()] -= 1
        else:
            stack.append((t, list(ts.succ(t)), 0))


def _simple_cycles_at(ts, v: int, limits: EnumLimits, spent: list):
    """All cycles at v that repeat no intermediate state."""
    stack = [(v, list(ts.succ(v)), 0)]
    trail: list[tuple[int, int]] = []
    seen: set[int] = set()
    while stack:
        spent[0] -= 1
        if spent[0] < 0:
            raise LimitsExceeded(f"more than {limits.count} enumeration steps")
        s, elist, i = stack[-1]
        if i >= len(elist):
            stack.pop()
            if trail:
                _, u = trail.pop()
                seen.discard(u)
            continue
        stack[-1] = (s, elist, i + 1)
        a, t = elist[i]
        if t == v:
            yield Path(v, tuple(trail) + ((a, t),))
        elif t not in seen:
            seen.add(t)
            trail.append((a, t))
            stack.append((t, list(ts.succ(t)), 0))


def enumerate_complete_witnesses(ts, limits: EnumLimits = EnumLimits(), proj_set=None):
    """Deadlocking initial paths plus all simple-stem simple-cycle lassos."""
    proj = ts.invisible if proj_set is None else frozenset(proj_set)
    out: list[CompleteWitness] = []
    spent = [limits.count]
    for p in _deadlocking_paths_from(ts, ts.initial, limits):
        out.append(_witness(ts, p, proj))
        if len(out) > limits.count:
            raise LimitsExceeded(f"more than {limits.count} witnesses")
    # simple stems by DFS, harvesting every cycle at each stem end
    init = ts.initial
    cycle_cache: dict[int, list[Path]] = {}
    stem_seen = {init}
    stem_trail: list[tuple[int, int]] = []
    stack = [(init, list(ts.succ(init)), 0)]
    while stack:
        s, elist, i = stack[-1]
        if i == 0:
            if s not in cycle_cache:
                cycle_cache[s] = list(_simple_cycles_at(ts, s, limits, spent))
            stem = Path(init, tuple(stem_trail))
            for cyc in cycle_cache[s]:
                out.append(_witness(ts, Lasso(stem, cyc), proj))
                if len(out) > limits.count:
                    raise LimitsExceeded(f"more than {limits.count} witnesses")
        if i >= len(elist):
            stack.pop()
            if stem_trail:
                _, u = stem_trail.pop()
                stem_seen.discard(u)
            continue
        stack[-1] = (s, elist, i + 1)
        a, t = elist[i]
        if t not in stem_seen:
            stem_seen.add(t)
            stem_trail.append((a, t))
            stack.append((t, list(ts.succ(t)), 0))
    return tuple(out)


def _distinct(witnesses, key):
    seen = {}
    for w in witnesses:
        seen.setdefault(key(w), w)
    return seen


# -- product membership searches ---------------------------------------------


def _bfs_product(start_nodes, moves, accept):
    """Generic BFS; returns (accepting node, parents) or (None, parents)."""
    parents = {n: None for n in start_nodes}
    queue = deque(start_nodes)
    while queue:
        n = queue.popleft()
        if accept(n):
            return n, parents
        for edge, n2 in moves(n):
            if n2 not in parents:
                parents[n2] = (n, edge)
                queue.append(n2)
    return None, parents


def _rebuild(parents, node) -> list:
    steps = []
    while parents[node] is not None:
        node, edge = parents[node]
        steps.append(edge)
    steps.reverse()
    return steps


def _sccs(nodes, succ):
    """Tarjan's strongly connected components, iteratively."""
    index = {}
    low = {}
    on = set()
    stack = []
    out = []
    counter = [0]
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on.add(w)
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                if w in on:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])
            if low[v] == index[v]:
                scc = set()
                while True:
                    w = stack.pop()
                    on.discard(w)
                    scc.add(w)
                    if w == v:
                        break
                out.append(scc)
    return out


def _label_moves(ts, word, endless_letter=None):
    """Product moves for no-stutter matching: (state, consumed) pairs."""
    n = len(word)

    def moves(node):
        s, i = node
        for a, t in ts.succ(s):
            lab = ts.label(t)
            if lab == word[i - 1]:
                yield (a, t), (t, i)
            elif i < n and lab == word[i]:
                yield (a, t), (t, i + 1)

    return moves


def _action_moves(ts, word, proj):
    n = len(word)

    def moves(node):
        s, i = node
        for a, t in ts.succ(s):
            if a in proj:
                yield (a, t), (t, i)
            elif i < n and a == word[i]:
                yield (a, t), (t, i + 1)

    return moves


def _qualifying_states(ts, in_graph, edge_ok):
    """States from which a cycle is reachable inside the filtered subgraph."""
    nodes = [s for s in ts.state_ids() if in_graph(s)]

    def succ(s):
        return [t for a, t in ts.succ(s) if in_graph(t) and edge_ok(a)]

    good = set()
    for scc in _sccs(nodes, succ):
        if len(scc) > 1:
            good |= scc
        else:
            (s,) = tuple(scc)
            if s in succ(s):
                good.add(s)
    # backward closure within the subgraph
    preds: dict[int, list[int]] = {s: [] for s in nodes}
    for s in nodes:
        for t in succ(s):
            preds[t].append(s)
    qual = set(good)
    queue = deque(good)
    while queue:
        t = queue.popleft()
        for s in preds[t]:
            if s not in qual:
                qual.add(s)
                queue.append(s)
    return qual, good, succ


def _lasso_into_cycle(ts, prefix_steps, start, qual_succ, good, entry):
    """Extend a stem to a good node and close a simple cycle there."""
    node, parents = _bfs_product([entry], lambda s: ((e, t) for e, t in _edge_pairs(qual_succ, ts, s)), lambda s: s in good)
    extend = _rebuild(parents, node)
    stem = Path(start, tuple(prefix_steps) + tuple(extend))
    g = node
    # shortest cycle g -> g inside the subgraph
    first = [( (a, t), t) for (a, t) in _edge_pairs(qual_succ, ts, g)]
    best = None
    for edge, t in first:
        if t == g:
            best = [edge]
            break
        node2, parents2 = _bfs_product([t], lambda s: ((e, u) for e, u in _edge_pairs(qual_succ, ts, s)), lambda s: s == g)
        if node2 is not None:
            cand = [edge] + _rebuild(parents2, node2)
            if best is None or len(cand) < len(best):
                best = cand
    return Lasso(stem, Path(g, tuple(best)))


def _edge_pairs(succ_fn, ts, s):
    allowed = set(succ_fn(s))
    for a, t in ts.succ(s):
        if t in allowed:
            yield (a, t), t


def _match_word_phase(ts, word, moves, starts):
    """All product nodes that consume the whole word, with parents."""
    n = len(word)
    parents = {node: None for node in starts}
    queue = deque(starts)
    finish = []
    while queue:
        node = queue.popleft()
        if node[1] == n:
            finish.append(node)
        for edge, n2 in moves(node):
            if n2 not in parents:
                parents[n2] = (node, edge)
                queue.append(n2)
    return finish, parents


def _finite_accepts(ts, finish):
    return [node for node in finish if ts.is_deadlock(node[0])]


def find_matching_complete_path(ts, target, proj_set=None):
    """Exact membership of a canonical trace in ts; a witness path on success."""
    if isinstance(target, NoStutterTrace):
        return _find_stutter_match(ts, target)
    if isinstance(target, VisWord):
        proj = ts.invisible if proj_set is None else frozenset(proj_set)
        return _find_weak_match(ts, target, proj)
    raise TypeError("target must be a NoStutterTrace or a VisWord")


def _find_stutter_match(ts, target: NoStutterTrace):
    if target.kind == PERIODIC:
        # expand one full lap so the word phase is never empty
        return _find_periodic_match(ts, target.word + target.period, target.period)
    word = target.word
    if not word or ts.label(ts.initial) != word[0]:
        return None
    starts = [(ts.initial, 1)]
    moves = _label_moves(ts, word)
    if target.kind == FINITE:
        node, parents = _bfs_product(starts, moves, lambda n: n[1] == len(word) and ts.is_deadlock(n[0]))
        return None if node is None else Path(ts.initial, tuple(_rebuild(parents, node)))
    if target.kind == EVENTUALLY_CONSTANT:
        last = word[-1]
        qual, good, qsucc = _qualifying_states(ts, lambda s: ts.label(s) == last, lambda a: True)
        node, parents = _bfs_product(starts, moves, lambda n: n[1] == len(word) and n[0] in qual)
        if node is None:
            return None
        return _lasso_into_cycle(ts, _rebuild(parents, node), ts.initial, qsucc, good, node[0])
    raise ValueError(f"unknown trace kind {target.kind!r}")


def _find_weak_match(ts, target: VisWord, proj):
    word = target.word
    starts = [(ts.initial, 0)]
    moves = _action_moves(ts, word, proj)
    if target.kind == FINITE:
        node, parents = _bfs_product(starts, moves, lambda n: n[1] == len(word) and ts.is_deadlock(n[0]))
        return None if node is None else Path(ts.initial, tuple(_rebuild(parents, node)))
    if target.kind == EVENTUALLY_EMPTY:
        qual, good, _ = _qualifying_states_actions(ts, proj)
        node, parents = _bfs_product(starts, moves, lambda n: n[1] == len(word) and n[0] in qual)
        if node is None:
            return None
        return _lasso_into_cycle_actions(ts, _rebuild(parents, node), node[0], proj, good)
    return _find_periodic_match(ts, word, target.period, proj=proj)


def _qualifying_states_actions(ts, proj):
    nodes = list(ts.state_ids())

    def succ(s):
        return sorted({t for a, t in ts.succ(s) if a in proj})

    good = set()
    for scc in _sccs(nodes, succ):
        if len(scc) > 1:
            good |= scc
        else:
            (s,) = tuple(scc)
            if s in succ(s):
                good.add(s)
    preds: dict[int, list[int]] = {s: [] for s in nodes}
    for s in nodes:
        for t in succ(s):
            preds[t].append(s)
    qual = set(good)
    queue = deque(good)
    while queue:
        t = queue.popleft()
        for s in preds[t]:
            if s not in qual:
                qual.add(s)
                queue.append(s)
    return qual, good, succ


def _lasso_into_cycle_actions(ts, prefix_steps, entry, proj, good):
    def pairs(s):
        for a, t in ts.succ(s):
            if a in proj:
                yield (a, t), t

    node, parents = _bfs_product([entry], pairs, lambda s: s in good)
    extend = _rebuild(parents, node)
    stem = Path(ts.initial, tuple(prefix_steps) + tuple(extend))
    g = node
    best = None
    for edge, t in pairs(g):
        if t == g:
            best = [edge]
            break
        node2, parents2 = _bfs_product([t], pairs, lambda s: s == g)
        if node2 is not None:
            cand = [edge] + _rebuild(parents2, node2)
            if best is None or len(cand) < len(best):
                best = cand
    return Lasso(stem, Path(g, tuple(best)))


def _find_periodic_match(ts, word, period, proj=None):
    """Tail-product search: a reachable cycle completing the period."""
    p = len(period)
    weak = proj is not None

    # phase 1: consume the finite word
    if weak:
        starts = [(ts.initial, 0)]
        moves = _action_moves(ts, word, proj)
    else:
        if not word or ts.label(ts.initial) != word[0]:
            return None
        starts = [(ts.initial, 1)]
        moves = _label_moves(ts, word)
    finish, parents = _match_word_phase(ts, word, moves, starts)
    if not finish:
        return None

    # tail product: (state, j) means the last consumed period letter is period[j]
    def tail_moves(node):
        s, j = node
        for a, t in ts.succ(s):
            if weak:
                if a in proj:
                    yield ((a, t), False), (t, j)
                elif a == period[(j + 1) % p]:
                    yield ((a, t), True), (t, (j + 1) % p)
            else:
                lab = ts.label(t)
                if lab == period[j]:
                    yield ((a, t), False), (t, j)
                elif lab == period[(j + 1) % p]:
                    yield ((a, t), True), (t, (j + 1) % p)

    # entries: first period letter consumed right after the word phase
    entries = {}
    for node in finish:
        s, _ = node
        for a, t in ts.succ(s):
            if weak:
                advance = a == period[0]
            else:
                advance = ts.label(t) == period[0]
            if advance:
                tn = (t, 0)
                entries.setdefault(tn, (node, (a, t)))
    if not entries:
        return None

    # explore the tail product
    tail_parents = {n: None for n in entries}
    queue = deque(entries)
    seen = set(entries)
    tail_edges = []
    while queue:
        node = queue.popleft()
        for (edge, advance), n2 in tail_moves(node):
            tail_edges.append((node, edge, advance, n2))
            if n2 not in seen:
                seen.add(n2)
                tail_parents[n2] = (node, edge)
                queue.append(n2)

    succ_map: dict = {}
    adv_edges = []
    for nn, edge, advance, n2 in tail_edges:
        succ_map.setdefault(nn, []).append(n2)
        if advance:
            adv_edges.append((nn, edge, n2))
    sccs = _sccs(sorted(seen), lambda n: succ_map.get(n, ()))
    scc_of = {}
    for k, scc in enumerate(sccs):
        for n in scc:
            scc_of[n] = k
    target_edge = None
    for nn, edge, n2 in adv_edges:
        if scc_of.get(nn) is not None and scc_of.get(nn) == scc_of.get(n2):
            target_edge = (nn, edge, n2)
            break
    if target_edge is None:
        return None
    src, edge, dst = target_edge
    scc = sccs[scc_of[src]]

    def scc_pairs(n):
        for (nn, e, _, n2) in tail_edges:
            if nn == n and n2 in scc:
                yield e, n2

    # product cycle: dst ~~> src, then the advancing edge back to dst
    if dst == src:
        cyc_steps = [edge]
    else:
        node2, parents2 = _bfs_product([dst], scc_pairs, lambda n: n == src)
        if node2 is None:
            return None
        cyc_steps = _rebuild(parents2, node2) + [edge]

    # stem: initial ~~> word finish ~~> entry of dst's representative, then to dst
    entry_node, entry_edge = entries[_first_entry_reaching(entries, dst, tail_parents)]
    word_steps = _rebuild(parents, entry_node)
    tail_path = _rebuild_tail(tail_parents, entries, dst)
    stem = Path(ts.initial, tuple(word_steps) + tuple(tail_path))
    return Lasso(stem, Path(dst[0], tuple(cyc_steps)))


def _first_entry_reaching(entries, node, tail_parents):
    cur = node
    while tail_parents[cur] is not None:
        cur = tail_parents[cur][0]
    return cur


def _rebuild_tail(tail_parents, entries, node):
    steps = []
    cur = node
    while tail_parents[cur] is not None:
        cur, edge = tail_parents[cur]
        steps.append(edge)
    steps.reverse()
    root_entry = entries[cur]
    return [root_entry[1]] + steps


# -- equivalence verdicts ----------------------------------------------------


def check_stutter_trace_equivalence(full, reduced, limits: EnumLimits = EnumLimits()) -> Verdict:
    """Bounded both-ways witness matching on no-stutter traces."""
    for w in _distinct(enumerate_complete_witnesses(full, limits), lambda w: w.nostut).values():
        if find_matching_complete_path(reduced, w.nostut) is None:
            return fails(direction="full->reduced", **witness_to_json(full, w))
    for w in _distinct(enumerate_complete_witnesses(reduced, limits), lambda w: w.nostut).values():
        if find_matching_complete_path(full, w.nostut) is None:
            return fails(direction="reduced->full", **witness_to_json(reduced, w))
    return bounded(**limits.to_json())


def check_weak_trace_equivalence(full, reduced, proj_set=None, limits: EnumLimits = EnumLimits()) -> Verdict:
    proj = frozenset(full.invisible if proj_set is None else proj_set)
    for w in _distinct(enumerate_complete_witnesses(full, limits, proj), lambda w: w.vis).values():
        if find_matching_complete_path(reduced, w.vis, proj) is None:
            return fails(direction="full->reduced", **witness_to_json(full, w))
    for w in _distinct(enumerate_complete_witnesses(reduced, limits, proj), lambda w: w.vis).values():
        if find_matching_complete_path(full, w.vis, proj) is None:
            return fails(direction="reduced->full", **witness_to_json(reduced, w))
    return bounded(**limits.to_json())


def _multiset_reach(reduced, start, goal, actions) -> bool:
    """Can `reduced` spend exactly the action multiset to walk start -> goal?"""
    seen = set()

    def key(s, ms):
        return (s, tuple(sorted(ms.items())))

    def rec(s, ms):
        if not +ms:
            return s == goal
        k = key(s, ms)
        if k in seen:
            return False
        seen.add(k)
        for a, t in reduced.succ(s):
            if ms[a] > 0:
                ms[a] -= 1
                if rec(t, ms):
                    return True
                ms[a] += 1
        return False

    return rec(start, Counter(actions))


def check_deadlock_preservation(full, reduced, limits: EnumLimits = EnumLimits()) -> Verdict:
    """Deadlock set agreement plus permuted-path reachability of deadlocks."""
    for s in reduced.state_ids():
        if full.is_deadlock(s) != reduced.is_deadlock(s):
            return fails(state=s, state_name=full.state_names[s], reason="deadlock status differs")
    for s0 in reduced.state_ids():
        done = set()
        for p in _deadlocking_paths_from(full, s0, limits):
            goal = (p.end, tuple(sorted(Counter(p.actions()).items())))
            if goal in done:
                continue
            done.add(goal)
            if not _multiset_reach(reduced, s0, p.end, p.actions()):
                return fails(
                    reason="deadlocking path lost",
                    start=s0,
                    path=path_to_json(p),
                    actions=[full.action_names[a] for a in p.actions()],
                    deadlock=p.end,
                )
    return bounded(**limits.to_json())


def _reachable_label_set(ts):
    seen = {ts.initial}
    queue = deque([ts.initial])
    labels = {ts.label(ts.initial)}
    while queue:
        s = queue.popleft()
        for _, t in ts.succ(s):
            if t not in seen:
                seen.add(t)
                labels.add(ts.label(t))
                queue.append(t)
    return labels


def check_reachable_labellings(full, reduced) -> Verdict:
    """Exact: the sets of reachable state labellings coincide."""
    lf = _reachable_label_set(full)
    lr = _reachable_label_set(reduced)
    if lf != lr:
        diff = sorted(lf ^ lr)
        mask = diff[0]
        where = "full" if mask in lf else "reduced"
        return fails(
            labelling=sorted(q for i, q in enumerate(full.prop_names) if mask >> i & 1),
            only_in=where,
        )
    return holds()


def check_consistent_labelling(ts, proj_set=None, limits: EnumLimits = EnumLimits()) -> Verdict:
    """Weak equivalence must imply stutter equivalence on complete witnesses."""
    proj = frozenset(ts.invisible if proj_set is None else proj_set)
    ws = list(
        _distinct(
            enumerate_complete_witnesses(ts, limits, proj),
            lambda w: (w.vis, w.nostut),
        ).values()
    )
    if len(ws) * len(ws) > limits.count:
        raise LimitsExceeded("too many witness pairs")
    for i in range(len(ws)):
        for j in range(i + 1, len(ws)):
            a, b = ws[i], ws[j]
            if a.vis == b.vis and a.nostut != b.nostut:
                return fails(
                    first=witness_to_json(ts, a),
                    second=witness_to_json(ts, b),
                )
    return bounded(**limits.to_json())


def detect_q_relapse(ts, q: str, limits: EnumLimits = EnumLimits()) -> bool:
    """Does some complete trace go q-true, then q-false, then q-true again?"""
    bit = 1 << list(ts.prop_names).index(q)
    for w in enumerate_complete_witnesses(ts, limits):
        seen_true = seen_true_false = False
        for letter in w.nostut.letters(laps=2):
            val = bool(letter & bit)
            if seen_true_false and val:
                return True
            if seen_true and not val:
                seen_true_false = True
            if val:
                seen_true = True
    return False
