"""Labelled state transition systems, paths, and canonical trace objects.

States carry atomic-proposition labels (stored as bitmasks over a proposition
table fixed at construction), transitions carry actions.  A declared set of
invisible actions under-approximates the actions that never change the state
labelling.  The two equivalences everything else in the package is judged by
live here: weak equivalence (equal visible-action projections) and stutter
equivalence (equal no-stutter traces).
"""

from __future__ import annotations

from dataclasses import dataclass, field

# Trace kinds.  Finite traces come from deadlocking paths; the two infinite
# kinds come from lassos (ultimately periodic paths).  Non-ultimately-periodic
# infinite paths are not representable, which suffices for finite systems.
FINITE = "finite"
EVENTUALLY_CONSTANT = "eventually-constant"
EVENTUALLY_EMPTY = "eventually-empty"
PERIODIC = "periodic"


@dataclass(frozen=True)
class NoStutterTrace:
    """Canonical state-label word of a path with adjacent repeats collapsed.

    ``word`` holds label bitmasks.  For PERIODIC traces the suffix repeats
    ``period`` forever; the representation is canonical (shortest prefix,
    primitive period), so equality of objects is equality of traces.
    """

    kind: str
    word: tuple[int, ...]
    period: tuple[int, ...] = ()

    def letters(self, laps: int = 2) -> tuple[int, ...]:
        """The word extended by `laps` copies of the period (for scanning)."""
        return self.word + self.period * laps


@dataclass(frozen=True)
class VisWord:
    """Canonical visible-action word of a path (invisible actions erased)."""

    kind: str
    word: tuple[int, ...]
    period: tuple[int, ...] = ()


@dataclass(frozen=True)
class Path:
    """A finite path: a start state and (action, target) steps."""

    start: int
    steps: tuple[tuple[int, int], ...] = ()

    @property
    def end(self) -> int:
        return self.steps[-1][1] if self.steps else self.start

    def states(self) -> tuple[int, ...]:
        return (self.start,) + tuple(t for _, t in self.steps)

    def actions(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def extended(self, action: int, target: int) -> "Path":
        return Path(self.start, self.steps + ((action, target),))


@dataclass(frozen=True)
class Lasso:
    """stem . cycle^omega — the finite representation of an infinite path."""

    stem: Path
    cycle: Path

    def __post_init__(self):
        if not self.cycle.steps:
            raise ValueError("lasso cycle must be nonempty")
        if self.cycle.start != self.stem.end or self.cycle.end != self.cycle.start:
            raise ValueError("lasso cycle must start and end at the stem's end")

    @property
    def start(self) -> int:
        return self.stem.start


class Lsts:
    """An explicit LSTS over dense integer state and action ids."""

    __slots__ = (
        "state_names",
        "action_names",
        "prop_names",
        "initial",
        "transitions",
        "labels",
        "invisible",
        "_succ",
    )

    def __init__(
        self,
        state_names,
        action_names,
        prop_names,
        initial,
        transitions,
        labels,
        invisible=(),
    ):
        self.state_names = tuple(state_names)
        self.action_names = tuple(action_names)
        self.prop_names = tuple(prop_names)
        self.initial = int(initial)
        self.transitions = tuple(sorted((int(s), int(a), int(t)) for s, a, t in transitions))
        self.labels = tuple(int(x) for x in labels)
        self.invisible = frozenset(int(a) for a in invisible)
        n, m, props = len(self.state_names), len(self.action_names), len(self.prop_names)
        if len(self.labels) != n:
            raise ValueError("one label set per state required")
        if not (0 <= self.initial < n):
            raise ValueError("initial state out of range")
        for s, a, t in self.transitions:
            if not (0 <= s < n and 0 <= t < n and 0 <= a < m):
                raise ValueError(f"transition ({s},{a},{t}) out of range")
        for lab in self.labels:
            if lab < 0 or lab >> props:
                raise ValueError("label bitmask outside the proposition table")
        for a in self.invisible:
            if not (0 <= a < m):
                raise ValueError("invisible action id out of range")
        succ: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for s, a, t in self.transitions:
            succ[s].append((a, t))
        self._succ = tuple(tuple(sorted(set(x))) for x in succ)

    # -- basic views ------------------------------------------------------

    @property
    def n_states(self) -> int:
        return len(self.state_names)

    @property
    def n_actions(self) -> int:
        return len(self.action_names)

    def state_ids(self):
        return range(self.n_states)

    def succ(self, s: int) -> tuple[tuple[int, int], ...]:
        return self._succ[s]

    def succ_by_action(self, s: int, a: int) -> tuple[int, ...]:
        return tuple(t for b, t in self._succ[s] if b == a)

    def has_edge(self, s: int, a: int, t: int) -> bool:
        return (a, t) in self._succ[s]

    def enabled(self, s: int) -> tuple[int, ...]:
        return tuple(sorted({a for a, _ in self._succ[s]}))

    def is_deadlock(self, s: int) -> bool:
        return not self._succ[s]

    def label(self, s: int) -> int:
        return self.labels[s]

    def label_names(self, s: int) -> tuple[str, ...]:
        lab = self.labels[s]
        return tuple(p for i, p in enumerate(self.prop_names) if lab >> i & 1)

    def label_mask(self, props) -> int:
        mask = 0
        for p in props:
            mask |= 1 << self.prop_names.index(p)
        return mask

    def visible_actions(self) -> frozenset[int]:
        return frozenset(range(self.n_actions)) - self.invisible

    def action_ids(self, names) -> frozenset[int]:
        return frozenset(self.action_names.index(x) for x in names)

    def state_id(self, name: str) -> int:
        return self.state_names.index(name)


# -- operations -----------------------------------------------------------


def enabled_actions(lsts: Lsts, s: int) -> tuple[int, ...]:
    """Actions with an outgoing transition at s, sorted; empty iff deadlock."""
    if not (0 <= s < lsts.n_states):
        raise ValueError(f"unknown state id {s}")
    return lsts.enabled(s)


def check_path(lsts: Lsts, p: Path | Lasso) -> None:
    """Raise ValueError unless p respects the transition relation."""
    if isinstance(p, Lasso):
        check_path(lsts, p.stem)
        check_path(lsts, p.cycle)
        return
    cur = p.start
    if not (0 <= cur < lsts.n_states):
        raise ValueError(f"unknown state id {cur}")
    for a, t in p.steps:
        if not lsts.has_edge(cur, a, t):
            raise ValueError(f"malformed path: no transition ({cur},{a},{t})")
        cur = t


def _primitive_root(word: tuple) -> tuple:
    n = len(word)
    for k in range(1, n + 1):
        if n % k == 0 and word == word[: k] * (n // k):
            return word[:k]
    return word


def _roll(prefix: tuple, period: tuple) -> tuple[tuple, tuple]:
    # Shortest-prefix normal form of prefix . period^omega.
    prefix, period = list(prefix), list(period)
    while prefix and prefix[-1] == period[-1]:
        prefix.pop()
        period = [period[-1]] + period[:-1]
    return tuple(prefix), tuple(period)


def _collapse(seq) -> tuple:
    out = []
    for x in seq:
        if not out or out[-1] != x:
            out.append(x)
    return tuple(out)


def _emit(seq, last):
    out = []
    for x in seq:
        if x != last:
            out.append(x)
            last = x
    return out, last


def canonical_omega_word(prefix, period, kind_empty: str):
    """Canonical (kind, word, period) for the action word prefix.period^omega."""
    prefix, period = tuple(prefix), tuple(period)
    if not period:
        return kind_empty, prefix, ()
    word, per = _roll(prefix, _primitive_root(period))
    return PERIODIC, word, per


def vis_projection(word_or_path, proj_set) -> VisWord:
    """Erase the actions in proj_set; lassos yield canonical infinite words."""
    proj_set = frozenset(proj_set)
    if isinstance(word_or_path, Lasso):
        stem = [a for a in word_or_path.stem.actions() if a not in proj_set]
        cyc = [a for a in word_or_path.cycle.actions() if a not in proj_set]
        kind, word, per = canonical_omega_word(stem, cyc, EVENTUALLY_EMPTY)
        return VisWord(kind, word, per)
    if isinstance(word_or_path, Path):
        word_or_path = word_or_path.actions()
    return VisWord(FINITE, tuple(a for a in word_or_path if a not in proj_set))


def nostut_trace(lsts: Lsts, p: Path | Lasso) -> NoStutterTrace:
    """Collapse the label sequence of p into its canonical no-stutter trace."""
    check_path(lsts, p)
    if isinstance(p, Path):
        return NoStutterTrace(FINITE, _collapse(lsts.label(s) for s in p.states()))
    stem_labels = [lsts.label(s) for s in p.stem.states()]
    cycle_labels = [lsts.label(t) for _, t in p.cycle.steps]
    word = list(_collapse(stem_labels))
    em1, last = _emit(cycle_labels, word[-1])
    em2, _ = _emit(cycle_labels, last)
    if not em2:
        return NoStutterTrace(EVENTUALLY_CONSTANT, tuple(word + em1))
    w, per = _roll(tuple(word + em1), _primitive_root(tuple(em2)))
    return NoStutterTrace(PERIODIC, w, per)


def weak_equivalent(p1, p2, proj_set) -> bool:
    """Both finite or both infinite, with equal visible projections."""
    if isinstance(p1, Lasso) != isinstance(p2, Lasso):
        return False
    return vis_projection(p1, proj_set) == vis_projection(p2, proj_set)


def stutter_equivalent(lsts: Lsts, p1, p2) -> bool:
    """Both finite or both infinite, with equal no-stutter traces."""
    if isinstance(p1, Lasso) != isinstance(p2, Lasso):
        return False
    return nostut_trace(lsts, p1) == nostut_trace(lsts, p2)


def is_deterministic(lsts: Lsts) -> bool:
    for s in lsts.state_ids():
        seen = {}
        for a, t in lsts.succ(s):
            if seen.setdefault(a, t) != t:
                return False
    return True


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    witness: tuple


def validate_lsts(lsts: Lsts) -> list[Violation]:
    """Invariant report; the interesting check is invisible-set soundness.

    A declared-invisible action must never change the state labelling;
    declaring fewer actions invisible than possible is always allowed.
    """
    out = []
    for s, a, t in lsts.transitions:
        if a in lsts.invisible and lsts.label(s) != lsts.label(t):
            out.append(
                Violation(
                    "invisible-unsound",
                    f"invisible action {lsts.action_names[a]} changes the labelling "
                    f"on {lsts.state_names[s]} -> {lsts.state_names[t]}",
                    (s, a, t),
                )
            )
    return out


# -- JSON interchange ------------------------------------------------------


def lsts_to_json(lsts: Lsts) -> dict:
    return {
        "props": list(lsts.prop_names),
        "states": [
            {"id": s, "name": lsts.state_names[s], "labels": list(lsts.label_names(s))}
            for s in lsts.state_ids()
        ],
        "actions": [
            {"id": a, "name": lsts.action_names[a], "invisible": a in lsts.invisible}
            for a in range(lsts.n_actions)
        ],
        "initial": lsts.initial,
        "transitions": [list(tr) for tr in lsts.transitions],
    }


def lsts_from_json(doc: dict) -> Lsts:
    states = sorted(doc["states"], key=lambda x: x["id"])
    actions = sorted(doc["actions"], key=lambda x: x["id"])
    if [s["id"] for s in states] != list(range(len(states))):
        raise ValueError("state ids must be dense, starting at 0")
    if [a["id"] for a in actions] != list(range(len(actions))):
        raise ValueError("action ids must be dense, starting at 0")
    props = doc.get("props")
    if props is None:
        props = sorted({q for s in states for q in s.get("labels", ())})
    prop_idx = {q: i for i, q in enumerate(props)}
    labels = []
    for s in states:
        mask = 0
        for q in s.get("labels", ()):
            if q not in prop_idx:
                raise ValueError(f"label {q!r} missing from the proposition table")
            mask |= 1 << prop_idx[q]
        labels.append(mask)
    return Lsts(
        state_names=[s.get("name", str(s["id"])) for s in states],
        action_names=[a["name"] for a in actions],
        prop_names=props,
        initial=doc["initial"],
        transitions=[tuple(tr) for tr in doc["transitions"]],
        labels=labels,
        invisible=[a["id"] for a in actions if a.get("invisible")],
    )
