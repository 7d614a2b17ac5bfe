"""Atomic propositions over markings and the invisibility classifier.

Three proposition shapes: linear (integer combination of places, no constant
term), polynomial (sparse multivariate integer polynomial), and arbitrary
(explicit truth table plus default).  The classifier decides, per structural
transition, the eight invisibility notions spanned by three orthogonal flags:

  reach  — compare only pairs of reachable markings;
  strong — use the pure displacement relation m' = m + d instead of firings;
  value  — compare polynomial values instead of truth values.

Exact decisions where possible (reachable enumeration; a shift-difference
polynomial vanishing identically, on the enabling cone for non-strong value
checks); a bounded marking-box scan otherwise.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass

from .verdict import Verdict, bounded, fails, holds

Monomial = frozenset  # of (place name, positive exponent) pairs

CMP = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
    "=": operator.eq,
    "!=": operator.ne,
}


class MultiPoly:
    """Sparse multivariate polynomial with arbitrary-precision integer coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for mono, coef in (terms or {}).items():
            if coef == 0:
                continue
            mono = frozenset((v, e) for v, e in mono if e != 0)
            clean[mono] = clean.get(mono, 0) + coef
        self.terms = {m: c for m, c in clean.items() if c != 0}

    @staticmethod
    def const(c: int) -> "MultiPoly":
        return MultiPoly({frozenset(): int(c)})

    @staticmethod
    def var(name: str) -> "MultiPoly":
        return MultiPoly({frozenset([(name, 1)]): 1})

    @staticmethod
    def linear(coeffs) -> "MultiPoly":
        return MultiPoly({frozenset([(v, 1)]): c for v, c in coeffs.items()})

    def __eq__(self, other):
        return isinstance(other, MultiPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.const(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return MultiPoly(out)

    def __neg__(self):
        return MultiPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.const(other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.const(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            e1 = dict(m1)
            for m2, c2 in other.terms.items():
                e = dict(e1)
                for v, k in m2:
                    e[v] = e.get(v, 0) + k
                mono = frozenset(e.items())
                out[mono] = out.get(mono, 0) + c1 * c2
        return MultiPoly(out)

    __rmul__ = __mul__
    __radd__ = __add__

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def constant_value(self):
        """The constant c if the polynomial is identically c, else None."""
        if not self.terms:
            return 0
        if len(self.terms) == 1 and frozenset() in self.terms:
            return self.terms[frozenset()]
        return None

    def support(self) -> tuple[str, ...]:
        return tuple(sorted({v for m in self.terms for v, _ in m}))

    def degree_in(self, var: str) -> int:
        return max((dict(m).get(var, 0) for m in self.terms), default=0)

    def eval(self, point) -> int:
        total = 0
        for mono, coef in self.terms.items():
            val = coef
            for v, e in mono:
                if v not in point:
                    raise ValueError(f"missing place {v!r} in evaluation point")
                val *= point[v] ** e
            total += val
        return total

    def shift(self, delta) -> "MultiPoly":
        """Substitute every variable v by (v + delta.get(v, 0))."""
        out = MultiPoly()
        for mono, coef in self.terms.items():
            term = MultiPoly.const(coef)
            for v, e in mono:
                base = MultiPoly.var(v) + MultiPoly.const(delta.get(v, 0))
                for _ in range(e):
                    term = term * base
            out = out + term
        return out

    def to_json(self) -> list:
        return [
            {"coef": c, "vars": {v: e for v, e in sorted(m)}}
            for m, c in sorted(self.terms.items(), key=lambda kv: sorted(kv[0]))
        ]

    @staticmethod
    def from_json(doc) -> "MultiPoly":
        return MultiPoly(
            {frozenset(t.get("vars", {}).items()): t["coef"] for t in doc}
        )

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items(), key=lambda kv: sorted(kv[0])):
            body = "*".join(v if e == 1 else f"{v}^{e}" for v, e in sorted(m))
            parts.append(f"{c}" if not body else f"{c}*{body}")
        return " + ".join(parts)


def poly_eval(poly: MultiPoly, point) -> int:
    return poly.eval(point)


def shift_difference(poly: MultiPoly, delta) -> MultiPoly:
    """g(x) = f(x + c) - f(x); identically zero iff f is constant in direction c."""
    return poly.shift(delta) - poly


def _marking_key(marking) -> Monomial:
    return frozenset((p, n) for p, n in marking.items() if n)


LINEAR = "linear"
POLYNOMIAL = "polynomial"
ARBITRARY = "arbitrary"


@dataclass(frozen=True)
class AtomicProp:
    """A named proposition over markings: linear, polynomial, or arbitrary."""

    name: str
    kind: str
    poly: MultiPoly | None = None
    cmp: str | None = None
    k: int | None = None
    table: frozenset | None = None  # of (marking key, bool) pairs
    default: bool | None = None

    @staticmethod
    def make_linear(name, coeffs, cmp, k) -> "AtomicProp":
        poly = MultiPoly.linear(coeffs)
        if frozenset() in poly.terms:
            raise ValueError("linear propositions have no constant term")
        if cmp not in CMP:
            raise ValueError(f"unknown comparison {cmp!r}")
        return AtomicProp(name, LINEAR, poly=poly, cmp=cmp, k=int(k))

    @staticmethod
    def make_polynomial(name, poly, cmp, k) -> "AtomicProp":
        if cmp not in CMP:
            raise ValueError(f"unknown comparison {cmp!r}")
        return AtomicProp(name, POLYNOMIAL, poly=poly, cmp=cmp, k=int(k))

    @staticmethod
    def make_arbitrary(name, rows, default=None) -> "AtomicProp":
        table = frozenset((_marking_key(m), bool(v)) for m, v in rows)
        return AtomicProp(name, ARBITRARY, table=table, default=default)

    @property
    def is_polynomial(self) -> bool:
        return self.kind in (LINEAR, POLYNOMIAL)

    def value(self, marking) -> int:
        if not self.is_polynomial:
            raise ValueError(f"{self.name} has no polynomial value")
        return self.poly.eval(marking)

    def eval(self, marking) -> bool:
        if self.is_polynomial:
            return CMP[self.cmp](self.poly.eval(marking), self.k)
        key = _marking_key(marking)
        for k, v in self.table:
            if k == key:
                return v
        if self.default is None:
            raise ValueError(f"{self.name}: marking outside the table, no default")
        return self.default

    def to_json(self) -> dict:
        if self.kind == LINEAR:
            coeffs = {}
            for mono, c in self.poly.terms.items():
                ((v, _),) = tuple(mono)
                coeffs[v] = c
            return {"id": self.name, "kind": LINEAR, "coeffs": coeffs, "cmp": self.cmp, "k": self.k}
        if self.kind == POLYNOMIAL:
            return {
                "id": self.name,
                "kind": POLYNOMIAL,
                "monomials": self.poly.to_json(),
                "cmp": self.cmp,
                "k": self.k,
            }
        rows = sorted(
            ({p: n for p, n in sorted(key)}, val) for key, val in self.table
        )
        return {
            "id": self.name,
            "kind": ARBITRARY,
            "rows": [{"marking": m, "value": v} for m, v in rows],
            "default": self.default,
        }

    @staticmethod
    def from_json(doc) -> "AtomicProp":
        kind = doc["kind"]
        if kind == LINEAR:
            return AtomicProp.make_linear(doc["id"], doc["coeffs"], doc["cmp"], doc["k"])
        if kind == POLYNOMIAL:
            poly = MultiPoly.from_json(doc["monomials"])
            return AtomicProp.make_polynomial(doc["id"], poly, doc["cmp"], doc["k"])
        if kind == ARBITRARY:
            rows = [(r["marking"], r["value"]) for r in doc.get("rows", ())]
            return AtomicProp.make_arbitrary(doc["id"], rows, doc.get("default"))
        raise ValueError(f"unknown proposition kind {kind!r}")


def eval_prop(prop: AtomicProp, marking) -> bool:
    return prop.eval(marking)


def encode_fireable(net, t: int) -> AtomicProp:
    """A polynomial proposition true exactly on the markings enabling t.

    Product over input places of p (p-1) ... (p-(w-1)) >= 1: any place short of
    its required tokens contributes a zero factor, and all factors are >= 1
    once every requirement is met.
    """
    poly = MultiPoly.const(1)
    for p, w in net.inputs(t):
        var = MultiPoly.var(net.place_names[p])
        for i in range(w):
            poly = poly * (var - MultiPoly.const(i))
    return AtomicProp.make_polynomial(f"fireable_{net.transition_names[t]}", poly, ">=", 1)


@dataclass(frozen=True)
class InvisibilityFlags:
    """Selector for the eight-point lattice of invisibility notions."""

    reach: bool = False
    strong: bool = False
    value: bool = False

    @staticmethod
    def parse(text: str) -> "InvisibilityFlags":
        names = {x.strip() for x in text.replace("+", ",").split(",") if x.strip()}
        names.discard("plain")
        unknown = names - {"reach", "strong", "value"}
        if unknown:
            raise ValueError(f"unknown invisibility flags {sorted(unknown)}")
        return InvisibilityFlags("reach" in names, "strong" in names, "value" in names)

    def label(self) -> str:
        parts = [n for n in ("reach", "strong", "value") if getattr(self, n)]
        return "+".join(parts) if parts else "plain"

    def weaker_or_equal(self, other: "InvisibilityFlags") -> bool:
        """True when any transition invisible under `other` is invisible here."""
        return self.reach >= other.reach and self.strong <= other.strong and self.value <= other.value


PLAIN = InvisibilityFlags()


def _truth_cmp(prop):
    def same(m1, m2):
        return prop.eval(m1) == prop.eval(m2)

    return same


def _value_cmp(prop):
    def same(m1, m2):
        return prop.poly.eval(m1) == prop.poly.eval(m2)

    return same


def classify_invisibility(net, prop, t, flags=PLAIN, box_bound=6, state_cap=200000) -> Verdict:
    """Decide q-invisibility of structural transition t under `flags`.

    Exact where the flag combination allows (reach: reachable enumeration;
    value on polynomial props: shift-difference identically zero, restricted
    to the enabling cone unless strong); bounded box scan of relevant places
    otherwise.  Fails verdicts carry a concrete marking pair.
    """
    d = net.delta(t)
    d_dict = {net.place_names[i]: dx for i, dx in enumerate(d) if dx}
    use_value = bool(flags.value and prop.is_polynomial)
    same = _value_cmp(prop) if use_value else _truth_cmp(prop)

    def as_dict(m):
        return net.marking_dict(m)

    def pair(m):
        if flags.strong:
            m2 = tuple(x + dx for x, dx in zip(m, d))
            return m2 if min(m2) >= 0 else None
        return net.fire(m, t) if net.t_enabled(m, t) else None

    def witness(m, m2):
        return {
            "transition": net.transition_names[t],
            "pair": [as_dict(m), as_dict(m2)],
            "compared": "value" if use_value else "truth",
        }

    if flags.reach:
        markings = net.reachable(state_cap)
        reach_set = set(markings)
        for m in markings:
            m2 = pair(m)
            if m2 is None or (flags.strong and m2 not in reach_set):
                continue
            if not same(as_dict(m), as_dict(m2)):
                return fails(**witness(m, m2))
        return holds()

    if use_value:
        g = shift_difference(prop.poly, d_dict)
        if not flags.strong:
            # Vanishing on the enabling cone {m >= W(.,t)} is equivalent to the
            # substituted polynomial vanishing on all of N^P.
            base = {net.place_names[p]: w for p, w in net.inputs(t)}
            g = g.shift(base)
        if g.is_zero:
            return holds()
        m, m2 = _find_pair_witness(net, t, d, same, flags.strong, box_bound, state_cap, g)
        return fails(**witness(m, m2))

    found = _scan_pairs(net, t, d, same, flags.strong, box_bound, state_cap, prop)
    if found is not None:
        return fails(**witness(*found))
    return bounded(box=box_bound, places=_relevant_places(net, t, d, prop))


def _relevant_places(net, t, d, prop) -> list[str]:
    names = set(prop.poly.support()) if prop.is_polynomial else set(net.place_names)
    if prop.kind == ARBITRARY:
        names = set()
        for key, _ in prop.table:
            names |= {p for p, _ in key}
    names |= {net.place_names[p] for p, _ in net.inputs(t)}
    names |= {net.place_names[i] for i, dx in enumerate(d) if dx}
    return sorted(names & set(net.place_names))


def _scan_pairs(net, t, d, same, strong, box_bound, state_cap, prop):
    """First violating pair: reachable markings in id order, then a box scan."""
    from itertools import product

    for m in net.reachable(state_cap):
        m2 = _box_pair(m, d, t, net, strong)
        if m2 is not None and not same(net.marking_dict(m), net.marking_dict(m2)):
            return m, m2
    relevant = _relevant_places(net, t, d, prop)
    idx = [net.place_names.index(p) for p in relevant]
    floor = _floor_marking(net, t, d, strong)
    ranges = [range(floor[i], floor[i] + box_bound + 1) for i in idx]
    for combo in product(*ranges):
        m = list(floor)
        for i, v in zip(idx, combo):
            m[i] = v
        m = tuple(m)
        m2 = _box_pair(m, d, t, net, strong)
        if m2 is not None and not same(net.marking_dict(m), net.marking_dict(m2)):
            return m, m2
    return None


def _find_pair_witness(net, t, d, same, strong, box_bound, state_cap, g):
    """A concrete differing pair for a nonzero shift-difference polynomial."""
    # A nonzero polynomial cannot vanish on a grid wider than its per-variable
    # degree, so widen the box far enough to guarantee a witness.
    bound = max(box_bound, max((g.degree_in(v) for v in g.support()), default=0) + 1)
    found = _scan_pairs(net, t, d, same, strong, bound, state_cap, _PolyProbe(g))
    if found is None:
        raise AssertionError("nonzero shift difference must have a box witness")
    return found


class _PolyProbe:
    """Adapter handing a raw polynomial's support to the relevant-place scan."""

    def __init__(self, poly):
        self.poly = poly
        self.is_polynomial = True
        self.kind = POLYNOMIAL


def _floor_marking(net, t, d, strong):
    floor = [0] * net.n_places
    if strong:
        for i, dx in enumerate(d):
            floor[i] = max(0, -dx)
    else:
        for p, w in net.inputs(t):
            floor[p] = w
    return tuple(floor)


def _box_pair(m, d, t, net, strong):
    if strong:
        m2 = tuple(x + dx for x, dx in zip(m, d))
        return m2 if min(m2) >= 0 else None
    return net.fire(m, t) if net.t_enabled(m, t) else None
