"""Completing a drawn partial frame ("sketch") under the Veltman laws and,
optionally, the M and P frame conditions read as production rules.

The fixpoint is computed semi-naively: each round only fires rule instances
that use at least one fact derived in the previous round.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from .errors import UsageError
from .semantics import Frame, loads


class CycleError(UsageError):
    """The closure has an R-cycle, so no Veltman frame extends the sketch."""

    def __init__(self, cycle: tuple[str, ...]):
        self.cycle = cycle
        super().__init__(f"closure has an R-cycle: {' R '.join(cycle)}")


@dataclass(frozen=True)
class Sketch:
    worlds: tuple[str, ...]
    r_facts: frozenset = frozenset()
    s_facts: frozenset = frozenset()  # (base, from, to)

    def __post_init__(self):
        object.__setattr__(self, "worlds", tuple(self.worlds))
        object.__setattr__(self, "r_facts", frozenset(map(tuple, self.r_facts)))
        object.__setattr__(self, "s_facts", frozenset(map(tuple, self.s_facts)))
        if len(set(self.worlds)) != len(self.worlds):
            raise UsageError("world names must be distinct")
        names = set(self.worlds)
        for fact in (*self.r_facts, *self.s_facts):
            if not set(fact) <= names:
                raise UsageError(f"fact {fact} mentions an undeclared world")

    @classmethod
    def from_frame(cls, fr: Frame) -> "Sketch":
        return cls(fr.worlds, fr.r, {(w, a, b) for w in fr.worlds for a, b in fr.s[w]})


@dataclass(frozen=True)
class RuleSet:
    m_rule: bool = False
    p_rule: bool = False

    @classmethod
    def parse(cls, text: str) -> "RuleSet":
        text = text.strip().lower()
        if text not in ("none", "m", "p", "mp", "pm", ""):
            raise UsageError(f"rules must be one of none, m, p, mp; got {text!r}")
        return cls(m_rule="m" in text, p_rule="p" in text)

    def __str__(self):
        return "".join(k for k, on in (("m", self.m_rule), ("p", self.p_rule)) if on) or "none"


@dataclass
class _Rel:
    """R-pairs and S-triples with the indexes the joins need."""

    r: set = field(default_factory=set)
    s: set = field(default_factory=set)
    r_out: dict = field(default_factory=lambda: defaultdict(set))   # a -> {b : aRb}
    r_in: dict = field(default_factory=lambda: defaultdict(set))    # b -> {a : aRb}
    s_out: dict = field(default_factory=lambda: defaultdict(set))   # (w, a) -> {b}
    s_in: dict = field(default_factory=lambda: defaultdict(set))    # (w, b) -> {a}
    s_to: dict = field(default_factory=lambda: defaultdict(set))    # b -> {(w, a)}

    def add_r(self, a, b):
        self.r.add((a, b))
        self.r_out[a].add(b)
        self.r_in[b].add(a)

    def add_s(self, w, a, b):
        self.s.add((w, a, b))
        self.s_out[(w, a)].add(b)
        self.s_in[(w, b)].add(a)
        self.s_to[b].add((w, a))


def _fire(full: _Rel, dr: set, ds: set, rules: RuleSet):
    """Consequences of rule instances that use at least one delta fact."""
    new_r: set = set()
    new_s: set = set()
    for a, b in dr:
        # (i) transitivity, delta in either premise
        new_r.update((a, c) for c in full.r_out[b])
        new_r.update((z, b) for z in full.r_in[a])
        # (iii) S-reflexivity: wRa => a S_w a
        new_s.add((a, b, b))
        # (iv) law 3: wRa and aRb => a S_w b
        new_s.update((w, a, b) for w in full.r_in[a])   # delta is aRb
        new_s.update((a, b, c) for c in full.r_out[b])  # delta is wRa (w=a, a=b)
    for w, a, b in ds:
        # (ii) membership repair
        new_r.add((w, a))
        new_r.add((w, b))
        # (v) S-transitivity, delta in either premise
        new_s.update((w, a, c) for c in full.s_out[(w, b)])
        new_s.update((w, z, b) for z in full.s_in[(w, a)])
    if rules.m_rule:
        # (vi) xRy, y S_x z, z R u => yRu
        for x, y in dr:
            for z in full.s_out[(x, y)]:
                new_r.update((y, u) for u in full.r_out[z])
        for x, y, z in ds:
            if (x, y) in full.r:
                new_r.update((y, u) for u in full.r_out[z])
        for z, u in dr:
            new_r.update((y, u) for x, y in full.s_to[z] if (x, y) in full.r)
    if rules.p_rule:
        # (vii) xRy, yRz, z S_x u => z S_y u
        for x, y in dr:
            for z in full.r_out[y]:
                new_s.update((y, z, u) for u in full.s_out[(x, z)])
        for y, z in dr:
            for x in full.r_in[y]:
                new_s.update((y, z, u) for u in full.s_out[(x, z)])
        for x, z, u in ds:
            for y in full.r_in[z]:
                if (x, y) in full.r:
                    new_s.add((y, z, u))
    return new_r - full.r, new_s - full.s


def close(sk: Sketch, rules: RuleSet = RuleSet()) -> Frame:
    """Least fixpoint of the closure productions; raise :class:`CycleError` on an R-cycle."""
    full = _Rel()
    dr = set(sk.r_facts)
    ds = set(sk.s_facts)
    while dr or ds:
        for a, b in dr:
            full.add_r(a, b)
        for w, a, b in ds:
            full.add_s(w, a, b)
        dr, ds = _fire(full, dr, ds, rules)
    loops = [a for a in sk.worlds if (a, a) in full.r]
    if loops:
        a = loops[0]
        on_cycle = [b for b in sk.worlds if (a, b) in full.r and (b, a) in full.r and b != a]
        raise CycleError((a, *on_cycle, a))
    s = defaultdict(set)
    for w, a, b in full.s:
        s[w].add((a, b))
    return Frame(sk.worlds, full.r, dict(s))


def holds_in_closure(sk: Sketch, rules: RuleSet, query: str) -> bool:
    """Evaluate ``r a b``, ``s w a b`` or ``exists-mid a b`` on the closed frame."""
    fr = close(sk, rules)
    return query_frame(fr, query)


def mid_witnesses(fr: Frame, a: str, b: str) -> list[str]:
    return [w for w in fr.worlds if (a, w) in fr.r and (w, b) in fr.r]


def query_frame(fr: Frame, query: str) -> bool:
    tok = query.split()
    if not tok:
        raise UsageError("empty query")
    kind, args = tok[0], tok[1:]
    want = {"r": 2, "s": 3, "exists-mid": 2}.get(kind)
    if want is None:
        raise UsageError(f"unknown query kind {kind!r}; use r, s or exists-mid")
    if len(args) != want:
        raise UsageError(f"query '{kind}' takes {want} world names")
    for w in args:
        if w not in fr.index:
            raise UsageError(f"unknown world {w!r} in query")
    if kind == "r":
        return tuple(args) in fr.r
    if kind == "s":
        return (args[1], args[2]) in fr.s[args[0]]
    return bool(mid_witnesses(fr, *args))


def loads_sketch(text: str) -> Sketch:
    _, worlds, r, s, _ = loads(text, kinds=("sketch",))
    return Sketch(tuple(worlds), r, {(w, a, b) for w, pairs in s.items() for a, b in pairs})


def load_sketch(path) -> Sketch:
    with open(path, encoding="utf-8") as fh:
        return loads_sketch(fh.read())


def contained_in(small: Frame, big: Frame) -> bool:
    """Componentwise inclusion of R and every S_w."""
    return small.r <= big.r and all(small.s[w] <= big.s[w] for w in small.worlds)
