"""Finite Veltman frames and models, the forcing relation, and frame validity.

Truth sets are computed as integer bitmasks over the worlds of a frame, so a
whole formula is evaluated at every world in one recursive pass.
"""
from __future__ import annotations

import enum
import itertools
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence, Union

from .errors import ResourceError, UsageError
from .formula import (
    And, Atom, Bot, Box, Dia, Formula, Iff, Imp, Not, Or, Rhd, Top, as_formula, atoms,
)

DEFAULT_BUDGET = 2 ** 24


def valuation_budget() -> int:
    """The valuation budget, overridable through the ``IL_BUDGET`` environment variable."""
    raw = os.environ.get("IL_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw, 0)
    except ValueError:
        raise UsageError(f"IL_BUDGET must be an integer, got {raw!r}") from None
    if value < 1:
        raise UsageError("IL_BUDGET must be positive")
    return value


class Law(str, enum.Enum):
    R_TRANSITIVE = "r-transitive"
    R_ACYCLIC = "r-acyclic"
    S_DOMAIN = "s-domain"            # S_w within w-up x w-up
    R_IN_S = "r-in-s"                # R restricted to w-up inside S_w
    S_REFLEXIVE = "s-reflexive"      # on w-up
    S_TRANSITIVE = "s-transitive"
    VALUATION_RANGE = "valuation-range"


class Violation(NamedTuple):
    law: Law
    witness: tuple

    def __str__(self):
        return f"{self.law.value}: {' '.join(map(str, self.witness))}"


@dataclass(frozen=True, eq=False)
class Frame:
    """A finite frame: ordered worlds, a relation R, and one relation S_w per world.

    Construction stores exactly what it is given; use :func:`validate` to check
    the Veltman laws.
    """

    worlds: tuple[str, ...]
    r: frozenset[tuple[str, str]]
    s: Mapping[str, frozenset[tuple[str, str]]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "worlds", tuple(self.worlds))
        object.__setattr__(self, "r", frozenset(map(tuple, self.r)))
        s = {w: frozenset(map(tuple, self.s.get(w, ()))) for w in self.worlds}
        extra = set(self.s) - set(self.worlds)
        if extra:
            raise UsageError(f"S given for unknown worlds: {sorted(extra)}")
        object.__setattr__(self, "s", s)
        if len(set(self.worlds)) != len(self.worlds):
            raise UsageError("world names must be distinct")
        names = set(self.worlds)
        for a, b in self.r:
            if a not in names or b not in names:
                raise UsageError(f"R pair ({a}, {b}) mentions an unknown world")
        for w, pairs in s.items():
            for a, b in pairs:
                if a not in names or b not in names:
                    raise UsageError(f"S_{w} pair ({a}, {b}) mentions an unknown world")

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return (self.worlds, self.r, self.s) == (other.worlds, other.r, other.s)

    def __hash__(self):
        return hash((self.worlds, self.r, tuple(self.s[w] for w in self.worlds)))

    def __len__(self):
        return len(self.worlds)

    def up(self, w: str) -> set[str]:
        return {b for a, b in self.r if a == w}

    @cached_property
    def index(self) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.worlds)}

    @cached_property
    def up_masks(self) -> tuple[int, ...]:
        """Bitmask of R-successors, per world index."""
        masks = [0] * len(self.worlds)
        for a, b in self.r:
            masks[self.index[a]] |= 1 << self.index[b]
        return tuple(masks)

    @cached_property
    def s_masks(self) -> tuple[tuple[int, ...], ...]:
        """``s_masks[w][u]`` is the bitmask of worlds v with u S_w v."""
        n = len(self.worlds)
        out = []
        for w in self.worlds:
            row = [0] * n
            for a, b in self.s[w]:
                row[self.index[a]] |= 1 << self.index[b]
            out.append(tuple(row))
        return tuple(out)

    @cached_property
    def violations(self) -> list[Violation]:
        return _frame_violations(self)

    def rename(self, mapping: Mapping[str, str]) -> "Frame":
        return Frame(
            tuple(mapping[w] for w in self.worlds),
            {(mapping[a], mapping[b]) for a, b in self.r},
            {mapping[w]: {(mapping[a], mapping[b]) for a, b in p} for w, p in self.s.items()},
        )


@dataclass(frozen=True, eq=False)
class Model:
    frame: Frame
    valuation: Mapping[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self, "valuation", {p: frozenset(ws) for p, ws in self.valuation.items()}
        )

    def __eq__(self, other):
        if not isinstance(other, Model):
            return NotImplemented
        return self.frame == other.frame and self.valuation == other.valuation

    __hash__ = None

    @cached_property
    def violations(self) -> list[Violation]:
        out = list(self.frame.violations)
        names = set(self.frame.worlds)
        for p in sorted(self.valuation):
            for w in sorted(self.valuation[p] - names):
                out.append(Violation(Law.VALUATION_RANGE, (p, w)))
        return out

    def masks(self) -> dict[str, int]:
        idx = self.frame.index
        return {
            p: sum(1 << idx[w] for w in ws if w in idx) for p, ws in self.valuation.items()
        }


def _transitive_closure(worlds: Sequence[str], pairs: Iterable[tuple[str, str]]):
    reach = {w: set() for w in worlds}
    for a, b in pairs:
        reach[a].add(b)
    for k in worlds:
        for i in worlds:
            if k in reach[i]:
                reach[i] |= reach[k]
    return reach


def _frame_violations(fr: Frame) -> list[Violation]:
    out: list[Violation] = []
    worlds = fr.worlds
    r = fr.r
    succ = {w: sorted(fr.up(w), key=fr.index.get) for w in worlds}
    for a in worlds:
        for b in succ[a]:
            for c in succ[b]:
                if (a, c) not in r:
                    out.append(Violation(Law.R_TRANSITIVE, (a, b, c)))
    reach = _transitive_closure(worlds, r)
    for a in worlds:
        if a in reach[a]:
            out.append(Violation(Law.R_ACYCLIC, _cycle_through(a, succ, fr.index)))
    for w in worlds:
        up = set(succ[w])
        sw = fr.s[w]
        for a, b in sorted(sw, key=lambda p: (fr.index[p[0]], fr.index[p[1]])):
            if a not in up or b not in up:
                out.append(Violation(Law.S_DOMAIN, (w, a, b)))
        for a in succ[w]:
            for b in succ[a]:
                if b in up and (a, b) not in sw:
                    out.append(Violation(Law.R_IN_S, (w, a, b)))
        for a in succ[w]:
            if (a, a) not in sw:
                out.append(Violation(Law.S_REFLEXIVE, (w, a)))
        s_succ: dict[str, set[str]] = {}
        for a, b in sw:
            s_succ.setdefault(a, set()).add(b)
        for a in worlds:
            for b in sorted(s_succ.get(a, ()), key=fr.index.get):
                for c in sorted(s_succ.get(b, ()), key=fr.index.get):
                    if (a, c) not in sw:
                        out.append(Violation(Law.S_TRANSITIVE, (w, a, b, c)))
    return out


def _cycle_through(start, succ, index):
    """Shortest R-path from *start* back to itself, as a tuple of worlds."""
    parent = {}
    frontier = [start]
    seen = set()
    while frontier:
        nxt = []
        for a in frontier:
            for b in succ[a]:
                if b == start:
                    path = [a]
                    while path[-1] != start:
                        path.append(parent[path[-1]])
                    return tuple(reversed(path)) + (start,)
                if b not in seen:
                    seen.add(b)
                    parent[b] = a
                    nxt.append(b)
        frontier = nxt
    return (start,)


def validate(structure: Union[Frame, Model]) -> list[Violation]:
    """All violations of the five frame laws (and of valuation range, for models)."""
    return list(structure.violations)


def _require_valid(structure) -> None:
    bad = structure.violations
    if bad:
        raise UsageError(f"not a Veltman {type(structure).__name__.lower()}: {bad[0]}")


def truth_mask(fr: Frame, f: Formula, val: Mapping[str, int]) -> int:
    """Bitmask of the worlds of *fr* forcing *f* under the atom masks *val*."""
    n = len(fr.worlds)
    full = (1 << n) - 1
    up = fr.up_masks
    s = fr.s_masks
    memo: dict[Formula, int] = {}

    def ev(g: Formula) -> int:
        hit = memo.get(g)
        if hit is not None:
            return hit
        if isinstance(g, Atom):
            m = val.get(g.name, 0)
        elif isinstance(g, Bot):
            m = 0
        elif isinstance(g, Top):
            m = full
        elif isinstance(g, Not):
            m = full & ~ev(g.sub)
        elif isinstance(g, And):
            m = ev(g.left) & ev(g.right)
        elif isinstance(g, Or):
            m = ev(g.left) | ev(g.right)
        elif isinstance(g, Imp):
            m = (full & ~ev(g.left)) | ev(g.right)
        elif isinstance(g, Iff):
            m = full & ~(ev(g.left) ^ ev(g.right))
        elif isinstance(g, Box):
            a = ev(g.sub)
            m = sum(1 << w for w in range(n) if up[w] & ~a == 0)
        elif isinstance(g, Dia):
            a = ev(g.sub)
            m = sum(1 << w for w in range(n) if up[w] & a)
        elif isinstance(g, Rhd):
            a, b = ev(g.left), ev(g.right)
            m = 0
            for w in range(n):
                cand = up[w] & a
                sw = s[w]
                ok = True
                while cand:
                    u = (cand & -cand).bit_length() - 1
                    cand &= cand - 1
                    if not sw[u] & b:
                        ok = False
                        break
                if ok:
                    m |= 1 << w
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[g] = m
        return m

    return ev(f)


def forces(m: Model, w: str, f: Union[Formula, str]) -> bool:
    """Whether world *w* of model *m* forces *f*."""
    _require_valid(m)
    if w not in m.frame.index:
        raise UsageError(f"unknown world {w!r}")
    f = as_formula(f)
    return bool(truth_mask(m.frame, f, m.masks()) >> m.frame.index[w] & 1)


class Counterexample(NamedTuple):
    valuation: dict[str, frozenset[str]]
    world: str

    def model(self, fr: Frame) -> Model:
        return Model(fr, self.valuation)


def frame_valid(
    fr: Frame, f: Union[Formula, str], budget: Optional[int] = None
) -> tuple[bool, Optional[Counterexample]]:
    """Sweep every valuation of the atoms of *f* over *fr*.

    Returns ``(True, None)`` or ``(False, counterexample)``; the counterexample
    is the first failure with atoms in name order, each atom's extension read
    as a bitmask over the world order, and then the least world.
    """
    _require_valid(fr)
    f = as_formula(f)
    names = atoms(f)
    n = len(fr.worlds)
    budget = valuation_budget() if budget is None else budget
    total = 1 << (n * len(names))
    if total > budget:
        raise ResourceError(
            f"{total} valuations ({len(names)} atoms on {n} worlds) exceed budget {budget}"
        )
    full = (1 << n) - 1
    for masks in itertools.product(range(1 << n), repeat=len(names)):
        val = dict(zip(names, masks))
        t = truth_mask(fr, f, val)
        if t != full:
            bad = full & ~t
            w = (bad & -bad).bit_length() - 1
            ext = {
                p: frozenset(fr.worlds[i] for i in range(n) if mk >> i & 1)
                for p, mk in val.items()
            }
            return False, Counterexample(ext, fr.worlds[w])
    return True, None


# --- text format ---------------------------------------------------------------

def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def loads(text: str, kinds=("frame", "model")):
    """Parse frame/model/sketch text.  Returns ``(kind, worlds, r, s, val)``.

    The loader is literal and adds no pairs.
    """
    lines = [(i + 1, _strip(l)) for i, l in enumerate(text.splitlines())]
    lines = [(n, l) for n, l in lines if l]
    if not lines:
        raise UsageError("empty file")
    n0, head = lines[0]
    if head not in kinds:
        raise UsageError(f"line {n0}: expected header {' or '.join(kinds)}, got {head!r}")
    worlds: list[str] = []
    r: set[tuple[str, str]] = set()
    s: dict[str, set[tuple[str, str]]] = {}
    val: dict[str, set[str]] = {}
    ended = False
    for n, line in lines[1:]:
        if ended:
            raise UsageError(f"line {n}: content after 'end'")
        tok = line.split()
        key, args = tok[0], tok[1:]
        arity = {"world": 1, "r": 2, "s": 3, "val": 2, "end": 0}.get(key)
        if arity is None or (key == "val" and head != "model"):
            raise UsageError(f"line {n}: unknown directive {key!r}")
        if len(args) != arity:
            raise UsageError(f"line {n}: '{key}' takes {arity} argument(s)")
        if key == "world":
            if args[0] in worlds:
                raise UsageError(f"line {n}: duplicate world {args[0]!r}")
            worlds.append(args[0])
            continue
        if key == "end":
            ended = True
            continue
        if key == "val":
            w, p = args
            if not _is_atom(p):
                raise UsageError(f"line {n}: bad atom name {p!r}")
            if w not in worlds:
                raise UsageError(f"line {n}: unknown world {w!r}")
            val.setdefault(p, set()).add(w)
            continue
        for a in args:
            if a not in worlds:
                raise UsageError(f"line {n}: unknown world {a!r}")
        if key == "r":
            r.add((args[0], args[1]))
        else:
            s.setdefault(args[0], set()).add((args[1], args[2]))
    return head, worlds, r, s, val


def _is_atom(name: str) -> bool:
    from .formula import ATOM_RE, RESERVED

    return bool(ATOM_RE.fullmatch(name)) and name not in RESERVED


def load(text: str) -> Union[Frame, Model]:
    kind, worlds, r, s, val = loads(text)
    fr = Frame(tuple(worlds), r, s)
    if kind == "model":
        return Model(fr, val)
    return fr


def load_file(path) -> Union[Frame, Model]:
    with open(path, encoding="utf-8") as fh:
        return load(fh.read())


def _sorted_pairs(fr: Frame, pairs):
    return sorted(pairs, key=lambda p: (fr.index[p[0]], fr.index[p[1]]))


def dumps(structure: Union[Frame, Model], header: Optional[str] = None) -> str:
    fr = structure.frame if isinstance(structure, Model) else structure
    kind = header or ("model" if isinstance(structure, Model) else "frame")
    out = [kind]
    out += [f"world {w}" for w in fr.worlds]
    out += [f"r {a} {b}" for a, b in _sorted_pairs(fr, fr.r)]
    for w in fr.worlds:
        out += [f"s {w} {a} {b}" for a, b in _sorted_pairs(fr, fr.s[w])]
    if isinstance(structure, Model):
        for p in sorted(structure.valuation):
            for w in fr.worlds:
                if w in structure.valuation[p]:
                    out.append(f"val {w} {p}")
    out.append("end")
    return "\n".join(out) + "\n"


def to_dot(structure: Union[Frame, Model], name: str = "frame") -> str:
    """Graphviz rendering: R edges solid, each S_w edge dashed and labelled w."""
    fr = structure.frame if isinstance(structure, Model) else structure
    val = structure.valuation if isinstance(structure, Model) else {}
    lines = [f'digraph "{name}" {{', "  rankdir=BT;", "  node [shape=circle];"]
    for w in fr.worlds:
        props = sorted(p for p, ws in val.items() if w in ws)
        label = w + (f"\\n{', '.join(props)}" if props else "")
        lines.append(f'  "{w}" [label="{label}"];')
    for a, b in _sorted_pairs(fr, fr.r):
        lines.append(f'  "{a}" -> "{b}" [style=solid];')
    for w in fr.worlds:
        for a, b in _sorted_pairs(fr, fr.s[w]):
            lines.append(
                f'  "{a}" -> "{b}" [style=dashed, constraint=false, label="{w}"];'
            )
    lines.append("}")
    return "\n".join(lines) + "\n"
