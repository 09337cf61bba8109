"""Hilbert-style proof checking for IL and its extensions."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from .errors import ResourceError, UsageError
from .formula import (
    And, Atom, Bot, Box, Dia, Formula, Iff, Imp, Not, Or, Rhd, Top, parse, render,
    substitute,
)

TAUTOLOGY_ATOM_LIMIT = 16

BASE_AXIOMS = ("L2", "L3", "L4", "J1", "J2", "J3", "J4", "J5")
EXTRA_AXIOMS = ("M", "W", "M0", "Wstar", "P", "P0", "M1")

_TEMPLATES = {
    "L2": "[](A -> B) -> ([]A -> []B)",
    "L3": "[]A -> [][]A",
    "L4": "[]([]A -> A) -> []A",
    "J1": "[](A -> B) -> A |> B",
    "J2": "(A |> B) & (B |> C) -> A |> C",
    "J3": "(A |> C) & (B |> C) -> (A | B) |> C",
    "J4": "A |> B -> (<>A -> <>B)",
    "J5": "<>A |> A",
    "M": "A |> B -> (A & []C) |> (B & []C)",
    "W": "A |> B -> A |> (B & []~A)",
    "M0": "A |> B -> (<>A & []C) |> (B & []C)",
    "Wstar": "A |> B -> (B & []C) |> (B & []C & []~A)",
    "P": "A |> B -> [](A |> B)",
    "P0": "A |> <>B -> [](A |> B)",
    "M1": "A |> B -> (<>A & [][]C) |> (B & []C)",
}
AXIOMS: dict[str, Formula] = {name: parse(text) for name, text in _TEMPLATES.items()}


def _unfold_dia(f: Formula) -> Formula:
    """Rewrite every <>X as ~[]~X, recursively."""
    if isinstance(f, Dia):
        return Not(Box(Not(_unfold_dia(f.sub))))
    if isinstance(f, (Not, Box)):
        return type(f)(_unfold_dia(f.sub))
    if isinstance(f, (And, Or, Imp, Iff, Rhd)):
        return type(f)(_unfold_dia(f.left), _unfold_dia(f.right))
    return f


def _abstract(f: Formula, table: dict[Formula, int]) -> Formula:
    if isinstance(f, (Box, Rhd)):
        k = table.setdefault(f, len(table))
        return Atom(f"m{k}")
    if isinstance(f, Atom):
        k = table.setdefault(f, len(table))
        return Atom(f"m{k}")
    if isinstance(f, Not):
        return Not(_abstract(f.sub, table))
    if isinstance(f, (And, Or, Imp, Iff)):
        return type(f)(_abstract(f.left, table), _abstract(f.right, table))
    return f


def propositional_skeleton(f: Formula) -> tuple[Formula, list[Formula]]:
    """Abstract maximal modal subformulas (and atoms) to fresh letters ``m0, m1, ...``.

    ``<>X`` is read as ``~[]~X`` first, so diamonds and boxes share letters.
    Returns the skeleton and the list of what each letter stands for.
    """
    table: dict[Formula, int] = {}
    skel = _abstract(_unfold_dia(f), table)
    return skel, sorted(table, key=table.get)


def check_tautology(f: Union[Formula, str]) -> bool:
    """Truth-table check of the propositional skeleton of *f*."""
    f = parse(f) if isinstance(f, str) else f
    skel, letters = propositional_skeleton(f)
    k = len(letters)
    if k > TAUTOLOGY_ATOM_LIMIT:
        raise ResourceError(f"{k} propositional letters exceed the limit of {TAUTOLOGY_ATOM_LIMIT}")
    # Evaluate all 2^k rows at once: bit j of a letter's column is its value in row j.
    rows = 1 << k
    full = (1 << rows) - 1
    columns = {}
    for i in range(k):
        block = (1 << (1 << i)) - 1
        col = 0
        for start in range(1 << i, rows, 2 << i):
            col |= block << start
        columns[f"m{i}"] = col

    def ev(g):
        if isinstance(g, Atom):
            return columns[g.name]
        if isinstance(g, Top):
            return full
        if isinstance(g, Bot):
            return 0
        if isinstance(g, Not):
            return full & ~ev(g.sub)
        if isinstance(g, And):
            return ev(g.left) & ev(g.right)
        if isinstance(g, Or):
            return ev(g.left) | ev(g.right)
        if isinstance(g, Imp):
            return (full & ~ev(g.left)) | ev(g.right)
        if isinstance(g, Iff):
            return full & ~(ev(g.left) ^ ev(g.right))
        raise TypeError(g)

    return ev(skel) == full


# --- proofs --------------------------------------------------------------------

@dataclass(frozen=True)
class Taut:
    def __str__(self):
        return "taut"


@dataclass(frozen=True)
class Ax:
    name: str
    subst: Mapping[str, Formula] = field(default_factory=dict)

    def __str__(self):
        parts = [f"{k}=({render(v)})" for k, v in sorted(self.subst.items())]
        return " ".join(["ax", self.name, *parts])

    def __hash__(self):
        return hash((self.name, tuple(sorted(self.subst.items()))))


@dataclass(frozen=True)
class MP:
    major: int  # the implication
    minor: int  # its antecedent

    def __str__(self):
        return f"mp {self.major} {self.minor}"


@dataclass(frozen=True)
class Nec:
    premise: int

    def __str__(self):
        return f"nec {self.premise}"


Justification = Union[Taut, Ax, MP, Nec]


@dataclass(frozen=True)
class Line:
    index: int
    justification: Justification
    formula: Formula

    def __str__(self):
        return f"{self.index} {self.justification} : {render(self.formula)}"


@dataclass(frozen=True)
class Proof:
    logic: frozenset = frozenset()
    lines: tuple = ()
    qed: Optional[Formula] = None

    def __post_init__(self):
        object.__setattr__(self, "logic", frozenset(self.logic))
        object.__setattr__(self, "lines", tuple(self.lines))
        unknown = self.logic - set(EXTRA_AXIOMS)
        if unknown:
            raise UsageError(f"unknown extension(s): {', '.join(sorted(unknown))}")

    def dumps(self) -> str:
        head = " ".join(["proof il", *(f"+{n}" for n in EXTRA_AXIOMS if n in self.logic)])
        body = [str(l) for l in self.lines]
        tail = [f"qed {render(self.qed)}"] if self.qed is not None else []
        return "\n".join([head, *body, *tail]) + "\n"


@dataclass(frozen=True)
class ProofVerdict:
    accepted: bool
    conclusion: Optional[Formula] = None
    line: Optional[int] = None
    reason: str = ""

    def __bool__(self):
        return self.accepted

    def __str__(self):
        if self.accepted:
            return f"accepted: {render(self.conclusion)}"
        where = f"line {self.line}" if self.line is not None else "proof"
        return f"rejected at {where}: {self.reason}"


def _check_line(line: Line, done: dict[int, Formula], enabled) -> Optional[str]:
    j, stated = line.justification, line.formula
    if isinstance(j, Taut):
        try:
            ok = check_tautology(stated)
        except ResourceError as exc:
            return str(exc)
        return None if ok else "not a propositional tautology"
    if isinstance(j, Ax):
        if j.name not in AXIOMS:
            return f"unknown axiom schema {j.name}"
        if j.name not in enabled:
            return f"schema {j.name} is not enabled in this logic"
        inst = substitute(AXIOMS[j.name], j.subst)
        if inst != stated:
            return f"{j.name} instance is {render(inst)}, not the stated formula"
        return None
    refs = (j.major, j.minor) if isinstance(j, MP) else (j.premise,)
    for r in refs:
        if r not in done:
            return f"reference to line {r}, which is not an earlier line"
    if isinstance(j, MP):
        major, minor = done[j.major], done[j.minor]
        if not isinstance(major, Imp):
            return f"line {j.major} is not an implication"
        if major.left != minor:
            return f"line {j.minor} does not match the antecedent of line {j.major}"
        if major.right != stated:
            return f"consequent of line {j.major} is {render(major.right)}, not the stated formula"
        return None
    if stated != Box(done[j.premise]):
        return f"necessitation of line {j.premise} gives []({render(done[j.premise])})"
    return None


def check_proof(p: Proof) -> ProofVerdict:
    """Check every line in order; report the first failure."""
    enabled = set(BASE_AXIOMS) | set(p.logic)
    if not p.lines:
        return ProofVerdict(False, reason="proof has no lines")
    done: dict[int, Formula] = {}
    for expected, line in enumerate(p.lines, start=1):
        if line.index != expected:
            return ProofVerdict(False, line=line.index, reason=f"expected line number {expected}")
        why = _check_line(line, done, enabled)
        if why:
            return ProofVerdict(False, line=line.index, reason=why)
        done[line.index] = line.formula
    last = p.lines[-1].formula
    if p.qed is not None and p.qed != last:
        return ProofVerdict(False, line=p.lines[-1].index, reason="qed formula differs from the last line")
    return ProofVerdict(True, conclusion=last)


# --- proof files -----------------------------------------------------------------

_LINE_RE = re.compile(r"(\d+)\s+(taut|ax|mp|nec)\b(.*)$")


class ProofSyntaxError(UsageError):
    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


def _formula(text: str, lineno: int) -> Formula:
    try:
        return parse(text)
    except UsageError as exc:
        raise ProofSyntaxError(lineno, f"bad formula {text.strip()!r}: {exc}") from None


def _split_subst(text: str, lineno: int) -> tuple[str, dict[str, Formula]]:
    """Parse ``NAME L=(f) L=(g) ...``."""
    text = text.strip()
    m = re.match(r"([A-Za-z0-9]+)", text)
    if not m:
        raise ProofSyntaxError(lineno, "missing axiom name")
    name, rest = m.group(1), text[m.end():]
    subst: dict[str, Formula] = {}
    pos = 0
    while True:
        m = re.compile(r"\s*([A-Za-z][A-Za-z0-9_]*)\s*=\s*\(").match(rest, pos)
        if not m:
            if rest[pos:].strip():
                raise ProofSyntaxError(lineno, f"cannot read substitution at {rest[pos:].strip()!r}")
            return name, subst
        letter, depth, i = m.group(1), 1, m.end()
        while i < len(rest) and depth:
            depth += {"(": 1, ")": -1}.get(rest[i], 0)
            i += 1
        if depth:
            raise ProofSyntaxError(lineno, f"unbalanced parentheses in substitution for {letter}")
        if letter in subst:
            raise ProofSyntaxError(lineno, f"letter {letter} substituted twice")
        subst[letter] = _formula(rest[m.end(): i - 1], lineno)
        pos = i


def loads_proof(text: str) -> Proof:
    """Read the proof file format (see README)."""
    rows = []
    for n, raw in enumerate(text.splitlines(), start=1):
        # '#' also spells the constants #t/#f, so only full-line comments exist
        line = "" if raw.lstrip().startswith("#") else raw.strip()
        if line:
            rows.append((n, line))
    if not rows:
        raise ProofSyntaxError(1, "empty proof file")
    n, head = rows[0]
    tok = head.split()
    if tok[:2] != ["proof", "il"]:
        raise ProofSyntaxError(n, "header must start with 'proof il'")
    logic = set()
    for t in tok[2:]:
        if not t.startswith("+") or t[1:] not in EXTRA_AXIOMS:
            raise ProofSyntaxError(n, f"unknown extension {t!r}")
        logic.add(t[1:])
    lines, qed = [], None
    for n, row in rows[1:]:
        if qed is not None:
            raise ProofSyntaxError(n, "content after qed")
        if row.startswith("qed"):
            qed = _formula(row[3:], n)
            continue
        head, sep, body = row.partition(":")
        if not sep:
            raise ProofSyntaxError(n, "missing ':' before the stated formula")
        m = _LINE_RE.match(head.strip())
        if not m:
            raise ProofSyntaxError(n, f"cannot read justification {head.strip()!r}")
        idx, kind, args = int(m.group(1)), m.group(2), m.group(3)
        stated = _formula(body, n)
        if kind == "taut":
            if args.strip():
                raise ProofSyntaxError(n, "taut takes no arguments")
            just = Taut()
        elif kind == "ax":
            name, subst = _split_subst(args, n)
            just = Ax(name, subst)
        else:
            nums = args.split()
            want = 2 if kind == "mp" else 1
            if len(nums) != want or not all(x.isdigit() for x in nums):
                raise ProofSyntaxError(n, f"{kind} takes {want} line number(s)")
            just = MP(*map(int, nums)) if kind == "mp" else Nec(int(nums[0]))
        lines.append(Line(idx, just, stated))
    if qed is None:
        raise ProofSyntaxError(rows[-1][0], "missing 'qed <formula>' footer")
    return Proof(frozenset(logic), tuple(lines), qed)


def load_proof(path) -> Proof:
    with open(path, encoding="utf-8") as fh:
        return loads_proof(fh.read())
