"""Formulas of the interpretability language: AST, parser, printer, substitution.

Concrete syntax (unicode and ASCII spellings are interchangeable)::

    ¬ ~ !     negation            □ []     necessity
    ∧ &       conjunction         ◇ <>     possibility
    ∨ |       disjunction         ▷ |>     interpretability
    → ->      implication         ⊥ #f     falsum
    ↔ <->     equivalence         ⊤ #t     verum

Binding strength, tightest first: unary operators, ``&``, ``|``, ``|>``,
``->``, ``<->``.  ``&`` and ``|`` associate to the left, ``->`` and ``<->``
to the right, and ``|>`` does not associate at all.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Union

from .errors import FormulaSyntaxError

ATOM_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
# No word-shaped keywords exist in the concrete syntax.
RESERVED: frozenset[str] = frozenset()


class Formula:
    """Base class of all formula nodes.  Nodes are immutable and compare structurally."""

    __slots__ = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    name: str

    def __post_init__(self):
        if not ATOM_RE.fullmatch(self.name) or self.name in RESERVED:
            raise ValueError(f"invalid atom name {self.name!r}")

    def __repr__(self):
        return f"Atom({self.name!r})"


@dataclass(frozen=True, repr=False)
class Bot(Formula):
    def __repr__(self):
        return "Bot()"


@dataclass(frozen=True, repr=False)
class Top(Formula):
    def __repr__(self):
        return "Top()"


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class Box(Formula):
    sub: Formula


@dataclass(frozen=True)
class Dia(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Rhd(Formula):
    left: Formula
    right: Formula


UNARY = (Not, Box, Dia)
BINARY = (And, Or, Imp, Iff, Rhd)
MODAL = (Box, Dia, Rhd)

Substitution = Mapping[str, Formula]

# binary operator class -> (precedence, associativity, ascii spelling)
_BINARY_INFO: dict[type, tuple[int, str, str]] = {
    Iff: (1, "right", "<->"),
    Imp: (2, "right", "->"),
    Rhd: (3, "none", "|>"),
    Or: (4, "left", "|"),
    And: (5, "left", "&"),
}
_UNARY_TEXT = {Not: "~", Box: "[]", Dia: "<>"}
_UNARY_PREC = 6

_TOKEN_SPEC = [
    ("WS", r"\s+"),
    ("IFF", r"<->|↔"),
    ("IMP", r"->|→"),
    ("RHD", r"\|>|▷"),
    ("DIA", r"<>|◇|⋄"),
    ("BOX", r"\[\]|□"),
    ("OR", r"\||∨"),
    ("AND", r"&|∧"),
    ("NOT", r"~|!|¬"),
    ("BOT", r"#f|⊥"),
    ("TOP", r"#t|⊤"),
    ("LPAR", r"\("),
    ("RPAR", r"\)"),
    ("ATOM", ATOM_RE.pattern),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{k}>{p})" for k, p in _TOKEN_SPEC))
_BINARY_TOKENS = {"IFF": Iff, "IMP": Imp, "RHD": Rhd, "OR": Or, "AND": And}
_UNARY_TOKENS = {"NOT": Not, "BOX": Box, "DIA": Dia}
_SPELLING = {
    "IFF": "'<->'", "IMP": "'->'", "RHD": "'|>'", "OR": "'|'", "AND": "'&'",
    "NOT": "'~'", "BOX": "'[]'", "DIA": "'<>'", "BOT": "'#f'", "TOP": "'#t'",
    "LPAR": "'('", "RPAR": "')'", "ATOM": "atom", "EOF": "end of input",
}
_OPERAND_START = ("ATOM", "BOT", "TOP", "LPAR", "NOT", "BOX", "DIA")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        if m.lastgroup != "WS":
            if m.lastgroup == "ATOM" and m.group() in RESERVED:
                raise FormulaSyntaxError(f"reserved word {m.group()!r}", text, pos)
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("EOF", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def error(self, expected):
        kind, value, pos = self.peek()
        found = "end of input" if kind == "EOF" else repr(value)
        raise FormulaSyntaxError(
            f"unexpected {found}", self.text, pos, [_SPELLING[e] for e in expected]
        )

    def expect(self, kind):
        if self.peek()[0] != kind:
            self.error([kind])
        self.i += 1

    def parse(self) -> Formula:
        f = self.expr(1)
        if self.peek()[0] != "EOF":
            self.error(["EOF", *_BINARY_TOKENS])
        return f

    def expr(self, min_prec: int) -> Formula:
        left = self.unary()
        while True:
            kind = self.peek()[0]
            cls = _BINARY_TOKENS.get(kind)
            if cls is None:
                return left
            prec, assoc, _ = _BINARY_INFO[cls]
            if prec < min_prec:
                return left
            self.i += 1
            right = self.expr(prec if assoc == "right" else prec + 1)
            left = cls(left, right)
            if assoc == "none" and self.peek()[0] == kind:
                _, _, pos = self.peek()
                raise FormulaSyntaxError(
                    "'|>' does not associate; add parentheses", self.text, pos
                )

    def unary(self) -> Formula:
        kind, value, _ = self.peek()
        if kind in _UNARY_TOKENS:
            self.i += 1
            return _UNARY_TOKENS[kind](self.unary())
        if kind == "ATOM":
            self.i += 1
            return Atom(value)
        if kind == "BOT":
            self.i += 1
            return Bot()
        if kind == "TOP":
            self.i += 1
            return Top()
        if kind == "LPAR":
            self.i += 1
            f = self.expr(1)
            self.expect("RPAR")
            return f
        self.error(_OPERAND_START)


def parse(text: str) -> Formula:
    """Parse *text* into a formula; raise :class:`FormulaSyntaxError` on failure."""
    return _Parser(text).parse()


def _prec(f: Formula) -> int:
    info = _BINARY_INFO.get(type(f))
    return info[0] if info else _UNARY_PREC + 1


def render(f: Formula) -> str:
    """ASCII rendering with the fewest parentheses the grammar needs, except that
    compound operands of ``|>`` are always bracketed.  ``parse(render(f)) == f``.
    """
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Bot):
        return "#f"
    if isinstance(f, Top):
        return "#t"
    if isinstance(f, UNARY):
        sub = render(f.sub)
        if isinstance(f.sub, BINARY):
            sub = f"({sub})"
        return _UNARY_TEXT[type(f)] + sub
    prec, assoc, op = _BINARY_INFO[type(f)]
    lp, rp = _prec(f.left), _prec(f.right)
    left, right = render(f.left), render(f.right)
    # binary operands of |> are always bracketed, for readability
    if lp < prec or (lp == prec and assoc != "left") or (op == "|>" and lp <= _UNARY_PREC):
        left = f"({left})"
    if rp < prec or (rp == prec and assoc != "right") or (op == "|>" and rp <= _UNARY_PREC):
        right = f"({right})"
    return f"{left} {op} {right}"


def substitute(f: Formula, s: Substitution) -> Formula:
    """Replace every atom named in *s* by its image, all at once."""
    if isinstance(f, Atom):
        return s.get(f.name, f)
    if isinstance(f, (Bot, Top)):
        return f
    if isinstance(f, UNARY):
        sub = substitute(f.sub, s)
        return f if sub is f.sub else type(f)(sub)
    left, right = substitute(f.left, s), substitute(f.right, s)
    if left is f.left and right is f.right:
        return f
    return type(f)(left, right)


def compose(s1: Substitution, s2: Substitution) -> dict[str, Formula]:
    """The substitution that applies *s1* and then *s2*."""
    out = {k: substitute(v, s2) for k, v in s1.items()}
    for k, v in s2.items():
        out.setdefault(k, v)
    return out


def subformulas(f: Formula) -> Iterator[Formula]:
    """Yield every subformula of *f* (pre-order, with repetitions)."""
    yield f
    if isinstance(f, UNARY):
        yield from subformulas(f.sub)
    elif isinstance(f, BINARY):
        yield from subformulas(f.left)
        yield from subformulas(f.right)


def atoms(f: Formula) -> list[str]:
    """Sorted names of the atoms occurring in *f*."""
    return sorted({g.name for g in subformulas(f) if isinstance(g, Atom)})


def as_formula(f: Union[Formula, str]) -> Formula:
    return parse(f) if isinstance(f, str) else f
