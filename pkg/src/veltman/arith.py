"""Gödel numbering of strings by length-then-alphabetic order, binary numerals,
the growth function omega1, and an empirical report on numeral code sizes.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .errors import ResourceError, UsageError

DEFAULT_BIT_BUDGET = 10 ** 6


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if not self.symbols:
            raise UsageError("an alphabet needs at least one symbol")
        if len(set(self.symbols)) != len(self.symbols):
            raise UsageError("alphabet symbols must be distinct")

    @property
    def size(self) -> int:
        return len(self.symbols)

    def digit(self, sym: str) -> int:
        try:
            return self.symbols.index(sym) + 1
        except ValueError:
            raise UsageError(f"symbol {sym!r} is not in the alphabet") from None


def gn(alpha: Alphabet, s: Union[str, Sequence[str]]) -> int:
    """Position of *s* in the enumeration by length, then alphabetically (from 0).

    This is the bijective base-A value of *s* with digits 1..A.
    """
    a = alpha.size
    k = 0
    for sym in s:
        k = k * a + alpha.digit(sym)
    return k


def ungn(alpha: Alphabet, k: int) -> str:
    """The string with gödelnumber *k*."""
    if k < 0:
        raise UsageError("gödelnumbers are non-negative")
    a = alpha.size
    out = []
    while k:
        k, d = divmod(k - 1, a)
        out.append(alpha.symbols[d])
    return "".join(reversed(out))


# --- numerals --------------------------------------------------------------------

class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Zero(Term):
    pass


@dataclass(frozen=True)
class Succ(Term):
    arg: Term


@dataclass(frozen=True)
class Mul(Term):
    left: Term
    right: Term


ZERO = Zero()
TWO = Succ(Succ(ZERO))


def numeral(n: int) -> Term:
    """Binary numeral: num(0)=0, num(2m+1)=S(SS0·num(m)), num(2m+2)=SS0·num(m+1)."""
    if n < 0:
        raise UsageError("numerals are for natural numbers")
    # Unfold iteratively, then rebuild from the innermost term outwards.
    steps = []
    while n:
        if n % 2:
            steps.append("odd")
            n = (n - 1) // 2
        else:
            steps.append("even")
            n = (n - 2) // 2 + 1
    t: Term = ZERO
    for kind in reversed(steps):
        t = Succ(Mul(TWO, t)) if kind == "odd" else Mul(TWO, t)
    return t


def evaluate(t: Term) -> int:
    if isinstance(t, Zero):
        return 0
    if isinstance(t, Succ):
        return evaluate(t.arg) + 1
    return evaluate(t.left) * evaluate(t.right)


TERM_ALPHABET = Alphabet(("0", "S", "·", "(", ")", ","))


def render_term(t: Term) -> str:
    """``S(SS0·0)`` style: S applies to a following 0/S-term directly and
    brackets anything else; the right factor of a product is bracketed unless it is 0.
    """
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Succ):
        inner = render_term(t.arg)
        return "S" + (inner if isinstance(t.arg, (Zero, Succ)) else f"({inner})")
    left = render_term(t.left)
    if isinstance(t.left, Mul):
        left = f"({left})"
    right = render_term(t.right)
    if not isinstance(t.right, Zero):
        right = f"({right})"
    return f"{left}·{right}"


def unary_numeral(n: int) -> str:
    return "S" * n + "0"


def unary_code(n: int, alpha: Alphabet = TERM_ALPHABET) -> int:
    """gn of ``S...S0`` (n S's) in closed form; equals ``gn(alpha, unary_numeral(n))``."""
    a, s, z = alpha.size, alpha.digit("S"), alpha.digit("0")
    if a == 1:
        return n + 1
    return s * (a ** (n + 1) - a) // (a - 1) + z


def omega1(x: int, budget_bits: int = DEFAULT_BIT_BUDGET) -> int:
    """2 ** (floor(log2 x) ** 2), with omega1(0) = 1."""
    if x < 0:
        raise UsageError("omega1 is defined on natural numbers")
    if x == 0:
        return 1
    e = (x.bit_length() - 1) ** 2
    if e + 1 > budget_bits:
        raise ResourceError(f"omega1({x}) has {e + 1} bits, over the budget of {budget_bits}")
    return 1 << e


# --- growth report ---------------------------------------------------------------

@dataclass
class GrowthRow:
    n: int
    length: int
    code_bits: int
    unary_length: int
    unary_bits: Optional[int]  # None when over the bit budget

    @property
    def log2n(self) -> float:
        return math.log2(self.n)

    @property
    def length_ratio(self) -> Optional[float]:
        return self.length / self.log2n if self.n > 1 else None

    @property
    def bits_ratio(self) -> Optional[float]:
        return self.code_bits / self.log2n if self.n > 1 else None

    @property
    def unary_ratio(self) -> Optional[float]:
        if self.n <= 1 or self.unary_bits is None:
            return None
        return self.unary_bits / self.log2n


@dataclass
class GrowthReport:
    n_max: int
    rows: list
    c1: float
    c2: float
    k: float
    length_bound_ok: bool
    ratio_bounded: bool

    @property
    def ok(self) -> bool:
        return self.length_bound_ok and self.ratio_bounded

    def format_table(self) -> str:
        def f(v):
            return "-" if v is None else f"{v:.3f}"

        out = [
            f"{'n':>9} {'L(n)':>6} {'B(n)':>7} {'L/log2n':>8} {'B/log2n':>8} "
            f"{'unary L':>9} {'unary B':>9} {'unaryB/log2n':>13}"
        ]
        for r in self.rows:
            ub = "over" if r.unary_bits is None else str(r.unary_bits)
            out.append(
                f"{r.n:>9} {r.length:>6} {r.code_bits:>7} {f(r.length_ratio):>8} "
                f"{f(r.bits_ratio):>8} {r.unary_length:>9} {ub:>9} {f(r.unary_ratio):>13}"
            )
        out.append(f"length bound: L(n) <= {self.c1:.4f}*log2(n) + {self.c2:.4f}  "
                   f"({'holds' if self.length_bound_ok else 'VIOLATED'})")
        out.append(f"fitted exponent k = max B(n)/log2(n) = {self.k:.4f}  "
                   f"(B/log2n {'bounded' if self.ratio_bounded else 'GROWING'})")
        return "\n".join(out) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "length", "code_bits", "length_ratio", "bits_ratio",
                    "unary_length", "unary_bits", "unary_ratio"])
        for r in self.rows:
            w.writerow([r.n, r.length, r.code_bits, r.length_ratio, r.bits_ratio,
                        r.unary_length, r.unary_bits, r.unary_ratio])
        return buf.getvalue()


def sample_points(n_max: int) -> list[int]:
    """2^j - 1 and 2^j for j >= 1, up to n_max: the cheapest and dearest numerals per bit length."""
    out = []
    j = 1
    while (1 << j) - 1 <= n_max:
        for n in ((1 << j) - 1, 1 << j):
            if n <= n_max:
                out.append(n)
        j += 1
    return out


def _least_squares(xs, ys):
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    sxx = sum((x - mx) ** 2 for x in xs)
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx if sxx else 0.0
    return slope, my - slope * mx


def growth_report(
    n_max: int, alpha: Alphabet = TERM_ALPHABET, budget_bits: int = DEFAULT_BIT_BUDGET
) -> GrowthReport:
    """Size of binary numerals and of their codes, against the unary baseline.

    The length bound is fitted on the lower half of the sampled bit lengths and
    then checked on the whole range; B(n)/log2 n counts as bounded when its
    maximum over the upper half does not exceed its maximum over the lower half.
    """
    if n_max < 2:
        raise UsageError("growth report needs n_max >= 2")
    if (n_max.bit_length() * 9 + 8) * math.log2(alpha.size) > budget_bits:
        raise ResourceError(f"numeral codes up to a {n_max.bit_length()}-bit n_max exceed the budget of {budget_bits} bits")
    rows = []
    for n in sample_points(n_max):
        text = render_term(numeral(n))
        ubits_est = (n + 1) * math.log2(alpha.size)
        rows.append(GrowthRow(
            n=n,
            length=len(text),
            code_bits=gn(alpha, text).bit_length(),
            unary_length=n + 1,
            unary_bits=unary_code(n, alpha).bit_length() if ubits_est <= budget_bits else None,
        ))
    measured = [r for r in rows if r.n > 1]
    levels = sorted({r.n.bit_length() for r in measured})
    lower = [r for r in measured if r.n.bit_length() <= levels[len(levels) // 2]]
    upper = [r for r in measured if r not in lower] or lower
    # fit the upper envelope: per bit length keep the longest numeral
    env: dict[int, GrowthRow] = {}
    for r in lower:
        b = r.n.bit_length()
        if b not in env or r.length > env[b].length:
            env[b] = r
    pts = sorted(env.values(), key=lambda r: r.n)
    c1, c2 = _least_squares([r.log2n for r in pts], [r.length for r in pts])
    c2 += max(0.0, max(r.length - (c1 * r.log2n + c2) for r in lower))
    eps = 1e-9
    length_ok = all(r.length <= c1 * r.log2n + c2 + eps for r in measured)
    k = max(r.bits_ratio for r in measured)
    ratio_ok = max(r.bits_ratio for r in upper) <= max(r.bits_ratio for r in lower) + eps
    return GrowthReport(n_max, rows, c1, c2, k, length_ok, ratio_ok)
