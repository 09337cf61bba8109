"""Frame conditions for the named extensions of IL, enumeration of small frames,
and sweeps comparing each condition with validity of its schema.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Optional

from .errors import UsageError
from .formula import Formula, parse
from .semantics import Counterexample, Frame, frame_valid

DEFAULT_CAP = 4


class FrameClass(str, enum.Enum):
    IL = "IL"
    ILW = "ILW"
    ILM0 = "ILM0"
    ILWstar = "ILWstar"
    ILM = "ILM"
    ILP = "ILP"
    ILP0 = "ILP0"
    ILM1 = "ILM1"

    @classmethod
    def lookup(cls, name: str) -> "FrameClass":
        key = name.strip().replace("*", "star")
        for c in cls:
            if c.value.lower() == key.lower():
                return c
        raise UsageError(f"unknown frame class {name!r}; choose from {', '.join(c.value for c in cls)}")

    @property
    def schema(self) -> Optional[Formula]:
        text = SCHEMAS[self]
        return parse(text) if text else None


SCHEMAS = {
    FrameClass.IL: None,
    FrameClass.ILW: "A |> B -> A |> (B & []~A)",
    FrameClass.ILM0: "A |> B -> (<>A & []C) |> (B & []C)",
    FrameClass.ILWstar: "A |> B -> (B & []C) |> (B & []C & []~A)",
    FrameClass.ILM: "A |> B -> (A & []C) |> (B & []C)",
    FrameClass.ILP: "A |> B -> [](A |> B)",
    FrameClass.ILP0: "A |> <>B -> [](A |> B)",
    FrameClass.ILM1: "A |> B -> (<>A & [][]C) |> (B & []C)",
}


class Verdict(NamedTuple):
    holds: bool
    witness: Optional[tuple] = None

    def __bool__(self):
        return self.holds


class _Idx:
    """Integer view of a frame used by the condition checks."""

    def __init__(self, fr: Frame):
        n = len(fr.worlds)
        self.n = n
        self.names = fr.worlds
        self.up = [[b for b in range(n) if fr.up_masks[a] >> b & 1] for a in range(n)]
        self.upm = fr.up_masks
        self.sm = fr.s_masks

    def s_succ(self, x, a):
        m = self.sm[x][a]
        return [b for b in range(self.n) if m >> b & 1]

    def r(self, a, b):
        return bool(self.upm[a] >> b & 1)

    def s(self, x, a, b):
        return bool(self.sm[x][a] >> b & 1)

    def named(self, *ix):
        return tuple(self.names[i] for i in ix)


def _chains(ix: _Idx):
    """Yield (x, y, z, u) with xRy, yRz and z S_x u."""
    for x in range(ix.n):
        for y in ix.up[x]:
            for z in ix.up[y]:
                for u in ix.s_succ(x, z):
                    yield x, y, z, u


def _check_m0(ix):
    for x, y, z, u in _chains(ix):
        for v in ix.up[u]:
            if not ix.r(y, v):
                return Verdict(False, ix.named(x, y, z, u, v))
    return Verdict(True)


def _check_m1(ix):
    for x, y, z, u in _chains(ix):
        for v in ix.up[u]:
            if not any(ix.r(w, v) for w in ix.up[y]):
                return Verdict(False, ix.named(x, y, z, u, v))
    return Verdict(True)


def _check_p0(ix):
    for x, y, z, u in _chains(ix):
        for v in ix.up[u]:
            if not ix.s(y, z, v):
                return Verdict(False, ix.named(x, y, z, u, v))
    return Verdict(True)


def _check_p(ix):
    for x, y, z, u in _chains(ix):
        if not ix.s(y, z, u):
            return Verdict(False, ix.named(x, y, z, u))
    return Verdict(True)


def _check_m(ix):
    for x in range(ix.n):
        for y in range(ix.n):
            for z in ix.s_succ(x, y):
                for u in ix.up[z]:
                    if not ix.r(y, u):
                        return Verdict(False, ix.named(x, y, z, u))
    return Verdict(True)


def _check_w(ix):
    # Per base world x, look for a cycle in the digraph u -> v iff u R w S_x v.
    # Witness: (x, u0, w0, u1, w1, ..., u0) reading u_i R w_i S_x u_{i+1}.
    for x in range(ix.n):
        step = {}
        for u in range(ix.n):
            for w in ix.up[u]:
                for v in ix.s_succ(x, w):
                    step.setdefault(u, {}).setdefault(v, w)
        cycle = _find_cycle(ix.n, step)
        if cycle is not None:
            path = []
            for a, b in zip(cycle, cycle[1:]):
                path += [a, step[a][b]]
            path.append(cycle[0])
            return Verdict(False, ix.named(x, *path))
    return Verdict(True)


def _find_cycle(n, step):
    color = [0] * n
    stack: list[int] = []

    def dfs(a):
        color[a] = 1
        stack.append(a)
        for b in sorted(step.get(a, ())):
            if color[b] == 1:
                return stack[stack.index(b):] + [b]
            if color[b] == 0:
                found = dfs(b)
                if found:
                    return found
        stack.pop()
        color[a] = 2
        return None

    for a in range(n):
        if color[a] == 0:
            found = dfs(a)
            if found:
                return found
    return None


def _check_wstar(ix):
    v = _check_w(ix)
    if not v:
        return Verdict(False, ("W",) + v.witness)
    v = _check_m0(ix)
    if not v:
        return Verdict(False, ("M0",) + v.witness)
    return Verdict(True)


_CHECKS = {
    FrameClass.IL: lambda ix: Verdict(True),
    FrameClass.ILW: _check_w,
    FrameClass.ILM0: _check_m0,
    FrameClass.ILWstar: _check_wstar,
    FrameClass.ILM: _check_m,
    FrameClass.ILP: _check_p,
    FrameClass.ILP0: _check_p0,
    FrameClass.ILM1: _check_m1,
}


def check_condition(fr: Frame, c: FrameClass) -> Verdict:
    """Decide the frame condition of class *c*; on failure return a witness tuple.

    Witness layouts: ILM ``(x, y, z, u)`` for y S_x z R u; ILP ``(x, y, z, u)``;
    ILM0/ILM1/ILP0 ``(x, y, z, u, v)``; ILW ``(x, u0, w0, u1, ..., u0)`` tracing
    a cycle of R;S_x; ILWstar prefixes the failing part's tag ``"W"`` or ``"M0"``.
    """
    if fr.violations:
        raise UsageError(f"not a Veltman frame: {fr.violations[0]}")
    return _CHECKS[FrameClass(c)](_Idx(fr))


# --- enumeration ---------------------------------------------------------------

def _transitive(pairs: set, n: int) -> bool:
    for a, b in pairs:
        for c in range(n):
            if (b, c) in pairs and (a, c) not in pairs:
                return False
    return True


def _strict_orders(n: int) -> list[frozenset]:
    """All transitive acyclic relations on range(n), in bitmask order."""
    cand = [(a, b) for a in range(n) for b in range(n) if a != b]
    out = []
    for mask in range(1 << len(cand)):
        pairs = {cand[i] for i in range(len(cand)) if mask >> i & 1}
        if any((b, a) in pairs for a, b in pairs):
            continue
        if _transitive(pairs, n):
            out.append(frozenset(pairs))
    return out


def _s_options(up: list[int], r: frozenset, n: int) -> list[frozenset]:
    base = {(a, a) for a in up} | {(a, b) for a, b in r if a in up and b in up}
    free = [(a, b) for a in up for b in up if (a, b) not in base]
    out = []
    for mask in range(1 << len(free)):
        pairs = base | {free[i] for i in range(len(free)) if mask >> i & 1}
        if _transitive(pairs, n):
            out.append(frozenset(pairs))
    return out


def enumerate_frames(
    n: int, filter: Optional[FrameClass] = None, cap: int = DEFAULT_CAP
) -> Iterator[Frame]:
    """Every labelled Veltman frame on worlds w1..wn, once each, in a fixed order."""
    if not isinstance(n, int) or n < 1 or n > cap:
        raise UsageError(f"world count must be between 1 and {cap}, got {n}")
    names = tuple(f"w{i + 1}" for i in range(n))
    for r in _strict_orders(n):
        ups = [sorted(b for a, b in r if a == w) for w in range(n)]
        options = [_s_options(ups[w], r, n) for w in range(n)]
        r_named = {(names[a], names[b]) for a, b in r}
        for choice in itertools.product(*options):
            fr = Frame(
                names,
                r_named,
                {names[w]: {(names[a], names[b]) for a, b in choice[w]} for w in range(n)},
            )
            if filter is None or check_condition(fr, filter):
                yield fr


def frames_upto(n: int, filter: Optional[FrameClass] = None, cap: int = DEFAULT_CAP):
    """Yield ``(size, index, frame)`` for every frame with 1..n worlds."""
    for k in range(1, n + 1):
        for i, fr in enumerate(enumerate_frames(k, filter, cap)):
            yield k, i, fr


# --- correspondence sweeps -------------------------------------------------------

@dataclass
class SweepRow:
    size: int
    index: int
    frame: Frame
    condition: Verdict
    valid: Optional[bool]
    counterexample: Optional[Counterexample] = None


@dataclass
class SweepReport:
    n: int
    frame_class: FrameClass
    direction: str
    rows: list[SweepRow] = field(default_factory=list)

    @property
    def unsound(self) -> list[SweepRow]:
        """Frames satisfying the condition on which the schema fails."""
        return [r for r in self.rows if r.condition.holds and r.valid is False]

    @property
    def incomplete(self) -> list[SweepRow]:
        """Frames validating the schema on which the condition fails."""
        return [r for r in self.rows if not r.condition.holds and r.valid is True]

    @property
    def disagreements(self) -> list[SweepRow]:
        if self.direction == "sound":
            return self.unsound
        return self.unsound + self.incomplete

    @property
    def passed(self) -> bool:
        return not self.disagreements

    def format_table(self) -> str:
        head = f"{'size':>4} {'index':>5}  {'condition':<9}  {'valid':<7}  witness"
        out = [
            f"correspondence sweep: class {self.frame_class.value}, "
            f"schema {SCHEMAS[self.frame_class]}, worlds <= {self.n}, direction {self.direction}",
            head,
        ]
        for row in self.rows:
            out.append(
                f"{row.size:>4} {row.index:>5}  {_yn(row.condition.holds):<9}  "
                f"{_yn(row.valid):<7}  {_witness_text(row)}"
            )
        out.append(
            f"frames: {len(self.rows)}  condition-but-invalid: {len(self.unsound)}  "
            + (f"valid-but-no-condition: {len(self.incomplete)}  " if self.direction == "both" else "")
            + f"result: {'PASS' if self.passed else 'FAIL'}"
        )
        return "\n".join(out) + "\n"

    def format_lines(self) -> str:
        out = []
        for row in self.rows:
            out.append(
                f"size={row.size} index={row.index} condition={_yn(row.condition.holds)} "
                f"valid={_yn(row.valid)} witness={_witness_text(row).replace(' ', ',') or '-'}"
            )
        out.append(
            f"summary frames={len(self.rows)} unsound={len(self.unsound)} "
            f"incomplete={len(self.incomplete)} pass={_yn(self.passed)}"
        )
        return "\n".join(out) + "\n"


def _yn(v):
    return "-" if v is None else ("yes" if v else "no")


def _witness_text(row: SweepRow) -> str:
    parts = []
    if row.condition.witness:
        parts.append("cond:" + " ".join(row.condition.witness))
    if row.counterexample is not None:
        ce = row.counterexample
        val = ";".join(f"{p}={{{','.join(sorted(ws))}}}" for p, ws in sorted(ce.valuation.items()))
        parts.append(f"fails-at:{ce.world} {val}")
    return " ".join(parts)


def correspondence_sweep(
    n: int, c: FrameClass, direction: str = "both", budget: Optional[int] = None,
    cap: int = DEFAULT_CAP,
) -> SweepReport:
    """Compare the condition of *c* with validity of its schema on all frames with <= n worlds."""
    c = FrameClass(c)
    if c is FrameClass.IL:
        raise UsageError("IL has no extra schema to compare against")
    if direction not in ("both", "sound"):
        raise UsageError(f"direction must be 'both' or 'sound', got {direction!r}")
    schema = c.schema
    report = SweepReport(n, c, direction)
    for size, index, fr in frames_upto(n, cap=cap):
        cond = check_condition(fr, c)
        if direction == "sound" and not cond.holds:
            report.rows.append(SweepRow(size, index, fr, cond, None))
            continue
        ok, ce = frame_valid(fr, schema, budget)
        report.rows.append(SweepRow(size, index, fr, cond, ok, ce))
    return report
