import itertools

import pytest

from veltman.errors import UsageError
from veltman.formula import parse
from veltman.frameclass import (
    FrameClass, SCHEMAS, check_condition, correspondence_sweep, enumerate_frames, frames_upto,
)
from veltman.semantics import Frame, frame_valid, validate
from strategies import small_frames
from test_semantics import W_CYCLE

C = FrameClass


# --- independent oracles ---------------------------------------------------------

def brute_force_frames(n):
    """All Veltman frames on w1..wn: every relation R, every S_w inside w-up squared,
    kept when validate() reports nothing."""
    names = [f"w{i + 1}" for i in range(n)]
    pairs = [(a, b) for a in names for b in names]
    out = set()
    for bits in range(1 << len(pairs)):
        r = {pairs[i] for i in range(len(pairs)) if bits >> i & 1}
        if any((a, a) in r for a in names):
            continue
        if any((a, c) not in r for a, b in r for b2, c in r if b == b2):
            continue
        ups = {w: [b for a, b in r if a == w] for w in names}
        choices = []
        for w in names:
            cells = [(a, b) for a in ups[w] for b in ups[w]]
            choices.append([
                {cells[i] for i in range(len(cells)) if m >> i & 1} for m in range(1 << len(cells))
            ])
        for combo in itertools.product(*choices):
            fr = Frame(tuple(names), r, dict(zip(names, combo)))
            if not validate(fr):
                out.add(fr)
    return out


def naive_condition(fr: Frame, c: FrameClass) -> bool:
    W = fr.worlds
    R = fr.r
    S = fr.s
    if c is C.IL:
        return True
    if c is C.ILW:
        for x in W:
            comp = {(u, v) for u in W for v in W if any((u, w) in R and (w, v) in S[x] for w in W)}
            reach = set(comp)
            changed = True
            while changed:
                extra = {(a, d) for a, b in reach for c2, d in reach if b == c2} - reach
                reach |= extra
                changed = bool(extra)
            if any((u, u) in reach for u in W):
                return False
        return True
    if c is C.ILWstar:
        return naive_condition(fr, C.ILW) and naive_condition(fr, C.ILM0)
    if c is C.ILM:
        return all((y, u) in R for x, y, z, u in itertools.product(W, repeat=4)
                   if (y, z) in S[x] and (z, u) in R)
    if c is C.ILP:
        return all((z, u) in S[y] for x, y, z, u in itertools.product(W, repeat=4)
                   if (x, y) in R and (y, z) in R and (z, u) in S[x])
    antecedent = lambda x, y, z, u, v: (x, y) in R and (y, z) in R and (z, u) in S[x] and (u, v) in R
    five = list(itertools.product(W, repeat=5))
    if c is C.ILM0:
        return all((y, v) in R for t in five if antecedent(*t) for x, y, z, u, v in [t])
    if c is C.ILP0:
        return all((z, v) in S[y] for t in five if antecedent(*t) for x, y, z, u, v in [t])
    if c is C.ILM1:
        return all(any((y, w) in R and (w, v) in R for w in W)
                   for t in five if antecedent(*t) for x, y, z, u, v in [t])
    raise AssertionError(c)


# --- enumeration -------------------------------------------------------------------

def test_one_world():
    frames = list(enumerate_frames(1))
    assert len(frames) == 1 and frames[0].r == frozenset()


def test_two_worlds_hand_enumeration():
    frames = list(enumerate_frames(2))
    expected = [
        Frame(("w1", "w2"), set(), {}),
        Frame(("w1", "w2"), {("w1", "w2")}, {"w1": {("w2", "w2")}}),
        Frame(("w1", "w2"), {("w2", "w1")}, {"w2": {("w1", "w1")}}),
    ]
    assert sorted(map(hash, frames)) == sorted(map(hash, expected))
    assert set(frames) == set(expected)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_enumeration_matches_brute_force(n):
    frames = list(enumerate_frames(n))
    assert len(frames) == len(set(frames))
    assert set(frames) == brute_force_frames(n)


def test_enumeration_is_deterministic_and_duplicate_free_at_four():
    a = list(enumerate_frames(4))
    b = list(enumerate_frames(4))
    assert a == b
    assert len(set(a)) == len(a) == 1441


def test_enumeration_cap():
    with pytest.raises(UsageError):
        list(enumerate_frames(5))
    with pytest.raises(UsageError):
        list(enumerate_frames(0))
    with pytest.raises(UsageError):
        list(enumerate_frames(3, cap=2))


def test_filter_drops_frames():
    all3 = list(enumerate_frames(3))
    w3 = list(enumerate_frames(3, C.ILW))
    assert w3 == [fr for fr in all3 if check_condition(fr, C.ILW)]
    assert len(w3) < len(all3)


def test_frames_upto_indexes():
    rows = list(frames_upto(3))
    assert [k for k, _, _ in rows].count(2) == 3
    assert rows[0][:2] == (1, 0)


# --- conditions --------------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_empty_r_satisfies_everything(n):
    fr = Frame(tuple(f"w{i}" for i in range(n)), set())
    assert all(check_condition(fr, c).holds for c in C)


def test_w_cycle_witness():
    v = check_condition(W_CYCLE, C.ILW)
    assert not v.holds
    assert v.witness == ("x", "u", "w", "u")
    x, u, w, u2 = v.witness
    assert (u, w) in W_CYCLE.r and (w, u2) in W_CYCLE.s[x]


@pytest.mark.parametrize("c", list(C))
def test_conditions_agree_with_naive_quantifiers(c):
    for fr in small_frames(3):
        assert check_condition(fr, c).holds == naive_condition(fr, c), dumps_(fr)


@pytest.mark.parametrize("c", [C.ILM, C.ILP, C.ILM0, C.ILP0, C.ILM1, C.ILW])
def test_conditions_agree_with_naive_quantifiers_sampled_at_four(c):
    frames = list(enumerate_frames(4))[::11]
    for fr in frames:
        assert check_condition(fr, c).holds == naive_condition(fr, c)


def _witness_violates(fr, c, wit):
    R, S = fr.r, fr.s
    if c is C.ILM:
        x, y, z, u = wit
        return (y, z) in S[x] and (z, u) in R and (y, u) not in R
    if c is C.ILP:
        x, y, z, u = wit
        return (x, y) in R and (y, z) in R and (z, u) in S[x] and (z, u) not in S[y]
    x, y, z, u, v = wit
    pre = (x, y) in R and (y, z) in R and (z, u) in S[x] and (u, v) in R
    if c is C.ILM0:
        return pre and (y, v) not in R
    if c is C.ILP0:
        return pre and (z, v) not in S[y]
    if c is C.ILM1:
        return pre and not any((y, w) in R and (w, v) in R for w in fr.worlds)


@pytest.mark.parametrize("c", [C.ILM, C.ILP, C.ILM0, C.ILP0, C.ILM1])
def test_failure_witnesses_are_genuine(c):
    for fr in enumerate_frames(4):
        v = check_condition(fr, c)
        if not v.holds:
            assert _witness_violates(fr, c, v.witness)


def test_w_witnesses_trace_cycles():
    for fr in enumerate_frames(4):
        v = check_condition(fr, C.ILW)
        if v.holds:
            continue
        x, *path = v.witness
        assert path[0] == path[-1]
        for a, m, b in zip(path[0::2], path[1::2], path[2::2]):
            assert (a, m) in fr.r and (m, b) in fr.s[x]


def test_p0_frames_are_m0_frames_at_three():
    for fr in enumerate_frames(3, C.ILP0):
        assert check_condition(fr, C.ILM0)


def test_check_condition_rejects_invalid_frames():
    with pytest.raises(UsageError):
        check_condition(Frame(("a", "b"), {("a", "b")}), C.ILM)


def test_lookup():
    assert C.lookup("ilw*") is C.ILWstar
    assert C.lookup("ILP0") is C.ILP0
    with pytest.raises(UsageError):
        C.lookup("ILX")


# --- sweeps ------------------------------------------------------------------------

@pytest.mark.parametrize("c", [C.ILM, C.ILW])
def test_correspondence_at_three(c):
    report = correspondence_sweep(3, c, "both")
    assert report.passed and report.disagreements == []
    assert len(report.rows) == 1 + 3 + 34


def test_m1_soundness_only():
    report = correspondence_sweep(3, C.ILM1, "sound")
    assert report.unsound == []
    assert all(r.valid is None for r in report.rows if not r.condition.holds)


def test_sweep_reports_disagreement_for_mismatched_schema(monkeypatch):
    # the M0 condition paired with schema M: six 3-world frames separate them
    monkeypatch.setitem(SCHEMAS, C.ILM0, SCHEMAS[C.ILM])
    report = correspondence_sweep(3, C.ILM0, "both")
    assert not report.passed
    assert len(report.unsound) == 6 and report.incomplete == []
    for row in report.unsound:
        assert not frame_valid(row.frame, SCHEMAS[C.ILM])[0]
    assert "FAIL" in report.format_table()
    assert "pass=no" in report.format_lines()


def test_sweep_usage_errors():
    with pytest.raises(UsageError):
        correspondence_sweep(3, C.IL)
    with pytest.raises(UsageError):
        correspondence_sweep(3, C.ILM, "sideways")


def test_report_formats():
    report = correspondence_sweep(2, C.ILP)
    table = report.format_table()
    assert "result: PASS" in table and table.count("\n") == 2 + 4 + 1
    lines = report.format_lines().splitlines()
    assert lines[0].startswith("size=1 index=0 condition=yes valid=yes")
    assert lines[-1] == "summary frames=4 unsound=0 incomplete=0 pass=yes"


def dumps_(fr):
    from veltman.semantics import dumps
    return dumps(fr)
