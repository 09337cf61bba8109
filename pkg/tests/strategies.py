"""Hypothesis strategies shared by the test modules."""
from functools import lru_cache

from hypothesis import strategies as st

from veltman.formula import And, Atom, Bot, Box, Dia, Iff, Imp, Not, Or, Rhd, Top
from veltman.frameclass import enumerate_frames
from veltman.semantics import Model

ATOM_NAMES = ("p", "q", "r", "A", "B", "x1", "long_name")


@lru_cache(maxsize=None)
def formulas(depth: int = 8, names: tuple = ATOM_NAMES):
    leaves = st.one_of(st.sampled_from(names).map(Atom), st.just(Bot()), st.just(Top()))
    if depth == 0:
        return leaves
    sub = formulas(depth - 1, names)
    unary = st.sampled_from((Not, Box, Dia))
    binary = st.sampled_from((And, Or, Imp, Iff, Rhd))
    return st.one_of(
        leaves,
        st.builds(lambda c, f: c(f), unary, sub),
        st.builds(lambda c, f, g: c(f, g), binary, sub, sub),
    )


@lru_cache(maxsize=None)
def small_frames(max_worlds: int = 3):
    return [fr for n in range(1, max_worlds + 1) for fr in enumerate_frames(n)]


@st.composite
def models(draw, max_worlds=3, names=("p", "q", "r")):
    fr = draw(st.sampled_from(small_frames(max_worlds)))
    val = {p: draw(st.sets(st.sampled_from(fr.worlds))) for p in names}
    return Model(fr, val)
