"""Interpretability logic on finite Veltman frames."""
from importlib import resources

from .errors import FormulaSyntaxError, ResourceError, UsageError, VeltmanError
from .formula import Formula, parse, render, substitute
from .semantics import Frame, Model, forces, frame_valid, validate
from .frameclass import FrameClass, check_condition, correspondence_sweep, enumerate_frames
from .calculus import check_proof, check_tautology, load_proof, loads_proof
from .closure import RuleSet, Sketch, close, holds_in_closure

__version__ = "0.1.0"


def data_path(name: str):
    """Path of a file shipped in ``veltman/data`` (proofs, sample frames, sketches)."""
    return resources.files(__package__).joinpath("data", name)
