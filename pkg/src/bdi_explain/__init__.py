"""Full and contrastive explanations of BDI agent actions over goal-plan trees."""

__version__ = "0.1.0"

from .errors import (
    ExplainError,
    InvalidFoilError,
    NoValidFoilsError,
    NotInTraceError,
    TreeFormatError,
    UnknownNodeError,
)
from .explain import (
    Belief,
    Desire,
    Valuing,
    explain_contrastive,
    explain_full,
    explain_implicit,
    filter_pre,
    render_text,
)
from .trace import TraceRecord, generate_trace, load_trace, parse_trace, validate_trace
from .tree import ChildEdge, GoalPlanTree, Node, NodeKind, load_tree, parse_tree
from .treegen import GenParams, gen_corpus, gen_tree


def data_file(name: str):
    """Path-like handle to a bundled data file, e.g. ``data_file("coffee.json")``."""
    from importlib.resources import files

    return files(__name__).joinpath("data", name)
