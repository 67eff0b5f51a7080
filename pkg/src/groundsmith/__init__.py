"""groundsmith: natural-language robot commands to grounded LTL via
templated contextual queries, with OO-MDP planning and an interactive
service."""

__version__ = "0.1.0"

from .frontend import ContextualQuery, extract_cq
from .grounding import GroundingLexicon, build_registry, ground_token, label_state
from .ltl import LtlFormula, atoms, evaluate_trace, format_ltl, parse_ltl, simplify
from .planner import plan, progress
from .templates import TemplateLibrary, instantiate, learn_template, load_library, save_library
from .world import ToyState, WorldConfig, initial_state, transition

__all__ = [
    "ContextualQuery",
    "GroundingLexicon",
    "LtlFormula",
    "TemplateLibrary",
    "ToyState",
    "WorldConfig",
    "atoms",
    "build_registry",
    "evaluate_trace",
    "extract_cq",
    "format_ltl",
    "ground_token",
    "initial_state",
    "instantiate",
    "label_state",
    "learn_template",
    "load_library",
    "parse_ltl",
    "plan",
    "progress",
    "save_library",
    "simplify",
    "transition",
]
