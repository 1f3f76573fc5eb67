"""Semantically labelled LDBAs for LTL-conditioned reinforcement learning."""
from .errors import CapExceeded, PathCountCapError, StateCapError, TruenessCapError
from .formula import (
    FALSE,
    TRUE,
    Formula,
    always,
    atom,
    canonicalize,
    conj,
    disj,
    eventually,
    implies_syntactic,
    neg,
    next_,
    render,
    until,
)
from .lasso import LassoWord, eval_lasso, parse_letter, parse_word, powerset
from .ldba import (
    Automaton,
    OnTheFly,
    SemanticState,
    accepts_lasso,
    build_full,
    count_simple_paths,
    epsilon_targets,
    initial_state,
    reset,
    simple_path_closed_form,
    step,
)
from .parser import ParseError, UnknownOperatorError, parse
from .progression import prog, prog_word
from .propositional import Trueness, obligations, trueness

__version__ = "0.1.0"
