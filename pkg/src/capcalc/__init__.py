"""A comonadic capability calculus: checker, interpreter, weights and law harnesses."""
from .parser import ParseError, parse, parse_term, parse_type, show, show_type
from .syntax import Context, Subst, alpha_equal, free_vars, is_value
from .typecheck import CapTypeError, infer, infer_safe
from .interp import eval_term, run

__all__ = [
    "CapTypeError", "Context", "ParseError", "Subst", "alpha_equal", "eval_term",
    "free_vars", "infer", "infer_safe", "is_value", "parse", "parse_term",
    "parse_type", "run", "show", "show_type",
]
