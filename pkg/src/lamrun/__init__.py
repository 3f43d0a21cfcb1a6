"""Abstract machines for closed call-by-name and their type-derived cost predictions."""

from .syntax import App, Lam, Term, Var, parse, pretty, whnf_trace  # noqa: F401  (re-exports)
