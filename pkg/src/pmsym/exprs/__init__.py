"""Exact symbolic kernel: canonical expression trees, jet calculus, cases."""

from .nodes import (EPS, MINUS_ONE, ONE, Q, R, T, U, ZERO, Add, App, Coord,
                    Expr, ExprError, Fn, Jet, JetOrderError, Mul, Param, Pow,
                    Rat, add, app, as_affine_qr, base_split, coord, exact_divide, fn, jet,
                    mono_key, mul, num, param, pow_, simplify, term_split,
                    to_expr, to_text)
from .parser import parse
from .calculus import (compile_expr, evaluate, free_symbols, partial,
                       subst_functions, subst_many, substitute, total_derivative)
from .cases import (Case, apply_case, case_for, collect, collect_jets, jet_part,
                    split_u_classes, u_exponent)

__all__ = [
    "EPS", "MINUS_ONE", "ONE", "Q", "R", "T", "U", "ZERO",
    "Add", "App", "Coord", "Expr", "ExprError", "Fn", "Jet",
    "JetOrderError", "Mul", "Param", "Pow", "Rat",
    "add", "app", "as_affine_qr", "base_split", "coord", "fn", "jet",
    "exact_divide", "mono_key", "mul", "num", "param", "pow_", "simplify", "term_split",
    "to_expr", "to_text", "parse",
    "compile_expr", "evaluate", "free_symbols", "partial",
    "subst_functions", "subst_many", "substitute", "total_derivative",
    "Case", "apply_case", "case_for", "collect", "collect_jets", "jet_part",
    "split_u_classes", "u_exponent",
]
