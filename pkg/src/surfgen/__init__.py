"""Surface generation from logical forms with LR-style compiled tables."""

from .engine import GenSession, Realization, compare_cost, generate, shdg_generate
from .grammar import Grammar, NormalGrammar, check_offline_parsability, normalize, parse_grammar
from .invert import invert
from .parseref import compile_parse_tables, lr_parse
from .tables import DepthConfig, GenTables, compile_tables, optimize_depths, reductive_score
from .term import format_term, parse_term, unify

__all__ = [
    "GenSession", "Realization", "compare_cost", "generate", "shdg_generate",
    "Grammar", "NormalGrammar", "check_offline_parsability", "normalize", "parse_grammar",
    "invert", "compile_parse_tables", "lr_parse",
    "DepthConfig", "GenTables", "compile_tables", "optimize_depths", "reductive_score",
    "format_term", "parse_term", "unify",
]
