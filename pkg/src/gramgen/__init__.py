"""Random consistent context-free grammars and positive/negative example sets for grammar inference."""

from .cnf import CnfGrammar, cyk_parse, enumerate_language, to_cnf
from .exampleset import ExampleSet, read_example_set, write_example_set
from .feasibility import GenerationParams, check_feasible, derive_params
from .generator import generate
from .grammar import Grammar, Rule, RuleClass, check_consistency, load_grammar, parse_grammar_text, save_grammar
from .negative import levenshtein_distance, levenshtein_negatives, random_negatives
from .positive import build_count_table, optimal_positive_set, sample_uniform, stratified_positive_set, to_linear

__all__ = [
    "CnfGrammar",
    "ExampleSet",
    "GenerationParams",
    "Grammar",
    "Rule",
    "RuleClass",
    "build_count_table",
    "check_consistency",
    "check_feasible",
    "cyk_parse",
    "derive_params",
    "enumerate_language",
    "generate",
    "levenshtein_distance",
    "levenshtein_negatives",
    "load_grammar",
    "optimal_positive_set",
    "parse_grammar_text",
    "random_negatives",
    "read_example_set",
    "sample_uniform",
    "save_grammar",
    "stratified_positive_set",
    "to_cnf",
    "to_linear",
    "write_example_set",
]
