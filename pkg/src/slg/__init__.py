"""Stochastic lexicalized tree adjoining grammars at four levels of dependency."""
from .grammar import (Grammar, ElementaryTree, TreeNode, GrammarError, parse_grammar,
                      render_grammar, load_grammar, validate_grammar)
from .derivation import (DerivationTree, Edge, MetaProduction, derive, parse_derivation,
                         render_derivation, parse_corpus, extract_events)
from .models import (Slg1Params, Slg2Params, Slg3Params, Slg4Params, InducedSlg3,
                     check_well_formed, score_derivation, lift, parse_params, render_params)
from .estimation import estimate, estimate_dop, extract_fragments, sample_corpus, sample_derivation
from .search import SearchBounds, enumerate_derivations, total_mass, nbest, sentence_probability
from .smoothing import BackoffConfig, build_smoothed
from .stats import ContingencyTable, chi_square, dependency_table

__all__ = [
    "Grammar", "ElementaryTree", "TreeNode", "GrammarError", "parse_grammar", "render_grammar",
    "load_grammar", "validate_grammar", "DerivationTree", "Edge", "MetaProduction", "derive",
    "parse_derivation", "render_derivation", "parse_corpus", "extract_events", "Slg1Params",
    "Slg2Params", "Slg3Params", "Slg4Params", "InducedSlg3", "check_well_formed",
    "score_derivation", "lift", "parse_params", "render_params", "estimate", "estimate_dop",
    "extract_fragments", "sample_corpus", "sample_derivation", "SearchBounds",
    "enumerate_derivations", "total_mass", "nbest", "sentence_probability", "BackoffConfig",
    "build_smoothed", "ContingencyTable", "chi_square", "dependency_table",
]
__version__ = "0.1.0"
