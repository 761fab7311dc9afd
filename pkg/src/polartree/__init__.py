"""Parsing toolkit for interaction grammars.

Words are associated with polarized tree descriptions; parsing composes
them by controlled node merging until every polarity is saturated, and
the saturated descriptions are linearized into ordered syntactic trees
that are minimal saturated models of the input descriptions.

The toolkit is organized as a library:

- :mod:`polartree.features` -- feature signatures, polarities, value sets
  and the global saturation predicate;
- :mod:`polartree.trees` -- ordered syntactic trees and the model checker;
- :mod:`polartree.descriptions` -- polarized tree descriptions and the
  node-merging engine with constraint propagation;
- :mod:`polartree.grammar` -- grammar/lexicon files, tokenization,
  anchoring and lexical-selection graphs;
- :mod:`polartree.filtering` -- the polarity-counting selection filter;
- :mod:`polartree.engines` -- incremental and chart-based deep parsers
  plus model extraction;
- :mod:`polartree.cli` -- batch command line front end;
- :mod:`polartree.service` -- interactive step-through debugging service.
"""

from polartree.features import (
    FeatureSignature,
    Polarity,
    ValueClash,
    compatible,
    globally_saturated,
    intersect_values,
    is_active,
)
from polartree.trees import TreeNode, check_model, find_interpretations, phonological_projection
from polartree.descriptions import PTD, DescNode, MergeError, merge_nodes
from polartree.grammar import Grammar, Lexicon, load_grammar, load_lexicon, tokenize
from polartree.engines import ParseOptions, parse

__all__ = [
    "FeatureSignature",
    "Polarity",
    "ValueClash",
    "compatible",
    "globally_saturated",
    "intersect_values",
    "is_active",
    "TreeNode",
    "check_model",
    "find_interpretations",
    "phonological_projection",
    "PTD",
    "DescNode",
    "MergeError",
    "merge_nodes",
    "Grammar",
    "Lexicon",
    "load_grammar",
    "load_lexicon",
    "tokenize",
    "ParseOptions",
    "parse",
]

__version__ = "0.1.0"
