"""Controlled-language checker for German technical documentation in XML."""

from .docmodel import (
    DocumentTree,
    Sentence,
    TextBlock,
    XMLSyntaxError,
    extract_text_blocks,
    parse_document,
    serialize,
    split_sentences,
    tokenize,
)
from .morphlex import (
    Lexicon,
    LexiconError,
    NoSegmentationError,
    classify_formation_pattern,
    count_lexical_morphemes,
    is_finite_verb_form,
    is_infinitive_form,
    load_lexicon,
    segment_compound,
)
from .reuse import ReuseStats, compute_reuse_stats
from .rules import Diagnostic, RuleConfig, RuleConfigError, check_document, load_rule_config
from .termbase import (
    Termbase,
    TermbaseError,
    check_concept_integrity,
    detect_ambiguous_terms,
    evaluate_preferred_term,
    find_occurrences,
    load_termbase,
    lookup,
    save_termbase,
)

__version__ = "0.1.0"
