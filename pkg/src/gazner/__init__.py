"""Inflection-tolerant, ontology-backed named entity recognition.

Entity labels and their inflected variants are matched in running text by a
two-layer finite-state transducer (characters to word ids, word ids to
entity ids). A stemming baseline and an evaluation harness are included.
"""

from .engine import Match, MultiLayerFST, vote
from .evaluation import (
    AnnotatedDocument,
    Annotation,
    MetricsReport,
    compare,
    levenshtein,
    parse_annotated,
    precision_suite,
    recall_by_ld,
)
from .lexicon import Gazetteer, TermEntry, TolerancePolicy, load_gazetteer, normalize_label
from .morphology import LemmaTable, inflected_forms, load_lemma_table, stem
from .recognizer import HierarchicalRecognizer, RecognizerConfig, build
from .stemfst import StemIndex, build_stem_index

__version__ = "0.1.0"

__all__ = [
    "AnnotatedDocument", "Annotation", "Gazetteer", "HierarchicalRecognizer",
    "LemmaTable", "Match", "MetricsReport", "MultiLayerFST", "RecognizerConfig",
    "StemIndex", "TermEntry", "TolerancePolicy", "build", "build_stem_index",
    "compare", "inflected_forms", "levenshtein", "load_gazetteer",
    "load_lemma_table", "normalize_label", "parse_annotated", "precision_suite",
    "recall_by_ld", "stem", "vote",
]
