"""Extraction, classification and guideline checking of class comments.

Supports Javadoc class comments, Python class docstrings and Smalltalk
class comments in Tonel files.
"""

from .errors import ClassCommentsError, ConfigError, DataError
from .extraction import ClassComment, Language, SourceFile, extract_class_comments, read_source
from .features import FeatureMode, Featurizer, load_pattern_library
from .learners import Algorithm, LearnerParams, MultiLabelModel, classify, train_multilabel
from .taxonomy import LabeledComment, Taxonomy, load_taxonomy

__version__ = "0.1.0"

__all__ = [
    "Algorithm",
    "ClassComment",
    "ClassCommentsError",
    "ConfigError",
    "DataError",
    "FeatureMode",
    "Featurizer",
    "LabeledComment",
    "Language",
    "LearnerParams",
    "MultiLabelModel",
    "SourceFile",
    "Taxonomy",
    "classify",
    "extract_class_comments",
    "load_pattern_library",
    "load_taxonomy",
    "read_source",
    "train_multilabel",
]
