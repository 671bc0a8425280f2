"""Text processing shared by every representation builder."""

from .language import detect_language
from .pipeline import (
    BOILERPLATE_STOPWORDS,
    DEFAULT_PIPELINE,
    GENERAL_STOPWORDS,
    TextPipeline,
    load_stoplist,
    pipeline,
    remove_stopwords,
    split_identifier,
    stem,
    strip_markup,
)
from .porter import porter_stem

__all__ = [
    "BOILERPLATE_STOPWORDS",
    "DEFAULT_PIPELINE",
    "GENERAL_STOPWORDS",
    "TextPipeline",
    "detect_language",
    "load_stoplist",
    "pipeline",
    "porter_stem",
    "remove_stopwords",
    "split_identifier",
    "stem",
    "strip_markup",
]
