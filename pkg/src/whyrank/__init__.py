"""Why-question answer ranking over bigram word graphs with ranking-with-priors."""

from whyrank.errors import (
    CorpusError,
    EmptyDocumentError,
    EmptyQueryError,
    NoRootWordsError,
    WhyRankError,
)

__version__ = "0.1.0"

__all__ = [
    "CorpusError",
    "EmptyDocumentError",
    "EmptyQueryError",
    "NoRootWordsError",
    "WhyRankError",
    "__version__",
]
