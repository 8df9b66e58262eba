class WhyRankError(Exception):
    """Base class for data errors raised by the pipeline."""


class EmptyQueryError(WhyRankError):
    pass


class CorpusError(WhyRankError):
    pass


class EmptyDocumentError(WhyRankError):
    pass


class NoRootWordsError(WhyRankError):
    pass


class FormatError(WhyRankError):
    """An index or stats file has the wrong magic bytes or version."""
