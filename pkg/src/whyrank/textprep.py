"""Tokenization, sentence/paragraph segmentation and lexicon handling.

Every other module goes through :func:`tokenize` so that PMI keys, graph
nodes and query terms live in one token space: lowercase runs of letters and
digits, everything else is a separator.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

TOKENIZER_VERSION = 1

_TOKEN_RE = re.compile(r"[^\W_]+")
_PARAGRAPH_RE = re.compile(r"\n[ \t\r\f\v]*\n")
_SENTENCE_END_RE = re.compile(r"(?<=[.!?])\s+")


def tokenize(text: str) -> list[str]:
    """Lowercase ``text`` and return its letter/digit runs in order.

    >>> tokenize("White flag, a symbol!")
    ['white', 'flag', 'a', 'symbol']
    >>> tokenize("A.D. 109")
    ['a', 'd', '109']
    """
    return _TOKEN_RE.findall(text.lower())


def tokenize_with_spans(text: str) -> list[tuple[str, int, int]]:
    """Like :func:`tokenize` but keeps (start, end) offsets into ``text.lower()``."""
    return [(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text.lower())]


@dataclass
class SentenceList:
    """A document split into tokenized sentences grouped by paragraph.

    ``paragraph_bounds`` holds half-open sentence-index ranges. Sentences
    without any token are dropped, as are paragraphs left empty by that.
    """

    sentences: list[list[str]]
    paragraph_bounds: list[tuple[int, int]]
    sentence_text: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.sentences)

    def tokens(self) -> list[str]:
        return [t for s in self.sentences for t in s]

    def vocab(self) -> set[str]:
        return {t for s in self.sentences for t in s}

    def paragraph_of(self, sentence_index: int) -> int:
        for i, (start, end) in enumerate(self.paragraph_bounds):
            if start <= sentence_index < end:
                return i
        raise IndexError(sentence_index)

    def text(self, start: int, end: int) -> str:
        return " ".join(self.sentence_text[start:end])


def segment(text: str) -> SentenceList:
    """Split ``text`` into paragraphs (blank lines) and sentences.

    A sentence ends at '.', '!' or '?' followed by whitespace or the end of
    the text; trailing words without terminal punctuation still form a
    sentence.
    """
    sentences: list[list[str]] = []
    raw: list[str] = []
    bounds: list[tuple[int, int]] = []
    for para in _PARAGRAPH_RE.split(text):
        start = len(sentences)
        for chunk in _SENTENCE_END_RE.split(para.strip()):
            toks = tokenize(chunk)
            if toks:
                sentences.append(toks)
                raw.append(" ".join(chunk.split()))
        if len(sentences) > start:
            bounds.append((start, len(sentences)))
    return SentenceList(sentences, bounds, raw)


def read_wordlist(path: str | Path) -> frozenset[str]:
    """One token per line; blank lines and '#' comments are ignored."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                words.add(line.lower())
    return frozenset(words)


@dataclass(frozen=True)
class Lexicons:
    stopwords: frozenset[str]
    frequent_verbs: frozenset[str] = frozenset()
    source: dict = field(default_factory=dict, compare=False)

    @classmethod
    def load(cls, stopwords: str | Path | None = None,
             frequent_verbs: str | Path | None = None) -> "Lexicons":
        """Load word lists from files, falling back to the bundled ones."""
        data = resources.files("whyrank") / "data"
        with resources.as_file(data / "stopwords.txt") as default_stop, \
                resources.as_file(data / "frequent_verbs.txt") as default_verbs:
            stop_path = Path(stopwords) if stopwords else default_stop
            verb_path = Path(frequent_verbs) if frequent_verbs else default_verbs
            stop = read_wordlist(stop_path)
            verbs = read_wordlist(verb_path)
        source = {
            "stopwords": str(stopwords) if stopwords else "builtin:stopwords.txt",
            "stopword_count": len(stop),
            "frequent_verbs": str(frequent_verbs) if frequent_verbs else "builtin:frequent_verbs.txt",
            "frequent_verb_count": len(verbs),
        }
        return cls(stop, verbs, source)

    @classmethod
    def from_words(cls, stopwords: Iterable[str], frequent_verbs: Iterable[str] = ()) -> "Lexicons":
        stop = frozenset(w.lower() for w in stopwords)
        verbs = frozenset(w.lower() for w in frequent_verbs)
        return cls(stop, verbs, {"stopwords": "inline", "stopword_count": len(stop),
                                 "frequent_verbs": "inline", "frequent_verb_count": len(verbs)})


def root_words(question: str, doc_vocab: set[str], lex: Lexicons) -> set[str]:
    """Non-stopword question tokens that also occur in the document."""
    return {t for t in tokenize(question) if t not in lex.stopwords and t in doc_vocab}
