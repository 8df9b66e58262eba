"""Structured queries and a small TF-IDF index standing in for a search engine.

Documents are scored by cosine similarity between the bag of query tokens and
the document, both weighted ``(1 + ln tf) * idf``. A document that covers
every token of at least one AND-group gets its score multiplied by
``group_boost``. Scores are divided by the best score of the query so the top
document has relevance exactly 1.0.
"""

from __future__ import annotations

import json
import math
import struct
import zlib
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from whyrank.errors import CorpusError, EmptyQueryError, FormatError
from whyrank.textprep import Lexicons, tokenize, tokenize_with_spans

INDEX_MAGIC = b"WRIX"
INDEX_VERSION = 1
DEFAULT_GROUP_BOOST = 1.5
DEFAULT_TOP_K = 100


@dataclass
class StructuredQuery:
    groups: list[list[str]]
    original_question: str

    def terms(self) -> list[str]:
        """All query tokens in question order, with repeats."""
        return [t for g in self.groups for t in g]

    def __str__(self) -> str:
        return " OR ".join("(" + " AND ".join(g) + ")" for g in self.groups)


@dataclass(frozen=True)
class RetrievedDocument:
    doc_id: str
    relevance: float


def build_query(question: str, lex: Lexicons) -> StructuredQuery:
    """Turn a question into OR-ed AND-groups.

    Stopwords and punctuation end the current run of words; the run becomes
    one AND-group. The word "and" between two runs joins them instead of
    separating them. Frequent verbs are pulled out into their own group.
    """
    lowered = question.lower()
    groups: list[list[str]] = []
    run: list[str] = []
    join_next = False
    prev_end = 0

    def close():
        nonlocal run
        if run:
            groups.append(run)
        run = []

    for tok, start, end in tokenize_with_spans(question):
        if lowered[prev_end:start].strip():
            # punctuation between tokens
            close()
            join_next = False
        prev_end = end
        if tok in lex.stopwords:
            if tok == "and" and (run or groups):
                if run:
                    close()
                join_next = True
            else:
                close()
                join_next = False
            continue
        if tok in lex.frequent_verbs:
            close()
            groups.append([tok])
            join_next = False
            continue
        if join_next and not run and groups and not _is_verb_group(groups[-1], lex):
            run = groups.pop()
        join_next = False
        run.append(tok)
    close()
    if not groups:
        raise EmptyQueryError(f"empty query: no content words in {question!r}")
    return StructuredQuery(groups, question)


def _is_verb_group(group: list[str], lex: Lexicons) -> bool:
    return len(group) == 1 and group[0] in lex.frequent_verbs


@dataclass
class Document:
    doc_id: str
    text: str
    title: str = ""


def iter_corpus(path: str | Path) -> Iterator[Document]:
    """Yield documents from a directory of .txt files or a JSON-lines file."""
    path = Path(path)
    if path.is_dir():
        for p in sorted(path.glob("*.txt")):
            try:
                text = p.read_text(encoding="utf-8")
            except (OSError, UnicodeDecodeError) as exc:
                raise CorpusError(f"cannot read document {p.stem!r}: {exc}") from exc
            yield Document(p.stem, text)
    elif path.is_file():
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                    doc_id = str(obj["id"])
                except (ValueError, KeyError, TypeError) as exc:
                    raise CorpusError(f"{path}:{lineno}: bad record: {exc}") from exc
                yield Document(doc_id, obj.get("text") or "", obj.get("title") or "")
    else:
        raise CorpusError(f"corpus not found: {path}")


def load_corpus(path: str | Path) -> list[Document]:
    docs = list(iter_corpus(path))
    if not docs:
        raise CorpusError("empty corpus")
    seen: set[str] = set()
    dups = []
    for d in docs:
        if d.doc_id in seen:
            dups.append(d.doc_id)
        seen.add(d.doc_id)
    if dups:
        raise CorpusError("duplicate doc_id: " + ", ".join(sorted(set(dups))))
    return docs


def _index_tokens(doc: Document) -> list[str]:
    return tokenize(doc.title) + tokenize(doc.text)


class CorpusIndex:
    """In-memory inverted index with raw text kept alongside."""

    def __init__(self, postings: dict[str, dict[str, int]], doc_len: dict[str, int],
                 texts: dict[str, str], titles: dict[str, str] | None = None):
        self.postings = postings
        self.doc_len = doc_len
        self.texts = texts
        self.titles = titles or {}
        self.doc_ids = sorted(doc_len)
        self._norms: dict[str, float] | None = None

    @property
    def n_docs(self) -> int:
        return len(self.doc_len)

    @classmethod
    def from_documents(cls, docs: list[Document]) -> "CorpusIndex":
        postings: dict[str, dict[str, int]] = {}
        doc_len = {}
        for doc in docs:
            counts = Counter(_index_tokens(doc))
            doc_len[doc.doc_id] = sum(counts.values())
            for term, tf in counts.items():
                postings.setdefault(term, {})[doc.doc_id] = tf
        return cls(postings, doc_len,
                   {d.doc_id: d.text for d in docs},
                   {d.doc_id: d.title for d in docs if d.title})

    def idf(self, term: str) -> float:
        df = len(self.postings.get(term, ()))
        # +1 keeps a term that occurs in every document from scoring zero
        return math.log((1 + self.n_docs) / (1 + df)) + 1.0

    def _doc_norms(self) -> dict[str, float]:
        if self._norms is None:
            sq = dict.fromkeys(self.doc_len, 0.0)
            for term, plist in self.postings.items():
                idf = self.idf(term)
                for doc_id, tf in plist.items():
                    sq[doc_id] += ((1 + math.log(tf)) * idf) ** 2
            self._norms = {d: math.sqrt(v) for d, v in sq.items()}
        return self._norms

    def document(self, doc_id: str) -> Document:
        return Document(doc_id, self.texts[doc_id], self.titles.get(doc_id, ""))

    def verify(self) -> bool:
        """Recount postings from the stored text and compare."""
        fresh = CorpusIndex.from_documents([self.document(d) for d in self.doc_ids])
        return fresh.postings == self.postings and fresh.doc_len == self.doc_len

    def save(self, path: str | Path) -> None:
        body = json.dumps(
            {"postings": self.postings, "doc_len": self.doc_len,
             "texts": self.texts, "titles": self.titles},
            sort_keys=True, ensure_ascii=False, separators=(",", ":"),
        ).encode("utf-8")
        with open(path, "wb") as fh:
            fh.write(INDEX_MAGIC)
            fh.write(struct.pack("<II", INDEX_VERSION, self.n_docs))
            fh.write(zlib.compress(body, 6))

    @classmethod
    def load(cls, path: str | Path) -> "CorpusIndex":
        try:
            raw = Path(path).read_bytes()
        except OSError as exc:
            raise FormatError(f"cannot read index {path}: {exc}") from exc
        if raw[:4] != INDEX_MAGIC:
            raise FormatError(f"{path}: not an index file")
        version, n_docs = struct.unpack("<II", raw[4:12])
        if version != INDEX_VERSION:
            raise FormatError(f"{path}: unsupported index version {version}")
        data = json.loads(zlib.decompress(raw[12:]).decode("utf-8"))
        index = cls(data["postings"], data["doc_len"], data["texts"], data["titles"])
        if index.n_docs != n_docs:
            raise FormatError(f"{path}: header says {n_docs} documents, body has {index.n_docs}")
        return index


def index_corpus(corpus_path: str | Path) -> CorpusIndex:
    return CorpusIndex.from_documents(load_corpus(corpus_path))


def retrieve(index: CorpusIndex, q: StructuredQuery, k: int = DEFAULT_TOP_K,
             group_boost: float = DEFAULT_GROUP_BOOST) -> list[RetrievedDocument]:
    if k < 1:
        raise ValueError("k must be >= 1")
    qtf = Counter(q.terms())
    qweights = {t: (1 + math.log(c)) * index.idf(t) for t, c in qtf.items()}
    qnorm = math.sqrt(sum(w * w for w in qweights.values()))

    dots: dict[str, float] = {}
    for term, qw in qweights.items():
        for doc_id, tf in index.postings.get(term, {}).items():
            dots[doc_id] = dots.get(doc_id, 0.0) + qw * (1 + math.log(tf)) * index.idf(term)
    if not dots:
        return []

    norms = index._doc_norms()
    scores = {}
    for doc_id, dot in dots.items():
        s = dot / (qnorm * norms[doc_id])
        if any(all(doc_id in index.postings.get(t, ()) for t in g) for g in q.groups):
            s *= group_boost
        scores[doc_id] = s

    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
    top = ranked[0][1]
    return [RetrievedDocument(d, s / top) for d, s in ranked]
