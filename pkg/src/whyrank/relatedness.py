"""Document-frequency statistics over a reference corpus and the PMI measures on top.

Four tables are counted, each as "number of reference documents in which X
happens at least twice":

* ``uni``      a token occurs >= 2 times
* ``adj``      an unordered adjacent word pair occurs >= 2 times (either order)
* ``big``      an ordered bigram occurs >= 2 times
* ``bigpair``  two distinct bigrams each occur >= 2 times in the same document

Adjacent pairs and bigrams are taken within sentences only, matching how the
word graph is built.
"""

from __future__ import annotations

import json
import math
import struct
import zlib
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Optional

from whyrank.errors import CorpusError, FormatError
from whyrank.retrieval import Document, load_corpus
from whyrank.textprep import TOKENIZER_VERSION, segment

STATS_MAGIC = b"WRPS"
STATS_VERSION = 1
MIN_COUNT = 2

Bigram = tuple[str, str]


def _pair(a, b):
    return (a, b) if a <= b else (b, a)


@dataclass
class PmiStats:
    n_docs: int = 0
    uni: Counter = field(default_factory=Counter)
    adj: Counter = field(default_factory=Counter)
    big: Counter = field(default_factory=Counter)
    bigpair: Counter = field(default_factory=Counter)

    def add_document(self, sentences: Iterable[list[str]]) -> None:
        sentences = list(sentences)
        tok_counts = Counter(t for s in sentences for t in s)
        bigram_counts: Counter = Counter()
        for s in sentences:
            bigram_counts.update(zip(s, s[1:]))
        pair_counts: Counter = Counter()
        for (a, b), c in bigram_counts.items():
            if a != b:
                pair_counts[_pair(a, b)] += c

        self.n_docs += 1
        self.uni.update(t for t, c in tok_counts.items() if c >= MIN_COUNT)
        self.adj.update(p for p, c in pair_counts.items() if c >= MIN_COUNT)
        frequent = sorted(b for b, c in bigram_counts.items() if c >= MIN_COUNT)
        self.big.update(frequent)
        self.bigpair.update(combinations(frequent, 2))

    def merge(self, other: "PmiStats") -> "PmiStats":
        self.n_docs += other.n_docs
        self.uni.update(other.uni)
        self.adj.update(other.adj)
        self.big.update(other.big)
        self.bigpair.update(other.bigpair)
        return self

    def semantic_pmi(self, t_i: str, t_j: str) -> Optional[float]:
        return semantic_pmi(self, t_i, t_j)

    def topical_pmi(self, b1: Bigram, b2: Bigram) -> Optional[float]:
        return topical_pmi(self, b1, b2)

    def to_bytes(self) -> bytes:
        header = json.dumps({
            "n_docs": self.n_docs,
            "tokenizer_version": TOKENIZER_VERSION,
            "min_count": MIN_COUNT,
        }, sort_keys=True, separators=(",", ":")).encode("utf-8")
        body = json.dumps({
            "uni": _sorted_table(self.uni, lambda k: k),
            "adj": _sorted_table(self.adj, " ".join),
            "big": _sorted_table(self.big, " ".join),
            "bigpair": _sorted_table(self.bigpair, lambda k: " ".join(k[0]) + "|" + " ".join(k[1])),
        }, ensure_ascii=False, separators=(",", ":")).encode("utf-8")
        return (STATS_MAGIC + struct.pack("<II", STATS_VERSION, len(header)) + header
                + zlib.compress(body, 6))

    @classmethod
    def from_bytes(cls, raw: bytes) -> "PmiStats":
        if raw[:4] != STATS_MAGIC:
            raise FormatError("not a PMI stats file")
        version, hlen = struct.unpack("<II", raw[4:12])
        if version != STATS_VERSION:
            raise FormatError(f"unsupported stats version {version}")
        header = json.loads(raw[12:12 + hlen])
        if header["tokenizer_version"] != TOKENIZER_VERSION:
            raise FormatError("stats were built with a different tokenizer")
        body = json.loads(zlib.decompress(raw[12 + hlen:]).decode("utf-8"))

        def bigram(s):
            a, b = s.split(" ")
            return (a, b)

        return cls(
            n_docs=header["n_docs"],
            uni=Counter(dict(body["uni"])),
            adj=Counter({bigram(k): v for k, v in body["adj"]}),
            big=Counter({bigram(k): v for k, v in body["big"]}),
            bigpair=Counter({tuple(bigram(x) for x in k.split("|")): v for k, v in body["bigpair"]}),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path: str | Path) -> "PmiStats":
        try:
            raw = Path(path).read_bytes()
        except OSError as exc:
            raise FormatError(f"cannot read stats {path}: {exc}") from exc
        return cls.from_bytes(raw)


def _sorted_table(counter: Counter, key_fn) -> list:
    return [[key_fn(k), v] for k, v in sorted(counter.items())]


def _pmi(n: int, joint: int, c1: int, c2: int) -> Optional[float]:
    if joint == 0 or c1 == 0 or c2 == 0:
        return None
    return math.log2(n * joint / (c1 * c2))


def semantic_pmi(stats: PmiStats, t_i: str, t_j: str) -> Optional[float]:
    """log2(N * CW(ti,tj) / (CW(ti) * CW(tj))), or None when any count is zero."""
    if t_i == t_j:
        return None
    return _pmi(stats.n_docs, stats.adj.get(_pair(t_i, t_j), 0),
                stats.uni.get(t_i, 0), stats.uni.get(t_j, 0))


def topical_pmi(stats: PmiStats, b1: Bigram, b2: Bigram) -> Optional[float]:
    """log2(N * CW(B1,B2) / (CW(B1) * CW(B2))), or None when any count is zero.

    For ``b1 == b2`` the joint count is CW(B) itself, giving log2(N / CW(B)).
    """
    b1, b2 = tuple(b1), tuple(b2)
    c1 = stats.big.get(b1, 0)
    c2 = stats.big.get(b2, 0)
    joint = c1 if b1 == b2 else stats.bigpair.get(_pair(b1, b2), 0)
    return _pmi(stats.n_docs, joint, c1, c2)


def _count_texts(texts: list[str]) -> PmiStats:
    stats = PmiStats()
    for text in texts:
        stats.add_document(segment(text).sentences)
    return stats


def build_stats(reference_corpus_path: str | Path, workers: int = 1) -> PmiStats:
    docs = load_corpus(reference_corpus_path)
    return stats_from_documents(docs, workers=workers)


def stats_from_documents(docs: list[Document], workers: int = 1) -> PmiStats:
    if not docs:
        raise CorpusError("empty reference corpus")
    texts = [(d.title + "\n\n" + d.text) if d.title else d.text for d in docs]
    if workers <= 1 or len(texts) < 2 * workers:
        return _count_texts(texts)
    chunks = [texts[i::workers] for i in range(workers)]
    total = PmiStats()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_count_texts, chunks):
            total.merge(part)
    return total


def stats_from_texts(texts: Iterable[str]) -> PmiStats:
    """Convenience for tests and small in-memory reference sets."""
    texts = list(texts)
    if not texts:
        raise CorpusError("empty reference corpus")
    return _count_texts(texts)


__all__ = [
    "PmiStats", "build_stats", "semantic_pmi", "stats_from_documents",
    "stats_from_texts", "topical_pmi",
]
