"""Per-document word graph.

Nodes are the distinct tokens of one document. Two tokens are linked every
time they stand next to each other inside a sentence, so an edge carries a
link count (``multiplicity``) and a real ``weight`` used by the random walk.
Three things modify a freshly built graph, in this order:

1. :func:`boost_question_bigrams` adds extra links for bigrams shared with the question.
2. :func:`apply_semantic_weights` sets ``weight = multiplicity * PMI``.
3. :func:`add_topical_edges` bridges topically related bigrams that are not linked.

All three mutate the graph in place and return it.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from whyrank.errors import EmptyDocumentError
from whyrank.relatedness import PmiStats, semantic_pmi, topical_pmi
from whyrank.textprep import SentenceList

DEFAULT_EPSILON_PMI = 0.05


@dataclass
class Edge:
    multiplicity: int = 0
    weight: float = 0.0
    boost: int = 0
    topical: float = 0.0

    @property
    def origin(self) -> str:
        tags = []
        if self.multiplicity - self.boost > 0:
            tags.append("adjacency")
        if self.boost:
            tags.append("boost")
        if self.topical:
            tags.append("topical")
        return "+".join(tags)


def _key(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u <= v else (v, u)


class WordGraph:
    """Undirected graph, one record per unordered node pair."""

    def __init__(self):
        self.nodes: list[str] = []
        self._index: dict[str, int] = {}
        self.edges: dict[tuple[str, str], Edge] = {}

    def add_node(self, token: str) -> None:
        if token not in self._index:
            self._index[token] = len(self.nodes)
            self.nodes.append(token)

    def index(self, token: str) -> int:
        return self._index[token]

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def edge(self, u: str, v: str) -> Optional[Edge]:
        return self.edges.get(_key(u, v))

    def has_edge(self, u: str, v: str) -> bool:
        return _key(u, v) in self.edges

    def add_link(self, u: str, v: str, count: int = 1) -> Edge:
        if u == v:
            raise ValueError(f"self-loop on {u!r}")
        e = self.edges.setdefault(_key(u, v), Edge())
        e.multiplicity += count
        e.weight += count
        return e

    def neighbors(self, u: str) -> dict[str, float]:
        out = {}
        for (a, b), e in self.edges.items():
            if a == u:
                out[b] = e.weight
            elif b == u:
                out[a] = e.weight
        return out

    def transition_weight(self, u: str, v: str) -> float:
        """Weight of (u, v) over the total weight incident on u."""
        nb = self.neighbors(u)
        return nb.get(v, 0.0) / sum(nb.values())

    def total_multiplicity(self) -> int:
        return sum(e.multiplicity for e in self.edges.values())

    def dump(self) -> str:
        """Edge list "u v multiplicity weight origin", sorted."""
        lines = [f"{u} {v} {e.multiplicity} {e.weight:.12g} {e.origin}"
                 for (u, v), e in sorted(self.edges.items())]
        return "\n".join(lines) + ("\n" if lines else "")


def build_word_graph(doc: SentenceList) -> WordGraph:
    g = WordGraph()
    for sent in doc.sentences:
        for tok in sent:
            g.add_node(tok)
    if not g.nodes:
        raise EmptyDocumentError("empty document")
    for sent in doc.sentences:
        for a, b in zip(sent, sent[1:]):
            if a != b:
                g.add_link(a, b)
    return g


def boost_question_bigrams(g: WordGraph, question_tokens: list[str]) -> WordGraph:
    """Add one link per occurrence of a question bigram that is already an edge.

    Bigrams are raw adjacent question tokens, stopwords included. Matching is
    on the unordered pair since the graph is undirected.
    """
    counts = Counter(_key(a, b) for a, b in zip(question_tokens, question_tokens[1:]) if a != b)
    for (a, b), n in counts.items():
        e = g.edges.get((a, b))
        if e is not None and e.multiplicity > 0:
            e.multiplicity += n
            e.boost += n
            e.weight += n
    return g


def apply_semantic_weights(g: WordGraph, stats: PmiStats,
                           epsilon_pmi: float = DEFAULT_EPSILON_PMI) -> WordGraph:
    """weight = links * PMI, with undefined or small PMI floored at ``epsilon_pmi``."""
    if epsilon_pmi <= 0:
        raise ValueError("epsilon_pmi must be positive")
    for (u, v), e in g.edges.items():
        if e.multiplicity == 0:
            continue
        pmi = semantic_pmi(stats, u, v)
        factor = epsilon_pmi if pmi is None else max(pmi, epsilon_pmi)
        e.weight = e.multiplicity * factor + e.topical
    return g


@dataclass(frozen=True)
class BigramInfo:
    frequency: int
    first_position: int


class DocumentBigramTable(dict):
    """bigram -> BigramInfo, iterated in order of first occurrence."""

    @classmethod
    def from_sentences(cls, doc: SentenceList) -> "DocumentBigramTable":
        freq: Counter = Counter()
        first: dict[tuple[str, str], int] = {}
        pos = 0
        for sent in doc.sentences:
            for i, bg in enumerate(zip(sent, sent[1:])):
                freq[bg] += 1
                first.setdefault(bg, pos + i)
            pos += len(sent)
        table = cls()
        for bg in sorted(first, key=first.get):
            table[bg] = BigramInfo(freq[bg], first[bg])
        return table


def topical_candidates(g: WordGraph, table: DocumentBigramTable,
                       stats: PmiStats) -> list[tuple[tuple[str, str], tuple[str, str], float]]:
    """Pairs (earlier, later, pmi) of frequent, unlinked bigrams with defined topical PMI.

    A bigram is frequent when the reference corpus has it in ``stats.big``.
    Two bigrams count as unlinked when they share no token and no edge joins a
    token of one to a token of the other.
    """
    frequent = [b for b in table if b[0] != b[1] and stats.big.get(b, 0) > 0]
    out = []
    for b1, b2 in combinations(frequent, 2):
        if set(b1) & set(b2):
            continue
        if any(g.has_edge(x, y) for x in b1 for y in b2):
            continue
        pmi = topical_pmi(stats, b1, b2)
        if pmi is not None:
            out.append((b1, b2, pmi))
    return out


def add_topical_edges(g: WordGraph, table: DocumentBigramTable, stats: PmiStats) -> WordGraph:
    """Bridge bigram pairs whose topical PMI is strictly above the document average.

    The bridge runs from the second word of the earlier bigram to the first
    word of the later one, weighted ``pmi * min(f(B1), f(B2))``. Pairs are
    chosen against the graph as it was before any bridge was added.
    """
    cands = topical_candidates(g, table, stats)
    if not cands:
        return g
    mean = sum(p for _, _, p in cands) / len(cands)
    for b1, b2, pmi in cands:
        if pmi <= mean or pmi <= 0:
            continue
        u, v = b1[1], b2[0]
        if u == v:
            continue
        w = pmi * min(table[b1].frequency, table[b2].frequency)
        e = g.edges.setdefault(_key(u, v), Edge())
        e.topical += w
        e.weight += w
    return g
