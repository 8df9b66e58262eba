"""Candidate answer spans, their scores, and the global answer ranking."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Iterable, Literal

from whyrank.ranking import RankVector
from whyrank.textprep import SentenceList

Mode = Literal["paragraph", "window5"]
WINDOW = 5
SELECT_FRACTION = 0.25


@dataclass(frozen=True)
class CandidateAnswer:
    doc_id: str
    span: tuple[int, int]
    mode: str
    text: str
    tokens: tuple[str, ...]
    paragraphs: tuple[int, ...]
    score: float = 0.0

    def with_score(self, score: float) -> "CandidateAnswer":
        return replace(self, score=score)


def segment_candidates(doc: SentenceList, mode: Mode, doc_id: str = "") -> list[CandidateAnswer]:
    """Paragraphs, or stride-1 windows of five sentences (whole document if shorter)."""
    n = len(doc.sentences)
    if mode == "paragraph":
        spans = list(doc.paragraph_bounds)
    elif mode == "window5":
        spans = [(i, i + WINDOW) for i in range(n - WINDOW + 1)] if n >= WINDOW else [(0, n)]
    else:
        raise ValueError(f"unknown candidate mode {mode!r}")
    out = []
    for start, end in spans:
        if end <= start:
            continue
        paras = tuple(i for i, (a, b) in enumerate(doc.paragraph_bounds) if a < end and start < b)
        tokens = tuple(t for s in doc.sentences[start:end] for t in s)
        out.append(CandidateAnswer(doc_id, (start, end), mode, doc.text(start, end), tokens, paras))
    return out


def select_scoring_words(rr: RankVector, fraction: float = SELECT_FRACTION) -> set[str]:
    """Words scoring strictly above the mean, capped at the top ``ceil(fraction * |V|)``.

    A document whose scores are all equal still yields one word: the
    lexicographically first of the maxima.
    """
    scores = rr.as_dict()
    if not scores:
        return set()
    mean = math.fsum(scores.values()) / len(scores)
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    above = [t for t, s in ranked if s > mean]
    cap = max(1, math.ceil(fraction * len(scores)))
    if not above:
        return {ranked[0][0]}
    return set(above[:cap])


def score_candidate(c: CandidateAnswer, selected: set[str], rr: RankVector, relevance: float,
                    counting: str = "occurrences") -> float:
    """Sum of selected word scores in the candidate, times the document relevance."""
    scores = rr.as_dict()
    if counting == "occurrences":
        words: Iterable[str] = c.tokens
    elif counting == "distinct":
        words = sorted(set(c.tokens))
    else:
        raise ValueError(f"unknown counting mode {counting!r}")
    return math.fsum(scores[w] for w in words if w in selected) * relevance


def merge_and_rank(per_doc: Iterable[Iterable[CandidateAnswer]]) -> list[CandidateAnswer]:
    flat = [c for cands in per_doc for c in cands]
    return sorted(flat, key=lambda c: (-c.score, c.doc_id, c.span[0], c.span[1]))


def answers_to_jsonl(answers: list[CandidateAnswer], header: dict | None = None) -> str:
    """One JSON object per line; an optional first line carries the run config."""
    lines = []
    if header is not None:
        lines.append(json.dumps({"config": header}, sort_keys=True, ensure_ascii=False))
    for rank, c in enumerate(answers, 1):
        lines.append(json.dumps({
            "rank": rank,
            "doc_id": c.doc_id,
            "span_start": c.span[0],
            "span_end": c.span[1],
            "mode": c.mode,
            "score": float(f"{c.score:.12g}"),
            "text": c.text,
        }, ensure_ascii=False))
    return "".join(line + "\n" for line in lines)
