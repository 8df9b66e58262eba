"""Success@n and MRR@n against a gold standard.

A question whose first correct answer is missing, or sits below the cutoff,
contributes a reciprocal rank of 0.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from whyrank.answers import CandidateAnswer
from whyrank.errors import CorpusError


@dataclass(frozen=True)
class AcceptableAnswer:
    doc_id: str
    match_type: str  # "para" or "regex"
    match_value: str

    def matches(self, c: CandidateAnswer) -> bool:
        if c.doc_id != self.doc_id:
            return False
        if self.match_type == "para":
            return int(self.match_value) in c.paragraphs
        if self.match_type == "regex":
            return re.search(self.match_value, c.text, re.IGNORECASE) is not None
        raise ValueError(f"unknown match type {self.match_type!r}")


@dataclass
class GoldEntry:
    question_id: str
    question: str
    answers: list[AcceptableAnswer] = field(default_factory=list)


def read_gold(path: str | Path) -> dict[str, GoldEntry]:
    """Gold TSV: question_id, question, doc_id, match_type, match_value."""
    gold: dict[str, GoldEntry] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t"), 1):
            if not row or row[0].startswith("#") or (lineno == 1 and row[0] == "question_id"):
                continue
            if len(row) != 5:
                raise CorpusError(f"{path}:{lineno}: expected 5 columns, got {len(row)}")
            qid, question, doc_id, mtype, value = row
            if mtype not in ("para", "regex"):
                raise CorpusError(f"{path}:{lineno}: match_type must be para or regex")
            if mtype == "para" and not value.isdigit():
                raise CorpusError(f"{path}:{lineno}: para match needs a paragraph index")
            entry = gold.setdefault(qid, GoldEntry(qid, question))
            entry.answers.append(AcceptableAnswer(doc_id, mtype, value))
    return gold


def read_questions(path: str | Path) -> list[tuple[str, str]]:
    """Question TSV: question_id, question. A header row is optional."""
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t"), 1):
            if not row or row[0].startswith("#") or (lineno == 1 and row[0] == "question_id"):
                continue
            if len(row) < 2:
                raise CorpusError(f"{path}:{lineno}: expected question_id<TAB>question")
            out.append((row[0], row[1]))
    return out


def judge(answers: Sequence[CandidateAnswer], gold: GoldEntry) -> Optional[int]:
    """1-based rank of the first candidate matching any acceptable answer, or None."""
    for rank, c in enumerate(answers, 1):
        if any(a.matches(c) for a in gold.answers):
            return rank
    return None


@dataclass
class EvalReport:
    cutoffs: list[int]
    ranks: dict[str, Optional[int]]
    reciprocal_ranks: dict[str, dict[int, float]]
    success: dict[int, int]
    success_fraction: dict[int, float]
    mrr: dict[int, float]

    @property
    def n_questions(self) -> int:
        return len(self.ranks)

    def percent(self) -> dict[str, float]:
        out = {}
        for n in self.cutoffs:
            out[f"success@{n}"] = round(100.0 * self.success_fraction[n], 3)
        for n in self.cutoffs:
            out[f"mrr@{n}"] = round(100.0 * self.mrr[n], 3)
        return out

    def to_dict(self) -> dict:
        return {
            "questions": [
                {"question_id": q, "rank": self.ranks[q],
                 "reciprocal_rank": {str(n): self.reciprocal_ranks[q][n] for n in self.cutoffs}}
                for q in sorted(self.ranks)
            ],
            "aggregate": {
                "n_questions": self.n_questions,
                "cutoffs": self.cutoffs,
                "success": {str(n): self.success[n] for n in self.cutoffs},
                "success_fraction": {str(n): self.success_fraction[n] for n in self.cutoffs},
                "mrr": {str(n): self.mrr[n] for n in self.cutoffs},
                "percent": self.percent(),
            },
        }

    def table_row(self, name: str) -> str:
        """Tab-separated row laid out like a results table: successes first, then MRRs."""
        pct = self.percent()
        cols = [f"success@{n}" for n in self.cutoffs] + [f"mrr@{n}" for n in self.cutoffs]
        return "\t".join([name] + [f"{pct[c]:.3f}" for c in cols])

    def table_header(self) -> str:
        cols = [f"Success@{n}" for n in self.cutoffs] + [f"MRR@{n}" for n in self.cutoffs]
        return "\t".join(["System"] + cols)


def evaluate(ranks: Mapping[str, Optional[int]], cutoffs: Iterable[int]) -> EvalReport:
    if not ranks:
        raise ValueError("empty question set")
    cutoffs = sorted(set(cutoffs))
    if not cutoffs or cutoffs[0] < 1:
        raise ValueError("cutoffs must be positive integers")
    nq = len(ranks)
    rr = {
        q: {n: (1.0 / r if r is not None and r <= n else 0.0) for n in cutoffs}
        for q, r in ranks.items()
    }
    success = {n: sum(1 for r in ranks.values() if r is not None and r <= n) for n in cutoffs}
    # sum in sorted question order so the result does not depend on input order
    mrr = {n: sum(rr[q][n] for q in sorted(rr)) / nq for n in cutoffs}
    return EvalReport(
        cutoffs=cutoffs,
        ranks=dict(ranks),
        reciprocal_ranks=rr,
        success=success,
        success_fraction={n: success[n] / nq for n in cutoffs},
        mrr=mrr,
    )


def report_json(report: EvalReport, config: dict | None = None) -> str:
    data = report.to_dict()
    if config is not None:
        data = {"config": config, **data}
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
