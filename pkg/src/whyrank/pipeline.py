"""End-to-end answer ranking for one question or a question set.

Per question: retrieve the top documents, then for each document build the
word graph, boost question bigrams, optionally weight edges by semantic PMI
and add topical bridges, rank words from the question's root words, score the
candidate spans and finally merge every document's candidates into one list.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Optional

from whyrank import answers as ans
from whyrank.errors import EmptyDocumentError
from whyrank.graph import (
    DEFAULT_EPSILON_PMI,
    DocumentBigramTable,
    add_topical_edges,
    apply_semantic_weights,
    boost_question_bigrams,
    build_word_graph,
)
from whyrank.metrics import EvalReport, GoldEntry, evaluate, judge
from whyrank.ranking import DEFAULT_BETA, RankingConfig, compute_priors, make_transition, rank_with_prior
from whyrank.relatedness import PmiStats
from whyrank.retrieval import (
    DEFAULT_GROUP_BOOST,
    DEFAULT_TOP_K,
    CorpusIndex,
    build_query,
    retrieve,
)
from whyrank.textprep import Lexicons, SentenceList, root_words, segment, tokenize

log = logging.getLogger(__name__)

# candidate mode, semantic weights, topical edges
SETUPS = {
    1: ("paragraph", True, True),
    2: ("window5", True, True),
    3: ("paragraph", False, False),
    4: ("paragraph", True, False),
}


@dataclass(frozen=True)
class PipelineConfig:
    beta: float = DEFAULT_BETA
    top_k_docs: int = DEFAULT_TOP_K
    candidate_mode: str = "paragraph"
    enable_semantic: bool = True
    enable_topical: bool = True
    epsilon_pmi: float = DEFAULT_EPSILON_PMI
    tolerance: float = 1e-8
    max_iterations: int = 100
    occurrence_counting: str = "occurrences"
    group_boost: float = DEFAULT_GROUP_BOOST
    setup: Optional[int] = None
    index_path: Optional[str] = None
    stats_path: Optional[str] = None
    stopwords_path: Optional[str] = None
    verbs_path: Optional[str] = None
    workers: int = 1

    @classmethod
    def for_setup(cls, setup: int, **overrides) -> "PipelineConfig":
        if setup not in SETUPS:
            raise ValueError(f"setup must be one of {sorted(SETUPS)}")
        mode, semantic, topical = SETUPS[setup]
        return cls(candidate_mode=mode, enable_semantic=semantic, enable_topical=topical,
                   setup=setup, **overrides)

    @property
    def needs_stats(self) -> bool:
        return self.enable_semantic or self.enable_topical

    def ranking(self) -> RankingConfig:
        return RankingConfig(self.beta, self.tolerance, self.max_iterations)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("workers")
        return d


class Pipeline:
    def __init__(self, index: CorpusIndex, lexicons: Lexicons, cfg: PipelineConfig,
                 stats: Optional[PmiStats] = None):
        self.index = index
        self.lex = lexicons
        self.cfg = cfg
        self._stats = stats
        self._docs: dict[str, SentenceList] = {}

    @classmethod
    def from_config(cls, cfg: PipelineConfig) -> "Pipeline":
        if not cfg.index_path:
            raise ValueError("index_path is required")
        lex = Lexicons.load(cfg.stopwords_path, cfg.verbs_path)
        return cls(CorpusIndex.load(cfg.index_path), lex, cfg)

    @property
    def stats(self) -> PmiStats:
        # loaded on first use so runs without semantic/topical weights never touch the file
        if self._stats is None:
            if not self.cfg.stats_path:
                raise ValueError("this configuration needs a stats file")
            self._stats = PmiStats.load(self.cfg.stats_path)
        return self._stats

    def document(self, doc_id: str) -> SentenceList:
        if doc_id not in self._docs:
            self._docs[doc_id] = segment(self.index.texts[doc_id])
        return self._docs[doc_id]

    def rank_document(self, doc_id: str, relevance: float, question: str) -> list[ans.CandidateAnswer]:
        """Scored candidates of one document; empty when the document has no root words."""
        cfg = self.cfg
        doc = self.document(doc_id)
        try:
            g = build_word_graph(doc)
        except EmptyDocumentError:
            log.warning("skipping %s: no tokens", doc_id)
            return []
        roots = root_words(question, doc.vocab(), self.lex)
        if not roots:
            log.warning("skipping %s: no root words", doc_id)
            return []
        boost_question_bigrams(g, tokenize(question))
        if cfg.enable_semantic:
            apply_semantic_weights(g, self.stats, cfg.epsilon_pmi)
        if cfg.enable_topical:
            add_topical_edges(g, DocumentBigramTable.from_sentences(doc), self.stats)
        priors = compute_priors(roots, g)
        rr = rank_with_prior(make_transition(g, priors), priors, cfg.ranking())
        if not rr.converged:
            log.warning("%s: ranking stopped after %d iterations without converging",
                        doc_id, rr.iterations_used)
        selected = ans.select_scoring_words(rr)
        return [
            c.with_score(ans.score_candidate(c, selected, rr, relevance, cfg.occurrence_counting))
            for c in ans.segment_candidates(doc, cfg.candidate_mode, doc_id)
        ]

    def run_question(self, question: str) -> list[ans.CandidateAnswer]:
        q = build_query(question, self.lex)
        hits = retrieve(self.index, q, self.cfg.top_k_docs, self.cfg.group_boost)
        if hits and self.cfg.needs_stats:
            self.stats  # load once before any worker threads start
        if self.cfg.workers > 1 and len(hits) > 1:
            with ThreadPoolExecutor(max_workers=self.cfg.workers) as pool:
                per_doc = list(pool.map(lambda h: self.rank_document(h.doc_id, h.relevance, question), hits))
        else:
            per_doc = [self.rank_document(h.doc_id, h.relevance, question) for h in hits]
        return ans.merge_and_rank(per_doc)

    def run_eval(self, questions: Iterable[tuple[str, str]], gold: dict[str, GoldEntry],
                 cutoffs: Iterable[int]) -> EvalReport:
        ranks: dict[str, Optional[int]] = {}
        for qid, question in questions:
            if qid not in gold:
                log.warning("question %s has no gold answers; skipped", qid)
                continue
            ranks[qid] = judge(self.run_question(question), gold[qid])
        return evaluate(ranks, cutoffs)


def run_question(question: str, cfg: PipelineConfig) -> list[ans.CandidateAnswer]:
    return Pipeline.from_config(cfg).run_question(question)


def run_eval(questions: Iterable[tuple[str, str]], gold: dict[str, GoldEntry],
             cfg: PipelineConfig, cutoffs: Iterable[int] = (10, 150)) -> EvalReport:
    return Pipeline.from_config(cfg).run_eval(questions, gold, cutoffs)


def config_header(cfg: PipelineConfig, lex: Lexicons) -> dict:
    return {**cfg.to_dict(), "lexicons": dict(lex.source)}


__all__ = ["Pipeline", "PipelineConfig", "SETUPS", "config_header", "run_eval", "run_question"]
