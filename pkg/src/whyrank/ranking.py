"""Ranking with priors (personalized PageRank) over a weighted word graph.

Update rule, applied synchronously::

    r' = (1 - beta) * M^T r + beta * p

where ``M`` is the row-normalized edge-weight matrix and ``p`` puts mass
``1/|R|`` on each root word. Rows of nodes without edges are replaced by
``p`` so mass is never lost.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np
import scipy.sparse as sp

from whyrank.errors import NoRootWordsError
from whyrank.graph import WordGraph

DEFAULT_BETA = 0.70


@dataclass(frozen=True)
class RankingConfig:
    beta: float = DEFAULT_BETA
    tolerance: float = 1e-8
    max_iterations: int = 100

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must be in [0, 1], got {self.beta}")
        if self.tolerance <= 0 or self.max_iterations < 1:
            raise ValueError("tolerance must be > 0 and max_iterations >= 1")


@dataclass
class PriorVector:
    nodes: list[str]
    values: np.ndarray

    def __getitem__(self, token: str) -> float:
        return float(self.values[self.nodes.index(token)])


def compute_priors(roots: Iterable[str], g: WordGraph) -> PriorVector:
    roots = set(roots)
    if not roots:
        raise NoRootWordsError("no root words")
    missing = sorted(r for r in roots if r not in g)
    if missing:
        raise ValueError(f"root words not in graph: {missing}")
    p = np.zeros(len(g.nodes))
    for r in roots:
        p[g.index(r)] = 1.0 / len(roots)
    return PriorVector(list(g.nodes), p)


@dataclass
class Transition:
    """Row-stochastic walk over ``nodes``; dangling rows fall back to the priors."""

    nodes: list[str]
    matrix: sp.csr_matrix
    dangling: np.ndarray
    priors: np.ndarray
    _mt: sp.csr_matrix = field(init=False, repr=False)

    def __post_init__(self):
        self._mt = self.matrix.T.tocsr()

    def dense(self) -> np.ndarray:
        m = self.matrix.toarray()
        m[self.dangling] = self.priors
        return m

    def prob(self, u: str, v: str) -> float:
        i, j = self.nodes.index(u), self.nodes.index(v)
        if self.dangling[i]:
            return float(self.priors[j])
        return float(self.matrix[i, j])

    def step(self, r: np.ndarray) -> np.ndarray:
        """One application of M^T with dangling mass redistributed by the priors."""
        return self._mt @ r + r[self.dangling].sum() * self.priors


def make_transition(g: WordGraph, priors: PriorVector) -> Transition:
    n = len(g.nodes)
    rows, cols, vals = [], [], []
    for (u, v), e in g.edges.items():
        if e.weight <= 0:
            raise ValueError(f"non-positive edge weight on ({u}, {v})")
        i, j = g.index(u), g.index(v)
        rows += [i, j]
        cols += [j, i]
        vals += [e.weight, e.weight]
    w = sp.csr_matrix((vals, (rows, cols)), shape=(n, n), dtype=float)
    out = np.asarray(w.sum(axis=1)).ravel()
    dangling = out == 0
    inv = np.zeros(n)
    inv[~dangling] = 1.0 / out[~dangling]
    m = sp.diags(inv) @ w
    return Transition(list(g.nodes), sp.csr_matrix(m), dangling, priors.values.copy())


@dataclass
class RankVector:
    nodes: list[str]
    scores: np.ndarray
    iterations_used: int
    converged: bool

    def as_dict(self) -> dict[str, float]:
        return {t: float(s) for t, s in zip(self.nodes, self.scores)}

    def __getitem__(self, token: str) -> float:
        return float(self.scores[self.nodes.index(token)])

    def dump(self) -> str:
        """"token score" lines, best first, 12 significant digits."""
        order = sorted(range(len(self.nodes)), key=lambda i: (-self.scores[i], self.nodes[i]))
        return "".join(f"{self.nodes[i]} {self.scores[i]:.12g}\n" for i in order)


def rank_with_prior(transition: Transition, priors: PriorVector,
                    cfg: RankingConfig = RankingConfig(),
                    callback: Optional[Callable[[int, np.ndarray], None]] = None) -> RankVector:
    """Power iteration from ``r = priors`` until the L1 change drops below tolerance.

    ``callback(iteration, r)`` sees every iterate; used by the conservation checks.
    """
    p = priors.values
    beta = cfg.beta
    r = p.copy()
    converged = False
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        r_new = (1.0 - beta) * transition.step(r) + beta * p
        delta = np.abs(r_new - r).sum()
        r = r_new
        if callback is not None:
            callback(it, r)
        if delta < cfg.tolerance:
            converged = True
            break
    return RankVector(list(transition.nodes), r, it, converged)


def rank_graph(g: WordGraph, roots: Iterable[str], cfg: RankingConfig = RankingConfig()) -> RankVector:
    priors = compute_priors(roots, g)
    return rank_with_prior(make_transition(g, priors), priors, cfg)
