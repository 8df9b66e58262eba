import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_counts, brute_semantic_pmi, brute_topical_pmi
from whyrank.errors import CorpusError, FormatError
from whyrank.relatedness import (
    PmiStats,
    build_stats,
    semantic_pmi,
    stats_from_texts,
    topical_pmi,
)

# N=4, CW(a)=CW(b)=CW(a,b)=2
SEMANTIC_FIXTURE = ["a b a b", "a b a b", "c d", "e f"]
# N=4, CW(x y)=2, CW(p q)=1, CW(x y, p q)=1
TOPICAL_FIXTURE = ["x y x y p q p q", "x y x y", "m n", "o r"]
MIXED_FIXTURE = [
    "white flag white flag. geneva convention geneva convention.",
    "white flag means truce. white flag is waved.",
    "tent poles tent poles. white flag white flag.",
    "a b a. b a b c c.",
    "geneva convention rules. geneva convention treaty. white flag white flag.",
    "no repeats in this one",
    "tent poles tent poles tent",
]


def test_single_document_counts():
    s = stats_from_texts(["a b a b c"])
    assert s.n_docs == 1
    assert dict(s.uni) == {"a": 1, "b": 1}
    assert dict(s.adj) == {("a", "b"): 1}
    assert dict(s.big) == {("a", "b"): 1}
    assert dict(s.bigpair) == {}


def test_identical_documents_double():
    one = stats_from_texts(["a b a b c d c d"])
    two = stats_from_texts(["a b a b c d c d"] * 2)
    assert two.n_docs == 2
    for name in ("uni", "adj", "big", "bigpair"):
        assert dict(getattr(two, name)) == {k: 2 * v for k, v in getattr(one, name).items()}


def test_no_repeats_empty_tables():
    s = stats_from_texts(["a b c", "d e f g", "h"])
    assert s.n_docs == 3
    assert not s.uni and not s.adj and not s.big and not s.bigpair


def test_empty_reference_corpus(tmp_path):
    with pytest.raises(CorpusError):
        stats_from_texts([])
    (tmp_path / "ref").mkdir()
    with pytest.raises(CorpusError):
        build_stats(tmp_path / "ref")


def test_adjacency_counted_without_both_tokens_repeating():
    # "a b a" has {a,b} adjacent twice but b only once
    s = stats_from_texts(["a b a"])
    assert s.adj[("a", "b")] == 1
    assert s.uni == {"a": 1}
    assert semantic_pmi(s, "a", "b") is None


def test_bigrams_do_not_cross_sentences():
    s = stats_from_texts(["a b. a b."])
    assert s.big[("a", "b")] == 1
    s = stats_from_texts(["x a. b y. x a. b y."])
    assert ("a", "b") not in s.big


def test_semantic_pmi_example():
    s = stats_from_texts(SEMANTIC_FIXTURE)
    assert (s.n_docs, s.uni["a"], s.uni["b"], s.adj[("a", "b")]) == (4, 2, 2, 2)
    assert semantic_pmi(s, "a", "b") == 1.0
    assert semantic_pmi(s, "b", "a") == 1.0
    assert s.semantic_pmi("a", "b") == 1.0


def test_semantic_pmi_undefined():
    s = stats_from_texts(SEMANTIC_FIXTURE)
    assert semantic_pmi(s, "a", "c") is None
    assert semantic_pmi(s, "a", "zzz") is None
    assert semantic_pmi(s, "a", "a") is None


def test_topical_pmi_example():
    s = stats_from_texts(TOPICAL_FIXTURE)
    xy, pq = ("x", "y"), ("p", "q")
    assert (s.big[xy], s.big[pq], s.bigpair[(pq, xy)]) == (2, 1, 1)
    assert topical_pmi(s, xy, pq) == 1.0
    assert topical_pmi(s, pq, xy) == 1.0


def test_topical_pmi_same_bigram():
    s = stats_from_texts(TOPICAL_FIXTURE)
    assert topical_pmi(s, ("x", "y"), ("x", "y")) == 1.0  # log2(4 / 2)
    assert topical_pmi(s, ("p", "q"), ("p", "q")) == 2.0  # log2(4 / 1)


def test_topical_pmi_undefined():
    s = stats_from_texts(TOPICAL_FIXTURE)
    assert topical_pmi(s, ("x", "y"), ("m", "n")) is None
    assert topical_pmi(s, ("x", "y"), ("zz", "zz")) is None


@pytest.mark.parametrize("texts", [SEMANTIC_FIXTURE, TOPICAL_FIXTURE, MIXED_FIXTURE])
def test_pmi_matches_brute_force(texts):
    s = stats_from_texts(texts)
    _, vocab, *_ = brute_counts(texts)
    for x, y in itertools.product(vocab, repeat=2):
        assert semantic_pmi(s, x, y) == brute_semantic_pmi(texts, x, y)
    bigrams = sorted({b for b in s.big} | {("a", "b"), ("b", "a"), ("no", "repeats")})
    for b1, b2 in itertools.product(bigrams, repeat=2):
        assert topical_pmi(s, b1, b2) == brute_topical_pmi(texts, b1, b2)


def _check_invariants(s: PmiStats):
    for (x, y), c in s.adj.items():
        assert x < y
        assert 0 < c <= s.n_docs
    for (b1, b2), c in s.bigpair.items():
        assert b1 < b2
        assert 0 < c <= min(s.big[b1], s.big[b2])
    for table in (s.uni, s.big):
        assert all(0 < c <= s.n_docs for c in table.values())


@pytest.mark.parametrize("texts", [SEMANTIC_FIXTURE, TOPICAL_FIXTURE, MIXED_FIXTURE])
def test_count_invariants(texts):
    _check_invariants(stats_from_texts(texts))


docs_strategy = st.lists(
    st.lists(st.sampled_from("abcd."), min_size=1, max_size=14).map(" ".join),
    min_size=1, max_size=6,
)


@settings(max_examples=60, deadline=None)
@given(docs_strategy)
def test_doubling_corpus_keeps_pmi(texts):
    s1 = stats_from_texts(texts)
    s2 = stats_from_texts(texts + texts)
    _check_invariants(s1)
    words = "abcd"
    for x, y in itertools.product(words, repeat=2):
        assert semantic_pmi(s1, x, y) == semantic_pmi(s2, x, y)
        assert semantic_pmi(s1, x, y) == semantic_pmi(s1, y, x)
    bigrams = list(itertools.product(words, repeat=2))
    for b1, b2 in itertools.product(bigrams, repeat=2):
        assert topical_pmi(s1, b1, b2) == topical_pmi(s2, b1, b2)
        assert topical_pmi(s1, b1, b2) == topical_pmi(s1, b2, b1)


def test_roundtrip_bit_exact(tmp_path):
    ref = tmp_path / "ref.jsonl"
    ref.write_text("".join(f'{{"id": "r{i}", "text": "{t}"}}\n' for i, t in enumerate(MIXED_FIXTURE)))
    s = build_stats(ref)
    path = tmp_path / "s.stats"
    s.save(path)
    raw = path.read_bytes()
    assert raw[:4] == b"WRPS"
    loaded = PmiStats.load(path)
    assert loaded == s
    assert loaded.to_bytes() == raw
    assert build_stats(ref).to_bytes() == raw


def test_parallel_build_matches_serial(tmp_path):
    ref = tmp_path / "ref.jsonl"
    texts = MIXED_FIXTURE * 3
    ref.write_text("".join(f'{{"id": "r{i}", "text": "{t}"}}\n' for i, t in enumerate(texts)))
    assert build_stats(ref, workers=2).to_bytes() == build_stats(ref).to_bytes()


def test_load_rejects_garbage(tmp_path):
    p = tmp_path / "x"
    p.write_bytes(b"WRIX" + bytes(16))
    with pytest.raises(FormatError):
        PmiStats.load(p)
    with pytest.raises(FormatError):
        PmiStats.load(tmp_path / "missing")
