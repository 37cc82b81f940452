import numpy as np
import pytest

from hcstylo import (
    Corpus,
    SyntheticAuthorSpec,
    attribute,
    attribution_accuracy,
    bootstrap_accuracy,
    gamma_sweep,
    generate_author,
    kfold_accuracy,
    length_sweep,
    synthetic_suite,
)
from hcstylo.robustness import _loo_decisions


def uniform_spec(seed=0, vocab=50, perturbed=(), intensity=1.0):
    return SyntheticAuthorSpec(vocab, tuple([1.0 / vocab] * vocab),
                               tuple(perturbed), intensity, seed)


# --- generator --------------------------------------------------------------------

def test_generate_author_deterministic():
    spec = uniform_spec(seed=9, perturbed=(1, 2), intensity=2.0)
    a = generate_author(spec, 3, 100)
    b = generate_author(spec, 3, 100)
    assert a == b
    assert len(a.documents) == 3
    assert all(len(d.tokens) == 100 for d in a.documents)


def test_generate_author_validation():
    with pytest.raises(ValueError):
        SyntheticAuthorSpec(3, (0.5, 0.5), (), 2.0, 0)  # wrong length
    with pytest.raises(ValueError):
        SyntheticAuthorSpec(2, (-0.5, 1.5), (), 2.0, 0)
    with pytest.raises(ValueError):
        SyntheticAuthorSpec(2, (0.5, 0.5), (7,), 2.0, 0)
    with pytest.raises(ValueError):
        SyntheticAuthorSpec(2, (0.5, 0.5), (), 0.0, 0)
    with pytest.raises(ValueError):
        generate_author(uniform_spec(), 3, 0)


def test_synthetic_suite_deterministic_and_disjoint():
    a = synthetic_suite(n_docs=3, doc_len=100, seed=5)
    b = synthetic_suite(n_docs=3, doc_len=100, seed=5)
    assert a == b
    assert [c.corpus_id for c in a] == ["author0", "author1", "author2"]


def test_unperturbed_authors_are_near_chance():
    # intensity 1 means both "authors" share one distribution
    suite = [generate_author(uniform_spec(seed=s, vocab=300), 5, 250, f"a{s}")
             for s in (1, 2, 3)]
    acc, _ = attribution_accuracy(suite)
    assert acc <= 0.85  # no planted signal to separate them


# --- fast evaluator vs public attribute -----------------------------------------------

def test_loo_decisions_match_attribute(small_suite):
    decisions = _loo_decisions(small_suite, ngram=1, gamma0=0.35, alpha=0.05,
                               hc_plus=False)
    k = 0
    for ci, corpus in enumerate(small_suite):
        for di, doc in enumerate(corpus.documents):
            candidates = [c if cj != ci else c.without_index(di)
                          for cj, c in enumerate(small_suite)]
            want = attribute(doc, candidates).attributed_to
            assert decisions[k] == (corpus.corpus_id, want)
            k += 1


# --- bootstrap -------------------------------------------------------------------------

def test_bootstrap_identity_reproduces_vanilla(small_suite):
    acc, _ = attribution_accuracy(small_suite)
    rep = bootstrap_accuracy(small_suite, iterations=1, seed=0, resample=False)
    assert rep.per_trial == (acc,)
    assert rep.accuracy_mean == acc


def test_bootstrap_reproducible_and_sane(small_suite):
    a = bootstrap_accuracy(small_suite, iterations=4, seed=3)
    b = bootstrap_accuracy(small_suite, iterations=4, seed=3)
    assert a.to_dict() == b.to_dict()
    assert a.trials == 4 and len(a.per_trial) == 4
    assert a.accuracy_mean == pytest.approx(np.mean(a.per_trial))
    assert a.accuracy_sd == pytest.approx(np.std(a.per_trial, ddof=1))
    assert all(0.0 <= x <= 1.0 for x in a.per_trial)


def test_bootstrap_preserves_total_token_count(small_suite):
    from hcstylo.robustness import _resample_corpora
    rng = np.random.default_rng(0)
    for per_document in (False, True):
        resampled = _resample_corpora(small_suite, rng, per_document)
        before = sum(len(d.tokens) for c in small_suite for d in c.documents)
        after = sum(len(d.tokens) for c in resampled for d in c.documents)
        assert after == before
        if per_document:
            for c0, c1 in zip(small_suite, resampled):
                assert [len(d.tokens) for d in c0.documents] == \
                       [len(d.tokens) for d in c1.documents]


def test_bootstrap_spread_is_bounded_on_synthetic_suite():
    # accuracy spread under resampling stays moderate on a 3-author dataset
    suite = synthetic_suite(n_authors=3, vocab_size=600, n_perturbed=15,
                            intensity=3.0, n_docs=7, doc_len=400, seed=1)
    rep = bootstrap_accuracy(suite, iterations=100, seed=2)
    assert rep.accuracy_sd <= 0.10
    assert rep.trials == 100


# --- k-fold ------------------------------------------------------------------------------

def test_kfold_equals_loo_when_k_is_document_count(small_suite):
    acc, _ = attribution_accuracy(small_suite)
    n_docs = sum(len(c.documents) for c in small_suite)
    rep = kfold_accuracy(small_suite, k=n_docs, splits=2, seed=1)
    assert rep.per_trial == (acc, acc)


def test_kfold_reproducible(small_suite):
    a = kfold_accuracy(small_suite, k=4, splits=3, seed=7)
    b = kfold_accuracy(small_suite, k=4, splits=3, seed=7)
    assert a.to_dict() == b.to_dict()
    assert a.trials + a.params["invalid_splits"] == 3


def test_kfold_counts_invalid_splits():
    # one author with only 2 documents: k = 2 folds of ~5 docs will often
    # strand it below the 2-document floor
    suite = synthetic_suite(n_authors=2, vocab_size=100, n_perturbed=5,
                            intensity=2.0, n_docs=5, doc_len=80, seed=0)
    tiny = Corpus("tiny", suite[0].documents[:2])
    rep = kfold_accuracy([tiny, suite[1]], k=2, splits=8, seed=0)
    assert rep.params["invalid_splits"] > 0
    assert rep.trials == len(rep.per_trial)
    assert rep.trials + rep.params["invalid_splits"] == 8


def test_kfold_validates_arguments(small_suite):
    with pytest.raises(ValueError):
        kfold_accuracy(small_suite, k=1, splits=2)


# --- length sweep ------------------------------------------------------------------------

def test_length_sweep_full_budget_equals_vanilla(small_suite):
    acc, _ = attribution_accuracy(small_suite)
    rep = length_sweep(small_suite, [10_000], trials=2, seed=0)
    assert rep.per_trial == (acc, acc)
    assert rep.params["queries_used_whole"] == 2 * sum(len(c) for c in small_suite)


def test_length_sweep_structure_and_reproducibility(small_suite):
    a = length_sweep(small_suite, [60, 150], trials=2, seed=4)
    b = length_sweep(small_suite, [60, 150], trials=2, seed=4)
    assert a.to_dict() == b.to_dict()
    assert [x for x, _ in a.params["curve"]] == [60, 150]
    assert a.trials == 4


def test_truncate_verses_takes_whole_verses():
    from hcstylo import Document, FeatureToken
    from hcstylo.robustness import _truncate_verses
    tokens = tuple(FeatureToken.lemma(str(i)) for i in range(9))
    doc = Document("d", tokens, verse_count=3, verse_ids=(1, 1, 1, 2, 2, 3, 3, 3, 3))
    rng = np.random.default_rng(0)
    for _ in range(10):
        cut, whole = _truncate_verses(doc, 2, rng)
        assert not whole
        assert set(cut.verse_ids) in ({1, 2}, {2, 3})
        assert len(cut.tokens) in (5, 6)  # two consecutive whole verses
    full, whole = _truncate_verses(doc, 3, rng)
    assert whole and full is doc


def test_length_sweep_verse_unit():
    suite = synthetic_suite(n_authors=2, vocab_size=100, n_perturbed=6,
                            intensity=2.5, n_docs=3, doc_len=120, seed=1)
    with_verses = []
    for c in suite:
        docs = tuple(
            type(d)(d.doc_id, d.tokens, 12, d.source_ref, (),
                    tuple(1 + i // 10 for i in range(len(d.tokens))))
            for d in c.documents)
        with_verses.append(Corpus(c.corpus_id, docs))
    rep = length_sweep(with_verses, [4], trials=1, seed=0, unit="verses")
    assert rep.trials == 1
    with pytest.raises(ValueError):
        length_sweep(suite, [4], trials=1, seed=0, unit="verses")  # no verse metadata
    with pytest.raises(ValueError):
        length_sweep(suite, [0], trials=1, seed=0)


# --- n-gram order consistency -------------------------------------------------------------

def test_ngram_orders_agree_on_strong_suite():
    # with a clearly planted signal, unigram/bigram/trigram features land
    # within 10 accuracy points of each other
    suite = synthetic_suite(n_authors=3, vocab_size=400, n_perturbed=20,
                            intensity=5.0, n_docs=8, doc_len=600, seed=21)
    accs = [attribution_accuracy(suite, ngram=n)[0] for n in (1, 2, 3)]
    assert max(accs) - min(accs) <= 0.10, accs
    assert min(accs) >= 0.8, accs


# --- gamma sweep -------------------------------------------------------------------------

def test_gamma_sweep_structure(small_suite):
    rep = gamma_sweep(small_suite, (0.2, 0.35, 0.5))
    assert rep.trials == 3
    assert [g for g, _ in rep.params["curve"]] == [0.2, 0.35, 0.5]
    vanilla, _ = attribution_accuracy(small_suite, gamma0=0.35)
    assert rep.params["curve"][1][1] == vanilla
