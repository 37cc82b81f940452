import pytest

from hcstylo import Corpus, Document, FeatureToken


def lemma_doc(doc_id: str, lemmas, **kw) -> Document:
    return Document(doc_id, tuple(FeatureToken.lemma(x) for x in lemmas), **kw)


def lemma_corpus(corpus_id: str, docs: dict) -> Corpus:
    return Corpus(corpus_id, tuple(lemma_doc(i, ls) for i, ls in docs.items()))


@pytest.fixture
def small_suite():
    """Three tiny synthetic authors, enough for structural tests."""
    from hcstylo import synthetic_suite
    return synthetic_suite(n_authors=3, vocab_size=300, n_perturbed=10,
                           intensity=2.5, n_docs=4, doc_len=250, seed=11)
