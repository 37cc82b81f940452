"""HC-discrepancy between two documents, a document and a corpus, or two corpora.

A corpus enters a comparison as the concatenation of its documents: counts
add up, but n-gram windows are taken per document, so no window crosses a
document boundary.  The discrepancy itself is the HC score of the
per-feature binomial allocation p-values over the pair's union vocabulary;
it is symmetric in its two arguments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .binom import BinomialTestRecord, allocation_pvalues, test_all
from .hc import DEFAULT_GAMMA0, HcResult, _hc_core, hct_select
from .ingest import Corpus, Document, FeatureToken, FrequencyTable, expand_ngrams, freq_table


@dataclass(frozen=True)
class DiscrepancyResult:
    """HC-discrepancy plus the per-feature evidence behind it."""

    d_hc: float
    records: tuple[BinomialTestRecord, ...]
    hc_detail: HcResult
    left_total: int
    right_total: int


def _expanded_table(doc: Document, ngram: int, within_verse: bool) -> FrequencyTable:
    return freq_table(expand_ngrams(doc, ngram, within_verse).tokens)


def _corpus_table(corpus: Corpus, ngram: int, within_verse: bool) -> FrequencyTable:
    table = _expanded_table(corpus.documents[0], ngram, within_verse)
    for doc in corpus.documents[1:]:
        table = table + _expanded_table(doc, ngram, within_verse)
    return table


def _from_tables(left: FrequencyTable, right: FrequencyTable, gamma0: float,
                 hc_plus: bool) -> DiscrepancyResult:
    if left.total == 0:
        raise ValueError("left side is empty after n-gram expansion")
    if right.total == 0:
        raise ValueError("right side is empty after n-gram expansion")
    records = test_all(left, right)
    detail = hct_select(records, gamma0, hc_plus=hc_plus)
    return DiscrepancyResult(detail.hc, tuple(records), detail, left.total, right.total)


def doc_doc(t1: Document, t2: Document, ngram: int = 1, gamma0: float = DEFAULT_GAMMA0,
            *, hc_plus: bool = False, within_verse: bool = False) -> DiscrepancyResult:
    """HC-discrepancy between two documents at the given n-gram order."""
    return _from_tables(_expanded_table(t1, ngram, within_verse),
                        _expanded_table(t2, ngram, within_verse), gamma0, hc_plus)


def doc_corpus(t: Document, c: Corpus, ngram: int = 1, gamma0: float = DEFAULT_GAMMA0,
               *, hc_plus: bool = False, within_verse: bool = False) -> DiscrepancyResult:
    """HC-discrepancy between a document and a whole corpus.

    The caller is responsible for ``t`` not being a member of ``c``; see
    :func:`leave_one_out` for the intra-corpus scores.
    """
    return _from_tables(_expanded_table(t, ngram, within_verse),
                        _corpus_table(c, ngram, within_verse), gamma0, hc_plus)


def corpus_corpus(c1: Corpus, c2: Corpus, ngram: int = 1, gamma0: float = DEFAULT_GAMMA0,
                  *, hc_plus: bool = False, within_verse: bool = False) -> DiscrepancyResult:
    """HC-discrepancy between the concatenations of two corpora."""
    return _from_tables(_corpus_table(c1, ngram, within_verse),
                        _corpus_table(c2, ngram, within_verse), gamma0, hc_plus)


def leave_one_out(c: Corpus, i: int, ngram: int = 1, gamma0: float = DEFAULT_GAMMA0,
                  *, hc_plus: bool = False, within_verse: bool = False) -> float:
    """Discrepancy of document ``i`` against the rest of its corpus."""
    if len(c.documents) < 2:
        raise ValueError("leave-one-out needs a corpus of at least 2 documents")
    doc_table = _expanded_table(c.documents[i], ngram, within_verse)
    rest = _corpus_table(c, ngram, within_verse) - doc_table
    return _from_tables(doc_table, rest, gamma0, hc_plus).d_hc


def leave_one_out_scores(c: Corpus, ngram: int = 1, gamma0: float = DEFAULT_GAMMA0,
                         *, hc_plus: bool = False, within_verse: bool = False) -> list[float]:
    """All intra-corpus leave-one-out scores, one per document, in corpus order."""
    if len(c.documents) < 2:
        raise ValueError("leave-one-out needs a corpus of at least 2 documents")
    space = FeatureSpace(c.documents, ngram=ngram, within_verse=within_verse)
    vecs = [space.vector(d) for d in c.documents]
    total = np.sum(vecs, axis=0)
    return [space.hc_discrepancy(v, total - v, gamma0, hc_plus=hc_plus) for v in vecs]


class FeatureSpace:
    """Dense count vectors over the union vocabulary of a fixed document set.

    Comparing many document/corpus pairs through one shared feature index
    keeps leave-one-out loops and evaluation harnesses in numpy; corpus
    tables become vector sums and leave-one-out references become exact
    integer subtractions.  Scores are bit-identical to the table-based
    operations above.
    """

    def __init__(self, documents: Iterable[Document], *, ngram: int = 1,
                 within_verse: bool = False):
        self.ngram = ngram
        self.within_verse = within_verse
        self._cached: dict[int, np.ndarray] = {}
        counters = []
        vocab: set[FeatureToken] = set()
        docs = list(documents)
        for doc in docs:
            table = _expanded_table(doc, ngram, within_verse)
            counters.append((doc, table))
            vocab.update(table.counts)
        self.features: tuple[FeatureToken, ...] = tuple(sorted(vocab))
        self.index = {w: i for i, w in enumerate(self.features)}
        for doc, table in counters:
            self._cached[id(doc)] = self._vector_from_table(table)
        self._build_docs = docs  # keeps id() keys alive

    def _vector_from_table(self, table: FrequencyTable) -> np.ndarray:
        vec = np.zeros(len(self.features), dtype=np.int64)
        for w, count in table.counts.items():
            try:
                vec[self.index[w]] = count
            except KeyError:
                raise ValueError(
                    f"feature {w.render()!r} is outside this feature space") from None
        return vec

    def vector(self, doc: Document) -> np.ndarray:
        """Count vector of a document; every feature must be in the space."""
        cached = self._cached.get(id(doc))
        if cached is not None:
            return cached
        return self._vector_from_table(_expanded_table(doc, self.ngram, self.within_verse))

    def corpus_vector(self, corpus: Corpus) -> np.ndarray:
        return np.sum([self.vector(d) for d in corpus.documents], axis=0)

    def hc_discrepancy(self, left: np.ndarray, right: np.ndarray,
                       gamma0: float = DEFAULT_GAMMA0, *, hc_plus: bool = False) -> float:
        """HC-discrepancy between two count vectors (score only)."""
        if left.sum() == 0:
            raise ValueError("left side is empty")
        if right.sum() == 0:
            raise ValueError("right side is empty")
        present = (left + right) > 0
        p, _, _, _ = allocation_pvalues(left[present], right[present])
        return _hc_core(np.sort(p), gamma0, hc_plus)[0]


def discrepancy_matrix(corpora: Sequence[Corpus], queries: Sequence[Document] = (),
                       ngram: int = 1, gamma0: float = DEFAULT_GAMMA0,
                       *, hc_plus: bool = False, within_verse: bool = False):
    """Every document's discrepancy against every corpus.

    Home-corpus cells are computed leave-one-out (the document is removed
    from its own corpus before comparing).  Returns a list of
    ``(doc_id, home_corpus_id, [d_hc per corpus])`` rows, corpus columns in
    input order; query documents get an empty home id.
    """
    all_docs = [d for c in corpora for d in c.documents] + list(queries)
    space = FeatureSpace(all_docs, ngram=ngram, within_verse=within_verse)
    sums = {c.corpus_id: space.corpus_vector(c) for c in corpora}
    rows = []
    for c in list(corpora):
        for doc in c.documents:
            v = space.vector(doc)
            scores = []
            for other in corpora:
                ref = sums[other.corpus_id]
                if other.corpus_id == c.corpus_id:
                    ref = ref - v
                scores.append(space.hc_discrepancy(v, ref, gamma0, hc_plus=hc_plus))
            rows.append((doc.doc_id, c.corpus_id, scores))
    for doc in queries:
        v = space.vector(doc)
        scores = [space.hc_discrepancy(v, sums[c.corpus_id], gamma0, hc_plus=hc_plus)
                  for c in corpora]
        rows.append((doc.doc_id, "", scores))
    return rows
