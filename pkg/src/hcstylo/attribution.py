"""Same-author verification and attribution over leave-one-out HC scores.

The null model: intra-corpus leave-one-out discrepancies of a homogeneous
corpus are i.i.d. normal.  For a query document the corpus is extended
with the query, the leave-one-out scores of the original members are
recomputed against that extended corpus, and the query's own discrepancy
against the (un-extended) corpus is compared to them with a one-sided
t-test; only unusually large discrepancies reject.  Attribution picks the
candidate corpus with the largest p-value, unless every candidate rejects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from .binom import BinomialTestRecord
from .discrepancy import FeatureSpace, doc_corpus
from .hc import DEFAULT_GAMMA0
from .ingest import Corpus, Document

DEFAULT_ALPHA = 0.05


class DegenerateSpreadError(ValueError):
    """All leave-one-out scores are identical; the t-statistic is undefined."""


@dataclass(frozen=True)
class LooModel:
    """Gaussian null model fitted to extended-corpus leave-one-out scores."""

    corpus_id: str
    scores: tuple[float, ...]
    mean: float
    sd: float
    n_docs: int


@dataclass(frozen=True)
class VerificationResult:
    """Outcome of one same-author test of a query against one corpus."""

    corpus_id: str
    x_prime: float
    t_stat: float
    p_value: float
    df: int
    rejected: bool
    alpha: float = DEFAULT_ALPHA
    degenerate_spread: bool = False


@dataclass(frozen=True)
class AttributionReport:
    """Per-candidate verification plus the final attribution decision.

    ``attributed_to`` is None when every candidate rejects the same-author
    null (the document cannot be associated with any of them).
    ``discriminating`` maps each candidate corpus to its selected feature
    records for the query-vs-corpus comparison, strongest first; empty when
    the comparison carries no signal (non-positive HC).
    """

    doc_id: str
    verifications: tuple[VerificationResult, ...]
    attributed_to: str | None
    tie: bool
    discriminating: Mapping[str, tuple[BinomialTestRecord, ...]] = field(default_factory=dict)


def fit_loo_model(c: Corpus, query: Document, ngram: int = 1,
                  gamma0: float = DEFAULT_GAMMA0, *, hc_plus: bool = False) -> LooModel:
    """Leave-one-out scores of the corpus members against the corpus extended
    with the query, plus their mean and sample standard deviation."""
    if len(c.documents) < 2:
        raise ValueError(f"corpus {c.corpus_id!r} needs at least 2 documents")
    if not query.tokens:
        raise ValueError("query document is empty")
    space = FeatureSpace(list(c.documents) + [query], ngram=ngram)
    vecs = [space.vector(d) for d in c.documents]
    extended = np.sum(vecs, axis=0) + space.vector(query)
    scores = tuple(space.hc_discrepancy(v, extended - v, gamma0, hc_plus=hc_plus)
                   for v in vecs)
    return LooModel(
        corpus_id=c.corpus_id,
        scores=scores,
        mean=float(np.mean(scores)),
        sd=float(np.std(scores, ddof=1)),
        n_docs=len(scores),
    )


def t_test(x_prime: float, model: LooModel, alpha: float = DEFAULT_ALPHA) -> VerificationResult:
    """One-sided upper-tail t-test of a query score against a fitted model."""
    if model.sd <= 0.0:
        raise DegenerateSpreadError(
            f"corpus {model.corpus_id!r}: all leave-one-out scores are identical")
    t, df, p = _upper_tail_p(x_prime, model.mean, model.sd, model.n_docs)
    return VerificationResult(model.corpus_id, x_prime, t, p, df, p <= alpha, alpha)


def _upper_tail_p(x_prime: float, mean: float, sd: float, n: int) -> tuple[float, int, float]:
    t = (x_prime - mean) / (sd * math.sqrt(1.0 + 1.0 / n))
    df = n - 1
    return t, df, float(stats.t.sf(t, df))


def _limit_result(x_prime: float, model: LooModel, alpha: float) -> VerificationResult:
    # sd = 0 limit: any score above the common value rejects outright,
    # anything at or below it cannot; flagged so callers can surface it
    above = x_prime > model.mean
    return VerificationResult(model.corpus_id, x_prime,
                              t_stat=math.inf if above else 0.0,
                              p_value=0.0 if above else 1.0,
                              df=model.n_docs - 1,
                              rejected=above, alpha=alpha, degenerate_spread=True)


def verify(query: Document, c: Corpus, ngram: int = 1, gamma0: float = DEFAULT_GAMMA0,
           alpha: float = DEFAULT_ALPHA, *, hc_plus: bool = False) -> VerificationResult:
    """Test the null that the query and the corpus share an author."""
    model = fit_loo_model(c, query, ngram, gamma0, hc_plus=hc_plus)
    x_prime = doc_corpus(query, c, ngram, gamma0, hc_plus=hc_plus).d_hc
    try:
        return t_test(x_prime, model, alpha)
    except DegenerateSpreadError:
        return _limit_result(x_prime, model, alpha)


def decide(pairs: Sequence[tuple[str, float]], alpha: float = DEFAULT_ALPHA) -> tuple[str | None, bool]:
    """Attribution decision from (corpus_id, p_value) pairs.

    The largest p-value wins when it clears ``alpha``; otherwise the
    document is unattributable.  Exact ties go to the earliest candidate
    and are flagged.
    """
    if not pairs:
        raise ValueError("no candidates")
    best = max(p for _, p in pairs)
    if best <= alpha:
        return None, False
    winners = [cid for cid, p in pairs if p == best]
    return winners[0], len(winners) > 1


def attribute(query: Document, candidates: Sequence[Corpus], ngram: int = 1,
              gamma0: float = DEFAULT_GAMMA0, alpha: float = DEFAULT_ALPHA,
              *, hc_plus: bool = False) -> AttributionReport:
    """Verify the query against every candidate corpus and pick an author."""
    if len(candidates) < 2:
        raise ValueError("attribution needs at least 2 candidate corpora")
    ids = [c.corpus_id for c in candidates]
    if len(set(ids)) != len(ids):
        raise ValueError("candidate corpora must have distinct ids")
    verifications = []
    discriminating: dict[str, tuple[BinomialTestRecord, ...]] = {}
    for c in candidates:
        detail = doc_corpus(query, c, ngram, gamma0, hc_plus=hc_plus)
        model = fit_loo_model(c, query, ngram, gamma0, hc_plus=hc_plus)
        try:
            vr = t_test(detail.d_hc, model, alpha)
        except DegenerateSpreadError:
            vr = _limit_result(detail.d_hc, model, alpha)
        verifications.append(vr)
        hct = detail.hc_detail
        discriminating[c.corpus_id] = hct.selected if hct.hc > 0 else ()
    winner, tie = decide([(vr.corpus_id, vr.p_value) for vr in verifications], alpha)
    return AttributionReport(query.doc_id, tuple(verifications), winner, tie, discriminating)


def jarque_bera(scores: Sequence[float]) -> tuple[float, float]:
    """Skewness/kurtosis normality diagnostic; chi-square(2) upper-tail p.

    Diagnostic only: it never gates verification or attribution.
    """
    x = np.asarray(scores, dtype=float)
    if x.size < 4:
        raise ValueError("Jarque-Bera needs at least 4 scores")
    centered = x - x.mean()
    m2 = float(np.mean(centered ** 2))
    if m2 == 0.0:
        raise ValueError("skewness and kurtosis are undefined for constant scores")
    skew = float(np.mean(centered ** 3)) / m2 ** 1.5
    excess_kurt = float(np.mean(centered ** 4)) / m2 ** 2 - 3.0
    jb = x.size / 6.0 * (skew ** 2 + excess_kurt ** 2 / 4.0)
    return jb, float(stats.chi2.sf(jb, 2))
