"""Sensitivity harnesses: bootstrap, k-fold cross-validation, text-length and
gamma0 sweeps, plus a synthetic-author generator.

The generator plants a weak signal of the kind the pipeline targets: a few
perturbed feature frequencies out of a large vocabulary.  It doubles as the
ground-truth oracle for the test suite, where attribution accuracy against
known synthetic authors stands in for expert labels.

Every randomized procedure derives an independent RNG stream per trial from
(seed, trial index), so reports are bit-identical across runs and
independent of execution order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .attribution import DEFAULT_ALPHA, _upper_tail_p, decide
from .discrepancy import FeatureSpace
from .hc import DEFAULT_GAMMA0
from .ingest import Corpus, Document, FeatureToken

# distinct stream tags so harnesses never share RNG draws
_STREAM_BOOTSTRAP = 202
_STREAM_KFOLD = 303
_STREAM_LENGTH = 404
_STREAM_SUITE = 505


@dataclass(frozen=True)
class SyntheticAuthorSpec:
    """One synthetic author: shared base frequencies with a few features
    multiplied by ``intensity`` and renormalized."""

    vocab_size: int
    base_weights: tuple[float, ...]
    perturbed_features: tuple[int, ...]
    intensity: float
    seed: int

    def __post_init__(self):
        if self.vocab_size < 1:
            raise ValueError("vocab_size must be positive")
        if len(self.base_weights) != self.vocab_size:
            raise ValueError("base_weights length must equal vocab_size")
        if any(w < 0 for w in self.base_weights) or sum(self.base_weights) <= 0:
            raise ValueError("base_weights must be nonnegative with positive mass")
        if any(not 0 <= f < self.vocab_size for f in self.perturbed_features):
            raise ValueError("perturbed_features must index into the vocabulary")
        if self.intensity <= 0:
            raise ValueError("intensity must be positive")


@dataclass(frozen=True)
class RobustnessReport:
    mode: str
    accuracy_mean: float
    accuracy_sd: float
    trials: int
    per_trial: tuple[float, ...]
    params: Mapping

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "accuracy_mean": self.accuracy_mean,
            "accuracy_sd": self.accuracy_sd,
            "trials": self.trials,
            "per_trial": list(self.per_trial),
            "params": dict(self.params),
        }


def _make_report(mode: str, per_trial: Sequence[float], params: dict) -> RobustnessReport:
    arr = np.asarray(per_trial, dtype=float)
    mean = float(arr.mean()) if arr.size else float("nan")
    sd = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return RobustnessReport(mode, mean, sd, int(arr.size),
                            tuple(float(x) for x in arr), params)


# ---------------------------------------------------------------------------
# synthetic authors

def author_weights(spec: SyntheticAuthorSpec) -> np.ndarray:
    """The author's categorical distribution after perturbation."""
    w = np.asarray(spec.base_weights, dtype=float).copy()
    w /= w.sum()
    idx = list(spec.perturbed_features)
    w[idx] *= spec.intensity
    return w / w.sum()


def generate_author(spec: SyntheticAuthorSpec, n_docs: int, doc_len: int,
                    corpus_id: str = "author") -> Corpus:
    """Sample a corpus of i.i.d.-token documents from the author's distribution."""
    if doc_len < 1:
        raise ValueError("doc_len must be >= 1")
    if n_docs < 1:
        raise ValueError("n_docs must be >= 1")
    weights = author_weights(spec)
    rng = np.random.default_rng(spec.seed)
    lemmas = [FeatureToken.lemma(str(i)) for i in range(spec.vocab_size)]
    draws = rng.choice(spec.vocab_size, size=(n_docs, doc_len), p=weights)
    docs = tuple(
        Document(f"{corpus_id}-{d:03d}", tuple(lemmas[x] for x in row))
        for d, row in enumerate(draws)
    )
    return Corpus(corpus_id, docs)


def synthetic_suite(n_authors: int = 3, vocab_size: int = 1000, n_perturbed: int = 20,
                    intensity: float = 2.0, n_docs: int = 15, doc_len: int = 600,
                    seed: int = 0, zipf_exponent: float = 1.2) -> list[Corpus]:
    """A multi-author benchmark dataset with disjoint planted features.

    The base distribution is Zipf-like (``zipf_exponent`` = 0 gives uniform)
    and each author's perturbed features are drawn with probability
    proportional to their base mass, so the planted signal lands on features
    that actually occur at the given document lengths.
    """
    rng = np.random.default_rng([seed, _STREAM_SUITE])
    base = 1.0 / np.arange(1, vocab_size + 1) ** zipf_exponent
    base /= base.sum()
    chosen = rng.choice(vocab_size, size=n_authors * n_perturbed, replace=False, p=base)
    corpora = []
    for j in range(n_authors):
        feats = tuple(int(x) for x in chosen[j * n_perturbed:(j + 1) * n_perturbed])
        spec = SyntheticAuthorSpec(vocab_size, tuple(base), feats, intensity,
                                   seed=int(rng.integers(2 ** 63)))
        corpora.append(generate_author(spec, n_docs, doc_len, corpus_id=f"author{j}"))
    return corpora


# ---------------------------------------------------------------------------
# fast attribution evaluator

def _attribute_fast(qvec: np.ndarray, refs, space: FeatureSpace, gamma0: float,
                    alpha: float, hc_plus: bool) -> str | None:
    """Attribution decision for one query from prebuilt reference vectors.

    ``refs`` holds (corpus_id, member_vectors, reference_sum) triples.
    Produces the same decision as :func:`hcstylo.attribution.attribute`.
    """
    pairs = []
    for corpus_id, members, ref_sum in refs:
        if len(members) < 2:
            raise ValueError(f"reference corpus {corpus_id!r} needs at least 2 documents")
        x_prime = space.hc_discrepancy(qvec, ref_sum, gamma0, hc_plus=hc_plus)
        extended = ref_sum + qvec
        scores = [space.hc_discrepancy(v, extended - v, gamma0, hc_plus=hc_plus)
                  for v in members]
        mean = float(np.mean(scores))
        sd = float(np.std(scores, ddof=1))
        if sd <= 0.0:
            p = 0.0 if x_prime > mean else 1.0
        else:
            p = _upper_tail_p(x_prime, mean, sd, len(scores))[2]
        pairs.append((corpus_id, p))
    return decide(pairs, alpha)[0]


def _loo_decisions(corpora: Sequence[Corpus], *, ngram: int, gamma0: float,
                   alpha: float, hc_plus: bool,
                   query_map: Mapping[tuple[int, int], Document] | None = None,
                   ) -> list[tuple[str, str | None]]:
    """Leave-one-out attribution of every document against all corpora.

    Each document is removed from its home corpus and attributed; the query
    side can be overridden per (corpus index, document index), e.g. with a
    truncated copy.  Returns (true corpus id, attributed id or None) pairs.
    """
    ids = [c.corpus_id for c in corpora]
    if len(set(ids)) != len(ids):
        raise ValueError(f"corpus ids must be distinct, got {ids}")
    docs = [d for c in corpora for d in c.documents]
    extra = list(query_map.values()) if query_map else []
    space = FeatureSpace(docs + extra, ngram=ngram)
    vecs = [[space.vector(d) for d in c.documents] for c in corpora]
    sums = [np.sum(v, axis=0) for v in vecs]
    out = []
    for ci, corpus in enumerate(corpora):
        if len(corpus.documents) < 3:
            raise ValueError(
                f"corpus {corpus.corpus_id!r} needs >= 3 documents for leave-one-out attribution")
        for di, doc in enumerate(corpus.documents):
            override = query_map.get((ci, di)) if query_map else None
            qvec = space.vector(override) if override is not None else vecs[ci][di]
            refs = []
            for cj, other in enumerate(corpora):
                if cj == ci:
                    members = vecs[cj][:di] + vecs[cj][di + 1:]
                    ref_sum = sums[cj] - vecs[ci][di]
                else:
                    members = vecs[cj]
                    ref_sum = sums[cj]
                refs.append((other.corpus_id, members, ref_sum))
            out.append((corpus.corpus_id,
                        _attribute_fast(qvec, refs, space, gamma0, alpha, hc_plus)))
    return out


def _accuracy(decisions: Sequence[tuple[str, str | None]]) -> float:
    # an unattributable document counts as incorrect
    return sum(1 for true, got in decisions if got == true) / len(decisions)


def attribution_accuracy(corpora: Sequence[Corpus], *, ngram: int = 1,
                         gamma0: float = DEFAULT_GAMMA0, alpha: float = DEFAULT_ALPHA,
                         hc_plus: bool = False) -> tuple[float, list[tuple[str, str | None]]]:
    """Vanilla leave-one-out attribution accuracy over a labeled dataset."""
    decisions = _loo_decisions(corpora, ngram=ngram, gamma0=gamma0, alpha=alpha,
                               hc_plus=hc_plus)
    return _accuracy(decisions), decisions


# ---------------------------------------------------------------------------
# bootstrap

def _resample_corpora(corpora: Sequence[Corpus], rng: np.random.Generator,
                      per_document: bool) -> list[Corpus]:
    """Token-level resampling with replacement.

    Global mode resamples the pooled token instances of the whole dataset
    and keeps each sampled instance in its original document (repeats stay
    distinct occurrences, so counts remain integers).  Per-document mode
    resamples within each document independently.
    """
    lengths = [len(d.tokens) for c in corpora for d in c.documents]
    if per_document:
        multiplicities = [np.bincount(rng.integers(0, ln, size=ln), minlength=ln)
                          for ln in lengths]
    else:
        total = sum(lengths)
        flat = np.bincount(rng.integers(0, total, size=total), minlength=total)
        multiplicities, pos = [], 0
        for ln in lengths:
            multiplicities.append(flat[pos:pos + ln])
            pos += ln
    out, k = [], 0
    for c in corpora:
        docs = []
        for d in c.documents:
            reps = multiplicities[k]
            k += 1
            tokens = tuple(tok for tok, m in zip(d.tokens, reps) for _ in range(m))
            docs.append(Document(d.doc_id, tokens, d.verse_count, d.source_ref))
        out.append(Corpus(c.corpus_id, tuple(docs)))
    return out


def bootstrap_accuracy(corpora: Sequence[Corpus], iterations: int = 100, seed: int = 0,
                       *, resample: bool = True, per_document: bool = False,
                       ngram: int = 1, gamma0: float = DEFAULT_GAMMA0,
                       alpha: float = DEFAULT_ALPHA, hc_plus: bool = False) -> RobustnessReport:
    """Spread of the leave-one-out attribution accuracy under resampling.

    With ``resample`` off every iteration is the identity sample and
    reproduces the vanilla accuracy exactly.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    per_trial = []
    for it in range(iterations):
        if resample:
            rng = np.random.default_rng([seed, _STREAM_BOOTSTRAP, it])
            data = _resample_corpora(corpora, rng, per_document)
        else:
            data = list(corpora)
        decisions = _loo_decisions(data, ngram=ngram, gamma0=gamma0, alpha=alpha,
                                   hc_plus=hc_plus)
        per_trial.append(_accuracy(decisions))
    return _make_report("bootstrap", per_trial, {
        "iterations": iterations, "seed": seed, "resample": resample,
        "per_document": per_document, "ngram": ngram, "gamma0": gamma0,
        "alpha": alpha, "hc_plus": hc_plus,
    })


# ---------------------------------------------------------------------------
# k-fold cross-validation

def kfold_accuracy(corpora: Sequence[Corpus], k: int = 4, splits: int = 100, seed: int = 0,
                   *, ngram: int = 1, gamma0: float = DEFAULT_GAMMA0,
                   alpha: float = DEFAULT_ALPHA, hc_plus: bool = False) -> RobustnessReport:
    """Accuracy over random near-equal k-fold splits of the pooled documents.

    Per split the documents are partitioned into k groups (sizes differing
    by at most 1); each group in turn is held out and its documents are
    attributed against corpora rebuilt from the other groups, so a split's
    accuracy covers every document once.  With k equal to the number of
    documents this reduces exactly to leave-one-out attribution.  A split
    in which any fold leaves a reference corpus with fewer than 2 documents
    is invalid and excluded; the count is reported in the params.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    labels = [c.corpus_id for c in corpora for _ in c.documents]
    docs = [d for c in corpora for d in c.documents]
    if len(docs) < k:
        raise ValueError("need at least k documents")
    corpus_ids = [c.corpus_id for c in corpora]
    space = FeatureSpace(docs, ngram=ngram)
    vecs = [space.vector(d) for d in docs]
    per_trial, invalid = [], 0
    for s in range(splits):
        rng = np.random.default_rng([seed, _STREAM_KFOLD, s])
        groups = np.array_split(rng.permutation(len(docs)), k)
        hits = total = 0
        valid = True
        for held in groups:
            held_set = set(int(i) for i in held)
            members: dict[str, list[np.ndarray]] = {cid: [] for cid in corpus_ids}
            for idx, label in enumerate(labels):
                if idx not in held_set:
                    members[label].append(vecs[idx])
            if any(len(v) < 2 for v in members.values()):
                valid = False
                break
            refs = [(cid, members[cid], np.sum(members[cid], axis=0))
                    for cid in corpus_ids]
            for idx in sorted(held_set):
                got = _attribute_fast(vecs[idx], refs, space, gamma0, alpha, hc_plus)
                hits += got == labels[idx]
                total += 1
        if not valid:
            invalid += 1
            continue
        per_trial.append(hits / total)
    return _make_report("kfold", per_trial, {
        "k": k, "splits": splits, "invalid_splits": invalid, "seed": seed,
        "ngram": ngram, "gamma0": gamma0, "alpha": alpha, "hc_plus": hc_plus,
    })


# ---------------------------------------------------------------------------
# text-length sensitivity

def _median_tokens_per_verse(corpora: Sequence[Corpus]) -> float:
    ratios = [len(d.tokens) / d.verse_count
              for c in corpora for d in c.documents if d.verse_count > 0]
    if not ratios:
        raise ValueError("no verse_count metadata to derive a tokens-per-verse rate")
    return float(np.median(ratios))


def _truncate_tokens(doc: Document, budget: int, rng: np.random.Generator
                     ) -> tuple[Document, bool]:
    if budget >= len(doc.tokens):
        return doc, True
    start = int(rng.integers(0, len(doc.tokens) - budget + 1))
    sl = slice(start, start + budget)
    return Document(doc.doc_id, doc.tokens[sl], 0, doc.source_ref,
                    doc.morphs[sl] if doc.morphs else (),
                    doc.verse_ids[sl] if doc.verse_ids else ()), False


def _truncate_verses(doc: Document, budget: int, rng: np.random.Generator
                     ) -> tuple[Document, bool]:
    boundaries: list[int] = []
    for i, v in enumerate(doc.verse_ids):
        if not boundaries or doc.verse_ids[boundaries[-1]] != v:
            boundaries.append(i)
    if budget >= len(boundaries):
        return doc, True
    first = int(rng.integers(0, len(boundaries) - budget + 1))
    start = boundaries[first]
    stop = boundaries[first + budget] if first + budget < len(boundaries) else len(doc.tokens)
    sl = slice(start, stop)
    return Document(doc.doc_id, doc.tokens[sl], budget, doc.source_ref,
                    doc.morphs[sl] if doc.morphs else (), doc.verse_ids[sl]), False


def length_sweep(corpora: Sequence[Corpus], lengths: Sequence[int], trials: int = 3,
                 seed: int = 0, *, unit: str = "tokens", ngram: int = 1,
                 gamma0: float = DEFAULT_GAMMA0, alpha: float = DEFAULT_ALPHA,
                 hc_plus: bool = False) -> RobustnessReport:
    """Attribution accuracy as a function of query-document length.

    Budgets are token counts by default; with ``unit="verses"`` a document
    with per-token verse numbers is cut to whole verses, and one without is
    cut to budget * (dataset median tokens per verse) tokens.  Queries are
    random contiguous windows; reference corpora stay full-length.  A budget
    at or above a document's length uses the whole document (counted in the
    params).
    """
    if any(b < 1 for b in lengths):
        raise ValueError("budgets must be positive")
    if unit not in ("tokens", "verses"):
        raise ValueError(f"unknown unit {unit!r}")
    tokens_per_verse = _median_tokens_per_verse(corpora) if unit == "verses" else None
    per_trial, curve, used_whole = [], [], 0
    for bi, budget in enumerate(lengths):
        accs = []
        for t in range(trials):
            rng = np.random.default_rng([seed, _STREAM_LENGTH, bi, t])
            query_map = {}
            for ci, c in enumerate(corpora):
                for di, doc in enumerate(c.documents):
                    if unit == "verses" and doc.verse_ids:
                        qdoc, whole = _truncate_verses(doc, budget, rng)
                    else:
                        token_budget = (budget if unit == "tokens"
                                        else max(1, round(budget * tokens_per_verse)))
                        qdoc, whole = _truncate_tokens(doc, token_budget, rng)
                    if whole:
                        used_whole += 1
                    else:
                        query_map[(ci, di)] = qdoc
            decisions = _loo_decisions(corpora, ngram=ngram, gamma0=gamma0, alpha=alpha,
                                       hc_plus=hc_plus, query_map=query_map)
            accs.append(_accuracy(decisions))
        per_trial.extend(accs)
        curve.append([int(budget), float(np.mean(accs))])
    return _make_report("length_sweep", per_trial, {
        "lengths": [int(b) for b in lengths], "unit": unit, "trials": trials,
        "seed": seed, "curve": curve, "queries_used_whole": used_whole,
        "ngram": ngram, "gamma0": gamma0, "alpha": alpha, "hc_plus": hc_plus,
    })


# ---------------------------------------------------------------------------
# gamma0 sensitivity

def gamma_sweep(corpora: Sequence[Corpus], gammas: Sequence[float] = (0.2, 0.35, 0.5),
                *, ngram: int = 1, alpha: float = DEFAULT_ALPHA,
                hc_plus: bool = False) -> RobustnessReport:
    """Leave-one-out attribution accuracy across HC search-range fractions."""
    per_trial, curve = [], []
    for g in gammas:
        acc, _ = attribution_accuracy(corpora, ngram=ngram, gamma0=g, alpha=alpha,
                                      hc_plus=hc_plus)
        per_trial.append(acc)
        curve.append([float(g), acc])
    return _make_report("gamma_sweep", per_trial, {
        "gammas": [float(g) for g in gammas], "curve": curve,
        "ngram": ngram, "alpha": alpha, "hc_plus": hc_plus,
    })
