"""Exact two-sided binomial allocation tests between two frequency tables.

For a feature w with pooled count n_w and leave-one-feature-out rate q_w,
the null model allocates each of the n_w occurrences to text 1
independently with probability q_w.  The p-value is the exact probability
that a Bin(n_w, q_w) draw deviates from its mean n_w*q_w by at least as
much as the observed count in text 1:

    p(w) = sum over {k : |k - n_w*q_w| >= |count_1 - n_w*q_w|} of pmf(k)

computed by log-space pmf summation (no normal approximation).  p-values
are floored at 1e-300 so downstream z-scores stay finite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp, xlog1py, xlogy

from .ingest import FeatureToken, FrequencyTable, vocabulary

P_FLOOR = 1e-300

# Slack factor for the deviation comparison |k - n q| >= |count_1 - n q|.
# Rounding of n*q can push an exact mirror outcome (k such that the true
# deviations are equal) just below the observed deviation and silently drop
# its pmf from the sum; shrinking the threshold by 1e-10 keeps those
# outcomes in.  For q = a/b the true deviation gap between distinct
# outcomes is at least 1/b, so the slack cannot pull in a genuinely
# interior outcome for any realistic table size.
_BOUNDARY_SLACK = 1.0 - 1e-10


class DegenerateRateError(ValueError):
    """The leave-one-feature-out rate is undefined (w is the whole vocabulary)."""


@dataclass(frozen=True, slots=True)
class BinomialTestRecord:
    """Per-feature allocation test outcome between two texts."""

    feature: FeatureToken
    n_w: int
    q_w: float
    count_1: int
    p_value: float
    sign: int


def pooled_count(t1: FrequencyTable, t2: FrequencyTable, w: FeatureToken) -> int:
    """Total occurrences of ``w`` across both tables (missing = 0)."""
    return t1.get(w) + t2.get(w)


def leave_out_rate(t1: FrequencyTable, t2: FrequencyTable, w: FeatureToken) -> float:
    """Fraction of all non-``w`` tokens that lie in the first table."""
    numer = t1.total - t1.get(w)
    denom = (t1.total + t2.total) - pooled_count(t1, t2, w)
    if denom == 0:
        raise DegenerateRateError(
            f"feature {w.render()!r} is the entire vocabulary of both texts")
    return numer / denom


def exact_binomial_p(count_1: int, n_w: int, q_w: float) -> float:
    """Two-sided exact binomial tail, by full log-space enumeration.

    Returns exactly 1.0 when the observed deviation is 0; never returns 0
    (results are floored at 1e-300).
    """
    if not 0.0 <= q_w <= 1.0:
        raise ValueError(f"q_w must lie in [0, 1], got {q_w}")
    if not 0 <= count_1 <= n_w:
        raise ValueError(f"count_1 must lie in [0, n_w], got {count_1} of {n_w}")
    if n_w == 0:
        return 1.0
    k = np.arange(n_w + 1)
    center = n_w * q_w
    dev = abs(count_1 - center)
    keep = np.abs(k - center) >= dev * _BOUNDARY_SLACK
    if keep.all():
        return 1.0  # every outcome deviates at least as much as the observed one
    log_pmf = (gammaln(n_w + 1) - gammaln(k + 1) - gammaln(n_w - k + 1)
               + xlogy(k, q_w) + xlog1py(n_w - k, -q_w))
    p = float(np.exp(logsumexp(log_pmf[keep])))
    return min(max(p, P_FLOOR), 1.0)


# ---------------------------------------------------------------------------
# vectorized core shared by test_all and the leave-one-out loops

_lgamma_cache = np.zeros(1)


def _lgamma_table(n_max: int) -> np.ndarray:
    """gammaln(0..n_max) lookup table, grown on demand."""
    global _lgamma_cache
    if _lgamma_cache.size <= n_max:
        _lgamma_cache = gammaln(np.arange(max(n_max + 1, 2 * _lgamma_cache.size)))
    return _lgamma_cache


def _two_sided_tail(c: np.ndarray, n: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Per-entry two-sided tails for 0 < q <= 1/2, via one flat enumeration."""
    sizes = n + 1
    offsets = np.zeros(n.size, dtype=np.int64)
    np.cumsum(sizes[:-1], out=offsets[1:])
    seg = np.repeat(np.arange(n.size), sizes)
    k = np.arange(int(sizes.sum()), dtype=np.int64) - offsets[seg]
    lg = _lgamma_table(int(n.max()) + 1)
    nf = n[seg]
    log_pmf = (lg[nf + 1] - lg[k + 1] - lg[nf - k + 1]
               + k * np.log(q)[seg] + (nf - k) * np.log1p(-q)[seg])
    center = n * q
    dev = np.abs(c - center)
    keep = np.abs(k - center[seg]) >= (dev * _BOUNDARY_SLACK)[seg]
    log_pmf[~keep] = -np.inf
    seg_max = np.maximum.reduceat(log_pmf, offsets)
    sums = np.add.reduceat(np.exp(log_pmf - seg_max[seg]), offsets)
    p = np.exp(seg_max + np.log(sums))
    # a segment whose every outcome is in the event has p = 1 by definition;
    # short-circuit it past the float summation noise
    all_kept = np.add.reduceat(keep.astype(np.int64), offsets) == sizes
    p[all_kept] = 1.0
    return p


def allocation_pvalues(counts_1, counts_2):
    """Vectorized allocation tests over aligned per-feature count arrays.

    Every entry must have a positive pooled count.  Returns arrays
    ``(p_value, sign, q_w, n_w)`` in input order.  The computation is
    canonicalized to q <= 1/2 by integer comparison, so swapping the two
    sides yields bit-identical p-values; signs follow the first side.
    """
    c1 = np.asarray(counts_1, dtype=np.int64)
    c2 = np.asarray(counts_2, dtype=np.int64)
    if c1.shape != c2.shape or c1.ndim != 1:
        raise ValueError("count arrays must be aligned 1-d vectors")
    if np.any(c1 < 0) or np.any(c2 < 0):
        raise ValueError("counts must be nonnegative")
    n = c1 + c2
    if np.any(n == 0):
        raise ValueError("every feature needs a positive pooled count")
    total_1 = int(c1.sum())
    total = total_1 + int(c2.sum())
    numer = total_1 - c1
    denom = total - n

    p = np.ones(n.size)
    q = np.empty(n.size)
    # exact sign of count_1 - n_w*q_w via integer cross-multiplication
    degenerate = denom == 0
    q[degenerate] = total_1 / total
    cross = np.where(degenerate, c1 * total - n * total_1, c1 * denom - n * numer)
    sign = np.sign(cross).astype(np.int64)

    regular = ~degenerate
    q[regular] = numer[regular] / denom[regular]

    # canonical orientation: the side with the smaller non-w share (count
    # tie-broken by the smaller count) so A-vs-B and B-vs-A share bits
    swap = (2 * numer > denom) | ((2 * numer == denom) & (2 * c1 > n))
    cc = np.where(swap, c2, c1)
    cnum = np.where(swap, denom - numer, numer)
    with np.errstate(invalid="ignore"):
        cq = np.where(regular, cnum / np.where(degenerate, 1, denom), 0.0)

    # q == 0 collapses the binomial to a point mass at 0
    point = regular & (cnum == 0)
    p[point] = np.where(cc[point] == 0, 1.0, P_FLOOR)

    enum = regular & ~point
    if enum.any():
        p[enum] = _two_sided_tail(cc[enum], n[enum], cq[enum])
    np.clip(p, P_FLOOR, 1.0, out=p)
    return p, sign, q, n


def test_all(t1: FrequencyTable, t2: FrequencyTable) -> list[BinomialTestRecord]:
    """One allocation test per feature of the union vocabulary.

    Records come back in deterministic (sorted) feature order, each p-value
    computed with that feature's own leave-one-out rate.  A degenerate rate
    (single-feature vocabulary) yields p = 1 with the overall share of the
    first table recorded as q_w.
    """
    vocab = vocabulary(t1, t2)
    if not vocab:
        raise ValueError("empty union vocabulary: nothing to compare")
    c1 = np.fromiter((t1.get(w) for w in vocab), dtype=np.int64, count=len(vocab))
    c2 = np.fromiter((t2.get(w) for w in vocab), dtype=np.int64, count=len(vocab))
    p, sign, q, n = allocation_pvalues(c1, c2)
    return [
        BinomialTestRecord(w, int(n[i]), float(q[i]), int(c1[i]), float(p[i]), int(sign[i]))
        for i, w in enumerate(vocab)
    ]
