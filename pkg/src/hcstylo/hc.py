"""Higher Criticism over a p-value collection, plus threshold feature selection.

Given N p-values sorted ascending, the statistic is the maximum over the
first floor(gamma0*N) sorted positions (at least position 1) of

    z_i = sqrt(N) * (i/N - p_(i)) / sqrt((i/N) * (1 - i/N))

i.e. the standardized gap between the empirical p-value quantiles and the
uniform ones.  The maximizing position i* also defines the selected set:
the i* smallest p-values, which are the features carrying the evidence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .binom import BinomialTestRecord

DEFAULT_GAMMA0 = 0.35
_DENOM_FLOOR = 1e-12


@dataclass(frozen=True)
class HcResult:
    """HC score, maximizing sorted index, and (optionally) the selected set.

    ``selected`` is populated by :func:`hct_select` with the records whose
    p-values fall at or below the maximizing position, smallest first; plain
    :func:`hc_statistic` leaves it empty.
    """

    hc: float
    gamma0: float
    n: int
    i_star: int
    selected: tuple[BinomialTestRecord, ...] = ()


def _validated(p_values, gamma0: float) -> np.ndarray:
    p = np.asarray(p_values, dtype=float)
    if p.size == 0:
        raise ValueError("need at least one p-value")
    if np.any(p <= 0.0) or np.any(p > 1.0):
        raise ValueError("p-values must lie in (0, 1]")
    if not 0.0 < gamma0 < 1.0:
        raise ValueError(f"gamma0 must lie in (0, 1), got {gamma0}")
    return p


def _hc_core(p_sorted: np.ndarray, gamma0: float, hc_plus: bool) -> tuple[float, int]:
    n = p_sorted.size
    i_max = min(n, max(1, math.floor(gamma0 * n)))
    u = np.arange(1, i_max + 1) / n
    z = math.sqrt(n) * (u - p_sorted[:i_max]) / np.sqrt(np.maximum(u * (1.0 - u), _DENOM_FLOOR))
    if hc_plus:
        # restrict to p_(i) >= 1/N; an empty restriction falls back to i = 1
        eligible = p_sorted[:i_max] >= 1.0 / n
        if eligible.any():
            z = np.where(eligible, z, -np.inf)
    i_star = int(np.argmax(z))  # first max wins ties
    return float(z[i_star]), i_star + 1


def hc_statistic(p_values: Sequence[float], gamma0: float = DEFAULT_GAMMA0,
                 *, hc_plus: bool = False) -> HcResult:
    """HC of a p-value collection; input order is irrelevant."""
    p = _validated(p_values, gamma0)
    hc, i_star = _hc_core(np.sort(p), gamma0, hc_plus)
    return HcResult(hc=hc, gamma0=gamma0, n=p.size, i_star=i_star)


def hct_select(records: Sequence[BinomialTestRecord], gamma0: float = DEFAULT_GAMMA0,
               *, hc_plus: bool = False) -> HcResult:
    """HC over the records' p-values with the selected feature set attached.

    Records tied with the boundary p-value all enter the selection (and
    ``i_star`` widens accordingly).  A non-positive HC score means no
    feature stands out; callers usually report an empty discrimination list
    in that case.
    """
    if not records:
        raise ValueError("need at least one test record")
    p = _validated([r.p_value for r in records], gamma0)
    order = np.argsort(p, kind="stable")
    p_sorted = p[order]
    hc, i_star = _hc_core(p_sorted, gamma0, hc_plus)
    widened = int(np.searchsorted(p_sorted, p_sorted[i_star - 1], side="right"))
    selected = tuple(records[j] for j in order[:widened])
    return HcResult(hc=hc, gamma0=gamma0, n=p.size, i_star=widened, selected=selected)
