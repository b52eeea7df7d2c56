"""Search for the k-most influential set.

Adaptive greedy search evaluates the exact influence of each augmented set
in O(1) per candidate via running numerator/denominator sums; exhaustive
enumeration over all subsets serves as a small-instance oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import ceil, comb

import numpy as np

from .errors import CombinatorialBudgetExceeded, DegenerateRemoval
from .influence import DEGENERACY_REL_TOL, InfluenceSet
from .model import RegressionFit

# Directions for the search objective.
MAXIMIZE = "max"
MINIMIZE = "min"
ABSOLUTE = "abs"

DEFAULT_SUBSET_CAP = 2_000_000


@dataclass(frozen=True)
class SearchSpec:
    """Which sets to search for.

    ``mode`` is either "constant" (fixed set size ``k``) or "relative"
    (size is the fraction ``p`` of the sample). ``direction`` selects the
    objective: maximize delta, minimize it, or maximize its absolute value.
    """

    mode: str = "constant"
    k: int | None = 1
    p: float | None = None
    direction: str = MAXIMIZE

    def __post_init__(self):
        if self.mode not in ("constant", "relative"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.direction not in (MAXIMIZE, MINIMIZE, ABSOLUTE):
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.mode == "constant":
            if self.k is None or self.p is not None:
                raise ValueError("constant mode takes k and not p")
            if self.k < 1:
                raise ValueError("k must be a positive integer")
        else:
            if self.p is None or self.k is not None:
                raise ValueError("relative mode takes p and not k")
            if not 0.0 < self.p < 1.0:
                raise ValueError("p must lie in (0, 1)")

    def resolve_k(self, n: int) -> int:
        """Set-size budget for a sample of size ``n``."""
        k = self.k if self.mode == "constant" else ceil(self.p * n)
        k = max(k, 1)
        if k >= n:
            raise ValueError(f"budget k={k} must be smaller than N={n}")
        return k


def _objective(delta, direction):
    if direction == MAXIMIZE:
        return delta
    if direction == MINIMIZE:
        return -delta
    return abs(delta)


def _make_set(fit: RegressionFit, indices, delta, d_remaining) -> InfluenceSet:
    idx = tuple(int(i) for i in indices)
    labels = None
    if fit.labels is not None:
        labels = tuple(fit.labels[i] for i in idx)
    return InfluenceSet(
        indices=idx,
        delta=float(delta),
        contributions=fit.x[list(idx)] * fit.residuals[list(idx)],
        d_remaining=float(d_remaining),
        labels=labels,
    )


def greedy_most_influential(
    fit: RegressionFit, spec: SearchSpec, candidates=None
) -> InfluenceSet:
    """Adaptive greedy search for the most influential set.

    Starting from the empty set, each step adds the index that maximizes the
    exact influence of the augmented set (direction-adjusted). Stops after
    the budget is exhausted or when no addition improves the objective, and
    returns the best prefix encountered (the empty set has influence 0).

    ``candidates`` optionally restricts the selectable indices while the
    influence is still evaluated against the full fit (used for restricted
    block maxima).
    """
    k = spec.resolve_k(fit.n)
    xr = fit.x * fit.residuals
    xx = fit.x * fit.x
    floor = DEGENERACY_REL_TOL * fit.d_total

    numer = 0.0
    denom = fit.d_total
    chosen: list[int] = []
    in_set = np.zeros(fit.n, dtype=bool)
    if candidates is not None:
        allowed = np.zeros(fit.n, dtype=bool)
        allowed[np.asarray(candidates, dtype=int)] = True
        in_set[~allowed] = True  # never selectable, never accumulated
        k = min(k, int(allowed.sum()))
    best_obj = 0.0
    best_prefix = 0
    best_delta = 0.0

    for _ in range(k):
        cand_denom = denom - xx
        cand_delta = np.where(cand_denom > floor, (numer + xr) / cand_denom, np.nan)
        obj = _objective(cand_delta, spec.direction)
        obj[in_set] = -np.inf
        obj[~np.isfinite(obj)] = -np.inf
        j = int(np.argmax(obj))  # argmax takes the first, smallest index on ties
        if not np.isfinite(obj[j]):
            raise DegenerateRemoval(
                "every remaining augmentation exhausts the feature variance"
            )
        chosen.append(j)
        in_set[j] = True
        numer += xr[j]
        denom -= xx[j]
        step_obj = float(obj[j])
        if step_obj > best_obj:
            best_obj = step_obj
            best_prefix = len(chosen)
            best_delta = float(cand_delta[j])
        elif step_obj < best_obj:
            break  # strictly worse: |S| <= k allows stopping early

    prefix = chosen[:best_prefix]
    d_remaining = fit.d_total - float(xx[prefix].sum())
    return _make_set(fit, prefix, best_delta, d_remaining)


def exhaustive_most_influential(
    fit: RegressionFit, k: int, direction: str = MAXIMIZE,
    subset_cap: int = DEFAULT_SUBSET_CAP,
) -> InfluenceSet:
    """Enumerate all subsets of size at most ``k`` and return the maximizer.

    Ties are broken in favor of the lexicographically smallest index tuple
    (the empty set wins when nothing beats influence 0). Intended as an
    oracle for small instances; refuses to enumerate more than
    ``subset_cap`` subsets.
    """
    n = fit.n
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < N, got k={k}, N={n}")
    total = sum(comb(n, size) for size in range(1, k + 1))
    if total > subset_cap:
        raise CombinatorialBudgetExceeded(
            f"{total} subsets exceed the cap of {subset_cap}"
        )

    xr = fit.x * fit.residuals
    xx = fit.x * fit.x
    floor = DEGENERACY_REL_TOL * fit.d_total

    best = ((), 0.0, 0.0)  # (indices, objective, delta); empty set baseline
    for size in range(1, k + 1):
        combos = np.fromiter(
            (i for c in combinations(range(n), size) for i in c),
            dtype=int,
        ).reshape(-1, size)
        numer = xr[combos].sum(axis=1)
        denom = fit.d_total - xx[combos].sum(axis=1)
        valid = denom > floor
        delta = np.where(valid, numer / np.where(valid, denom, 1.0), np.nan)
        obj = _objective(delta, direction)
        obj[~valid] = -np.inf
        # combinations() yields tuples in lexicographic order, so the first
        # strict improvement is the lexicographically smallest maximizer.
        j = int(np.argmax(obj))
        if not np.isfinite(obj[j]):
            continue
        cand = tuple(int(i) for i in combos[j])
        if obj[j] > best[1] or (obj[j] == best[1] and best[0] and cand < best[0]):
            best = (cand, float(obj[j]), float(delta[j]))

    indices, _, delta = best
    d_remaining = fit.d_total - float(xx[list(indices)].sum())
    return _make_set(fit, indices, delta, d_remaining)
