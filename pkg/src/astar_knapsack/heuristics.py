"""Ibarra-Kim FPTAS, the admissible family h_eps, exact h* and an exact oracle.

All admissibility-critical quantities (the scaling factor, ``1/(1-eps)``,
the exactness parameter) are kept as integer ratios. An item whose weight
alone exceeds the capacity can never be packed, so the FPTAS discards it
before scaling; otherwise the scaling factor would be taken from an item
that no solution contains and the ``(1 - eps)`` guarantee would be lost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np
from numba import njit

from .knapsack import KnapsackInstance, _bits, item_set, total_profit, total_weight

INF = math.inf


def as_epsilon(eps) -> Fraction:
    """Coerce ``eps`` to an exact ratio in (0, 1).

    Floats go through their shortest decimal repr so ``0.0016`` means 16/10000.
    """
    if isinstance(eps, float):
        eps = Fraction(repr(eps))
    elif isinstance(eps, Rational):
        eps = Fraction(eps)
    else:
        try:
            eps = Fraction(str(eps))
        except ValueError:
            raise ValueError(f"epsilon {eps!r} is not a number") from None
    if not 0 < eps < 1:
        raise ValueError(f"epsilon must lie strictly between 0 and 1, got {eps}")
    return eps


@dataclass(frozen=True)
class FptasResult:
    selected: int
    value: int


@dataclass
class FptasWorkspace:
    """Full DP tables for one FPTAS run; rows ``0..m`` over the items in ``items``.

    ``weight[i, q]`` is the minimal weight of a subset of the first ``i``
    items with scaled profit ``q`` (``NO_SET`` when there is none),
    ``take[i, q]`` records whether item ``i`` is in that witness and
    ``profit[i, q]`` is the witness's original profit.
    """

    items: tuple[int, ...]
    P: int
    K: Fraction
    P_scaled: int
    scaled: tuple[int, ...]
    exact: bool
    weight: np.ndarray
    take: np.ndarray
    profit: np.ndarray

    NO_SET = np.iinfo(np.int64).max

    def witness(self, i: int, q: int) -> int:
        """Bit mask of the witness S_{i,q}."""
        if self.weight[i, q] == self.NO_SET:
            raise ValueError(f"no subset of the first {i} items has scaled profit {q}")
        mask = 0
        while i > 0:
            if self.take[i, q]:
                mask |= 1 << (self.items[i - 1] - 1)
                q -= self.scaled[i - 1]
            i -= 1
        return mask


def _scaling(inst: KnapsackInstance, mask: int, eps: Fraction):
    items = [b + 1 for b in _bits(mask) if inst.weights[b] <= inst.capacity]
    m = len(items)
    if m == 0:
        return items, 0, Fraction(1), 0, [], True
    profits = [inst.profits[i - 1] for i in items]
    P = max(profits)
    K = eps * P / m
    if K <= 1:
        return items, P, Fraction(1), P, profits, True
    num, den = eps.numerator, eps.denominator
    # floor(p / K) with K = eps * P / m, in integers
    scaled = [p * m * den // (num * P) for p in profits]
    return items, P, K, m * den // num, scaled, False


def fptas_workspace(inst: KnapsackInstance, mask: int, eps) -> FptasWorkspace:
    """Run the profit-scaled min-weight DP and keep every row."""
    eps = as_epsilon(eps)
    if mask == 0:
        raise ValueError("the FPTAS needs a nonempty item set")
    items, P, K, P_scaled, scaled, exact = _scaling(inst, mask, eps)
    m = len(items)
    width = m * P_scaled + 1
    NO_SET = FptasWorkspace.NO_SET
    weight = np.full((m + 1, width), NO_SET, dtype=np.int64)
    take = np.zeros((m + 1, width), dtype=bool)
    profit = np.zeros((m + 1, width), dtype=np.int64)
    weight[0, 0] = 0
    for i in range(1, m + 1):
        s = scaled[i - 1]
        wi = inst.weight(items[i - 1])
        pi = inst.profit(items[i - 1])
        prev_w, prev_p = weight[i - 1], profit[i - 1]
        weight[i] = prev_w
        profit[i] = prev_p
        src = prev_w[: width - s]
        reach = src != NO_SET
        cand = np.where(reach, src + wi, NO_SET)
        # ties keep the witness without item i
        better = reach & (cand < prev_w[s:])
        weight[i, s:][better] = cand[better]
        profit[i, s:][better] = prev_p[: width - s][better] + pi
        take[i, s:] = better
    return FptasWorkspace(
        tuple(items), P, K, P_scaled, tuple(scaled), exact, weight, take, profit
    )


def fptas_solve(inst: KnapsackInstance, mask: int, eps) -> FptasResult:
    """The most profitable (by original profit) feasible DP witness over all rows."""
    ws = fptas_workspace(inst, mask, eps)
    if not ws.items:
        return FptasResult(0, 0)
    feasible = ws.weight[1:] <= inst.capacity
    prof = np.where(feasible, ws.profit[1:], -1)
    flat = int(np.argmax(prof))
    i, q = divmod(flat, prof.shape[1])
    i += 1
    selected = ws.witness(i, q)
    return FptasResult(selected, int(ws.profit[i, q]))


@njit(cache=True)
def _fptas_value_kernel(profits, weights, mask, cap, num, den):
    n = profits.shape[0]
    idx = np.empty(n, dtype=np.int64)
    m = 0
    P = 0
    for b in range(n):
        if (mask >> b) & 1 and weights[b] <= cap:
            idx[m] = b
            m += 1
            if profits[b] > P:
                P = profits[b]
    if m == 0:
        return 0
    exact = num * P <= den * m
    scaled = np.empty(m, dtype=np.int64)
    total = 0
    for k in range(m):
        p = profits[idx[k]]
        if exact:
            scaled[k] = p
        else:
            scaled[k] = p * m * den // (num * P)
        total += scaled[k]
    # entries above cap are treated as absent; they never become feasible
    wq = np.full(total + 1, cap + 1, dtype=np.int64)
    pq = np.zeros(total + 1, dtype=np.int64)
    wq[0] = 0
    best = 0
    hi = 0
    for k in range(m):
        s = scaled[k]
        hi += s
        if s == 0:
            continue
        wb = weights[idx[k]]
        pb = profits[idx[k]]
        for q in range(hi, s - 1, -1):
            prev = wq[q - s]
            if prev > cap:
                continue
            cand = prev + wb
            if cand <= cap and cand < wq[q]:
                wq[q] = cand
                v = pq[q - s] + pb
                pq[q] = v
                if v > best:
                    best = v
    return best


_KERNEL_LIMIT = 2**62


def fptas_value(inst: KnapsackInstance, mask: int, eps) -> int:
    """``fptas_solve(...).value`` without materialising the tables."""
    eps = as_epsilon(eps)
    if mask == 0:
        raise ValueError("the FPTAS needs a nonempty item set")
    num, den = eps.numerator, eps.denominator
    n = inst.n
    if n > 62 or max(inst.profits) * n * den >= _KERNEL_LIMIT or num * max(inst.profits) >= _KERNEL_LIMIT:
        return fptas_solve(inst, mask, eps).value
    return int(
        _fptas_value_kernel(
            inst.profit_array, inst.weight_array, np.int64(mask), inst.capacity, num, den
        )
    )


def exact_opt(inst: KnapsackInstance, mask: int) -> int:
    """Opt(X) by unscaled profit-indexed DP (minimal weight per achievable profit)."""
    if mask == 0:
        return 0
    cap = inst.capacity
    ps = [inst.profits[b] for b in _bits(mask)]
    ws = [inst.weights[b] for b in _bits(mask)]
    total = sum(ps)
    # min weight per exact profit; cap + 1 stands for "not within capacity"
    best = np.full(total + 1, cap + 1, dtype=np.int64)
    best[0] = 0
    for p, w in zip(ps, ws):
        cand = best[: total + 1 - p] + w
        np.minimum(best[p:], cand, out=best[p:])
    return int(np.flatnonzero(best <= cap)[-1])


class Heuristic:
    """Memoising heuristic over item-set masks.

    Subclasses implement ``_evaluate`` for non-solution states; solution
    states always map to 0. Evaluation is pure, so the cache is shared
    safely between callers.
    """

    name = "h"

    def __init__(self, inst: KnapsackInstance):
        self.inst = inst
        self._cache: dict[int, object] = {}

    def __call__(self, mask: int):
        v = self._cache.get(mask)
        if v is None:
            if total_weight(self.inst, mask) <= self.inst.capacity:
                v = 0
            else:
                v = self._evaluate(mask)
            self._cache[mask] = v
        return v

    def _evaluate(self, mask: int):
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class ZeroHeuristic(Heuristic):
    name = "zero"

    def __call__(self, mask: int):
        return 0


class EpsilonHeuristic(Heuristic):
    """h_eps(X) = max(p(X) - A_eps(X) / (1 - eps), 0) as an exact ratio."""

    def __init__(self, inst: KnapsackInstance, eps):
        super().__init__(inst)
        self.eps = as_epsilon(eps)
        self.name = f"eps={self.eps}"
        self._num, self._den = self.eps.numerator, self.eps.denominator

    def _evaluate(self, mask: int):
        a = fptas_value(self.inst, mask, self.eps)
        gap = self._den - self._num
        top = total_profit(self.inst, mask) * gap - a * self._den
        if top <= 0:
            return 0
        return Fraction(top, gap)


class ExactHeuristic(Heuristic):
    """h*(X) = p(X) - A_gamma(X) with gamma = 1 / min(p(X), Opt([n]) + 1).

    States with no nonempty feasible subset are dead ends and map to +inf.
    """

    name = "exact"

    def __init__(self, inst: KnapsackInstance, opt_full: int | None = None):
        super().__init__(inst)
        self.opt_full = exact_opt(inst, inst.full) if opt_full is None else opt_full

    def _evaluate(self, mask: int):
        inst = self.inst
        if min(inst.weights[b] for b in _bits(mask)) > inst.capacity:
            return INF
        px = total_profit(inst, mask)
        gamma = Fraction(1, min(px, self.opt_full + 1))
        return px - fptas_value(inst, mask, gamma)


class TableHeuristic(Heuristic):
    """Explicit values per state; unlisted states map to ``default``."""

    name = "table"

    def __init__(self, inst: KnapsackInstance, values: dict, default=0):
        super().__init__(inst)
        self.values = {(k if isinstance(k, int) else item_set(k)): v for k, v in values.items()}
        self.default = default

    def _evaluate(self, mask: int):
        return self.values.get(mask, self.default)


def h_epsilon(inst: KnapsackInstance, eps) -> EpsilonHeuristic:
    return EpsilonHeuristic(inst, eps)


def h_star(inst: KnapsackInstance, opt_full: int | None = None) -> ExactHeuristic:
    return ExactHeuristic(inst, opt_full)


def h_zero(inst: KnapsackInstance) -> ZeroHeuristic:
    return ZeroHeuristic(inst)
