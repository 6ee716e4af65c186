"""Inconsistency and accuracy metrics of a heuristic on a Knapsack search space.

The population is every nonempty non-solution subset of ``[n]``. States
whose exact cost-to-go is infinite (dead ends) are left out of the accuracy
averages, and edges with an infinite endpoint are left out of WI; both are
counted in ``excluded_dead_ends`` / ``excluded_edges``. All sums are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .heuristics import ExactHeuristic, h_star
from .knapsack import KnapsackInstance, _bits

FULL_MODE_CAP = 24
ENUMERATION_CAP = 22


class PopulationTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class Sampled:
    size: int
    seed: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("sample size must be positive")


@dataclass
class MetricsReport:
    ars: Fraction | None
    arn: Fraction | None
    inr: Fraction | None
    wi: Fraction | None
    nodes_total: int | None
    nodes_sampled: int
    edges_counted: int
    excluded_dead_ends: int = 0
    excluded_edges: int = 0
    mode: str = "full"
    sample_size: int | None = None
    seed: int | None = None

    def as_floats(self) -> dict:
        return {k: None if v is None else float(v) for k, v in
                (("ars", self.ars), ("arn", self.arn), ("inr", self.inr), ("wi", self.wi))}


@dataclass
class BoundCheckReport:
    omega: Fraction
    max_arn: Fraction
    violations: list = field(default_factory=list)
    states_checked: int = 0
    edges_checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def subset_weights(inst: KnapsackInstance) -> np.ndarray:
    """``w(X)`` for every mask ``X`` in ``0 .. 2**n - 1``."""
    out = np.zeros(1 << inst.n, dtype=np.int64)
    for b, w in enumerate(inst.weights):
        lo = 1 << b
        out[lo : 2 * lo] = out[:lo] + w
    return out


def non_solution_states(inst: KnapsackInstance) -> np.ndarray:
    if inst.n > ENUMERATION_CAP:
        raise PopulationTooLarge(f"n={inst.n} is too large to enumerate")
    return np.flatnonzero(subset_weights(inst) > inst.capacity)


def count_non_solutions(inst: KnapsackInstance) -> int | None:
    """Number of nonempty subsets heavier than C, or None if out of reach."""
    if inst.n <= ENUMERATION_CAP:
        return int(np.count_nonzero(subset_weights(inst) > inst.capacity))
    cap = inst.capacity
    if cap > 50_000_000 or inst.n > 62:
        return None
    # subsets (empty set included) per exact weight <= C
    ways = np.zeros(cap + 1, dtype=np.int64)
    ways[0] = 1
    for w in inst.weights:
        if w <= cap:
            ways[w:] = ways[w:] + ways[: cap + 1 - w]
    return (1 << inst.n) - int(ways.sum())


def wi_edge(h, inst: KnapsackInstance, x: int, x2: int) -> Fraction:
    """(h(x) - h(x')) / c(x, x') for the removal edge x -> x'."""
    removed = x ^ x2
    if x2 & ~x or removed == 0 or removed & (removed - 1) or x2 == 0:
        raise ValueError(f"{x:#b} -> {x2:#b} is not a removal edge")
    hx, hx2 = h(x), h(x2)
    if math.isinf(hx) or math.isinf(hx2):
        raise ValueError("WI is undefined on an edge with an infinite endpoint")
    return Fraction(hx - hx2) / inst.profits[removed.bit_length() - 1]


def _ratio(a, b):
    return Fraction(a) / b


def _sample(inst: KnapsackInstance, mode: Sampled):
    rng = np.random.Generator(np.random.PCG64(mode.seed))
    if inst.n <= ENUMERATION_CAP:
        pop = non_solution_states(inst)
        if mode.size >= len(pop):
            return [int(x) for x in pop], len(pop)
        pick = rng.choice(len(pop), size=mode.size, replace=False)
        return sorted(int(pop[i]) for i in pick), len(pop)
    total = count_non_solutions(inst)
    w = inst.weights
    cap = inst.capacity
    target = mode.size if total is None else min(mode.size, total)
    chosen: set[int] = set()
    n = inst.n
    while len(chosen) < target:
        bits = rng.integers(0, 2, size=n)
        mask = int(sum(1 << b for b in range(n) if bits[b]))
        if mask and sum(w[b] for b in range(n) if bits[b]) > cap:
            chosen.add(mask)
    return sorted(chosen), total


def compute_metrics(
    h,
    inst: KnapsackInstance,
    mode: str | Sampled = "full",
    exact: ExactHeuristic | None = None,
    cap: int = FULL_MODE_CAP,
) -> MetricsReport:
    """ARS, ARN, INR and WI of ``h`` over all (or a sample of) non-solution states."""
    exact = exact if exact is not None else h_star(inst)
    if isinstance(mode, Sampled):
        states, total = _sample(inst, mode)
        label, size, seed = "sampled", mode.size, mode.seed
    elif mode == "full":
        if inst.n > cap:
            raise PopulationTooLarge(
                f"full enumeration is capped at n={cap} (got n={inst.n}); use sampled mode"
            )
        states = [int(x) for x in non_solution_states(inst)]
        total = len(states)
        label, size, seed = "full", None, None
    else:
        raise ValueError(f"unknown metrics mode {mode!r}")

    p = inst.profits
    arn_sum = Fraction(0)
    arn_count = dead = 0
    inconsistent = 0
    wi_sum = Fraction(0)
    edges = skipped_edges = 0
    for x in states:
        hx = h(x)
        hs = exact(x)
        if math.isinf(hs):
            dead += 1
        else:
            arn_sum += _ratio(hx, hs)
            arn_count += 1
        if x & (x - 1) == 0:
            continue
        bad = False
        for b in _bits(x):
            hy = h(x ^ (1 << b))
            c = p[b]
            if not bad and hx > c + hy:
                bad = True
            if math.isinf(hx) or math.isinf(hy):
                skipped_edges += 1
                continue
            wi_sum += Fraction(hx - hy) / c
            edges += 1
        inconsistent += bad

    start = inst.full
    ars = None
    if states or isinstance(mode, Sampled):
        hs0 = exact(start)
        if hs0 != 0 and not math.isinf(hs0):
            ars = _ratio(h(start), hs0)
    return MetricsReport(
        ars=ars,
        arn=arn_sum / arn_count if arn_count else None,
        inr=Fraction(inconsistent, len(states)) if states else None,
        wi=wi_sum / edges if edges else None,
        nodes_total=total,
        nodes_sampled=len(states),
        edges_counted=edges,
        excluded_dead_ends=dead,
        excluded_edges=skipped_edges,
        mode=label,
        sample_size=size,
        seed=seed,
    )


def check_bound(h, inst: KnapsackInstance, omega=None, exact: ExactHeuristic | None = None,
                cap: int = 20) -> BoundCheckReport:
    """Check max_x ARN(h, x) <= max_e WI(h, e) over the whole space.

    ``omega`` overrides the computed edge maximum, which lets callers test a
    claimed bound instead of the true one.
    """
    if inst.n > cap:
        raise PopulationTooLarge(f"bound check enumerates the space; n={inst.n} exceeds {cap}")
    exact = exact if exact is not None else h_star(inst)
    p = inst.profits
    states = [int(x) for x in non_solution_states(inst)]
    best_wi = None
    arns = []
    edges = 0
    for x in states:
        hx = h(x)
        hs = exact(x)
        if not math.isinf(hs):
            arns.append((x, _ratio(hx, hs)))
        if x & (x - 1) == 0 or math.isinf(hx):
            continue
        for b in _bits(x):
            hy = h(x ^ (1 << b))
            if math.isinf(hy):
                continue
            r = Fraction(hx - hy) / p[b]
            edges += 1
            if best_wi is None or r > best_wi:
                best_wi = r
    computed = best_wi if best_wi is not None else Fraction(0)
    bound = computed if omega is None else Fraction(omega)
    max_arn = max((r for _, r in arns), default=Fraction(0))
    violations = [x for x, r in arns if r > bound]
    return BoundCheckReport(bound, max_arn, violations, len(arns), edges)


def inconsistent_edges(h, inst: KnapsackInstance, limit: int | None = None) -> list:
    """Direct scan for edges with h(x) > c(x, x') + h(x'), over every state."""
    if inst.n > ENUMERATION_CAP:
        raise PopulationTooLarge(f"n={inst.n} is too large to enumerate")
    p = inst.profits
    found = []
    for x in range(1, 1 << inst.n):
        if x & (x - 1) == 0:
            continue
        hx = h(x)
        for b in _bits(x):
            y = x ^ (1 << b)
            if hx > p[b] + h(y):
                found.append((x, y))
                if limit is not None and len(found) >= limit:
                    return found
    return found
