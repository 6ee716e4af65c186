"""Property checks shared by the ``verify`` subcommand and the test suite.

Each ``check_*`` returns a list of :class:`Failure`; an empty list is a pass.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .experiment import DEFAULT_EPSILONS
from .heuristics import exact_opt, fptas_solve, fptas_value, h_epsilon, h_star, h_zero
from .knapsack import (
    INSTANCE_TYPES,
    GeneratorConfig,
    KnapsackInstance,
    KnapsackSpace,
    generate_instance,
    members,
    serialize_instance,
    total_profit,
    total_weight,
)
from .metrics import check_bound
from .search import ContractError, astar


@dataclass
class Failure:
    check: str
    detail: str
    instance: KnapsackInstance
    state: int | None = None

    def dump(self) -> str:
        lines = [f"[{self.check}] {self.detail}"]
        if self.state is not None:
            lines.append(f"state: {{{', '.join(map(str, members(self.state)))}}}")
        lines.append(serialize_instance(self.instance).rstrip())
        return "\n".join(lines)


@dataclass
class VerifyReport:
    level: str
    counts: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def add(self, name: str, failures: list) -> None:
        self.counts[name] = self.counts.get(name, 0) + 1
        self.failures.extend(failures)


def _all_states(inst):
    return range(1, 1 << inst.n)


def check_fptas(inst: KnapsackInstance, mask: int, eps) -> list[Failure]:
    res = fptas_solve(inst, mask, eps)
    opt = exact_opt(inst, mask)
    eps = Fraction(eps)
    out = []
    if res.selected & ~mask:
        out.append(Failure("fptas", f"selected set leaves X (eps={eps})", inst, mask))
    if total_weight(inst, res.selected) > inst.capacity:
        out.append(Failure("fptas", f"selected set is infeasible (eps={eps})", inst, mask))
    if total_profit(inst, res.selected) != res.value:
        out.append(Failure("fptas", "value differs from the selected set's profit", inst, mask))
    if not (1 - eps) * opt <= res.value <= opt:
        out.append(Failure("fptas", f"A={res.value} outside [(1-eps)Opt, Opt], Opt={opt}, eps={eps}",
                           inst, mask))
    fast = fptas_value(inst, mask, eps)
    if fast != res.value:
        out.append(Failure("fptas", f"table DP gives {res.value}, kernel gives {fast}", inst, mask))
    return out


def check_exact(inst: KnapsackInstance, exact=None) -> list[Failure]:
    exact = exact if exact is not None else h_star(inst)
    out = []
    cap = inst.capacity
    for x in _all_states(inst):
        got = exact(x)
        if min(inst.weights[i - 1] for i in members(x)) > cap:
            want = math.inf
        else:
            want = total_profit(inst, x) - exact_opt(inst, x)
        if got != want:
            out.append(Failure("exact", f"h*={got}, p(X)-Opt(X)={want}", inst, x))
    return out


def check_admissible(inst: KnapsackInstance, h, exact=None, name: str = "h") -> list[Failure]:
    exact = exact if exact is not None else h_star(inst)
    out = []
    for x in _all_states(inst):
        hx = h(x)
        if total_weight(inst, x) <= inst.capacity and hx != 0:
            out.append(Failure("admissible", f"{name}={hx} at a solution state", inst, x))
        elif hx > exact(x):
            out.append(Failure("admissible", f"{name}={hx} exceeds h*={exact(x)}", inst, x))
    return out


def check_corollary(inst: KnapsackInstance, h, omega=None, exact=None,
                    name: str = "h") -> list[Failure]:
    rep = check_bound(h, inst, omega=omega, exact=exact)
    return [Failure("corollary", f"ARN({name}) exceeds omega={rep.omega}", inst, x)
            for x in rep.violations]


def check_search(inst: KnapsackInstance, h, optimum: int, name: str = "h") -> list[Failure]:
    try:
        res = astar(KnapsackSpace(inst), h)
    except ContractError as exc:
        return [Failure("search", f"A*({name}): {exc}", inst)]
    out = []
    if not res.found or res.solution_cost != optimum:
        out.append(Failure("search", f"A*({name}) cost {res.solution_cost}, optimum {optimum}", inst))
    if res.reopens:
        out.append(Failure("search", f"A*({name}) reopened {res.reopens} nodes", inst))
    return out


def check_generator(cfg: GeneratorConfig, inst: KnapsackInstance) -> list[Failure]:
    R = cfg.R
    out = []
    for i, (p, w) in enumerate(zip(inst.profits, inst.weights), start=1):
        kind = cfg.instance_type
        if kind == "strongly_correlated":
            ok = 1 <= w <= R and p == w + R // 10
        elif kind == "inverse_strongly_correlated":
            ok = 1 <= p <= R and w == p + R // 10
        elif kind == "almost_strongly_correlated":
            ok = 1 <= w <= R and abs(p - (w + R // 10)) <= R // 500
        elif kind == "subset_sum":
            ok = 1 <= w <= R and p == w
        elif kind == "uncorrelated_similar_weight":
            ok = 100000 <= w <= 100100 and 1 <= p <= R
        elif kind == "multiple_strongly_correlated":
            ok = 1 <= w <= R and p == w + (3 * R // 10 if w % 6 == 0 else 2 * R // 10)
        else:
            ok = 1 <= w <= R and p == 3 * math.ceil(w / 3)
        if not ok:
            out.append(Failure("generator", f"item {i} (p={p}, w={w}) breaks the {kind} rule", inst))
    W = sum(inst.weights)
    if not 30 * W // 101 <= inst.capacity <= 70 * W // 101:
        out.append(Failure("generator", f"capacity {inst.capacity} outside the t in [30,70] band", inst))
    if generate_instance(cfg) != inst:
        out.append(Failure("generator", "same config produced a different instance", inst))
    return out


LEVELS = {
    # (item counts, seeds per type, FPTAS probes per instance)
    "quick": ((6, 8, 10), 1, 6),
    "full": ((8, 10, 12, 14), 3, 12),
}


def run_verify(level: str = "quick", seed: int = 0, extra_heuristics: dict | None = None,
               log=None) -> VerifyReport:
    """Run every property family on seeded instances of every type.

    ``extra_heuristics`` maps a name to ``inst -> heuristic``; those are put
    through the admissibility and bound checks next to the shipped ones.
    """
    if level not in LEVELS:
        raise ValueError(f"level must be one of {', '.join(LEVELS)}")
    sizes, seeds, probes = LEVELS[level]
    report = VerifyReport(level)
    t0 = time.perf_counter()
    rng = np.random.Generator(np.random.PCG64(seed))
    for n in sizes:
        for kind in INSTANCE_TYPES:
            for k in range(seeds):
                cfg = GeneratorConfig(kind, n, seed=seed * 1000 + n * 10 + k)
                inst = generate_instance(cfg)
                report.add("generator", check_generator(cfg, inst))
                exact = h_star(inst)
                optimum = sum(inst.profits) - exact.opt_full
                report.add("exact", check_exact(inst, exact))
                for _ in range(probes):
                    mask = int(rng.integers(1, 1 << n))
                    eps = DEFAULT_EPSILONS[int(rng.integers(len(DEFAULT_EPSILONS)))]
                    report.add("fptas", check_fptas(inst, mask, eps))
                family = {f"eps={e}": h_epsilon(inst, e) for e in DEFAULT_EPSILONS}
                family["exact"] = exact
                family["zero"] = h_zero(inst)
                for name, make in (extra_heuristics or {}).items():
                    family[name] = make(inst)
                for name, h in family.items():
                    report.add("admissible", check_admissible(inst, h, exact, name))
                    report.add("corollary", check_corollary(inst, h, exact=exact, name=name))
                    report.add("search", check_search(inst, h, optimum, name))
        if log:
            log(f"n={n} done, {len(report.failures)} failures so far")
    report.seconds = time.perf_counter() - t0
    return report
