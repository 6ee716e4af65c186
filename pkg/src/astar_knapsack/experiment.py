"""The epsilon sweep: A*(h_eps) over a doubling grid of eps plus a blind baseline."""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .heuristics import as_epsilon, exact_opt, h_epsilon, h_star, h_zero
from .knapsack import GeneratorConfig, KnapsackInstance, KnapsackSpace, generate_instance
from .metrics import PopulationTooLarge, Sampled, compute_metrics
from .search import astar, breadth_first

DEFAULT_EPSILONS = tuple(Fraction(16, 10000) * 2**k for k in range(9))
FULL_METRICS_CAP = 14
BASELINES = ("uniform-cost", "fifo")

CSV_COLUMNS = (
    "instance_type", "seed", "n", "R", "t", "C", "epsilon", "node_expansions",
    "solution_cost", "optimal", "ars", "arn", "inr", "wi", "wall_time_ms", "status",
)


@dataclass
class SweepConfig:
    instance: KnapsackInstance | GeneratorConfig
    epsilons: Sequence = DEFAULT_EPSILONS
    include_bfs: bool = True
    # "full", "skip" or a Sampled(size, seed)
    metrics: str | Sampled = "full"
    metrics_cap: int = FULL_METRICS_CAP
    baseline: str = "uniform-cost"
    time_budget: float | None = None

    def __post_init__(self):
        eps = [as_epsilon(e) for e in self.epsilons]
        if not eps:
            raise ValueError("the epsilon list is empty")
        if any(a >= b for a, b in zip(eps, eps[1:])):
            raise ValueError("epsilons must be strictly increasing")
        self.epsilons = tuple(eps)
        if self.baseline not in BASELINES:
            raise ValueError(f"baseline must be one of {BASELINES}")
        if not (self.metrics in ("full", "skip") or isinstance(self.metrics, Sampled)):
            raise ValueError(f"unknown metrics mode {self.metrics!r}")

    def load(self) -> KnapsackInstance:
        if isinstance(self.instance, GeneratorConfig):
            return generate_instance(self.instance)
        return self.instance


@dataclass
class SweepRow:
    epsilon: Fraction | str
    node_expansions: int
    solution_cost: int | None
    optimal: bool | None
    ars: Fraction | None = None
    arn: Fraction | None = None
    inr: Fraction | None = None
    wi: Fraction | None = None
    wall_time: float = 0.0
    status: str = "ok"
    reopens: int = 0


@dataclass
class Sweep:
    instance: KnapsackInstance
    optimum_cost: int
    rows: list[SweepRow] = field(default_factory=list)

    def astar_rows(self) -> list[SweepRow]:
        return [r for r in self.rows if r.epsilon != "BFS"]

    def baseline_row(self) -> SweepRow | None:
        return next((r for r in self.rows if r.epsilon == "BFS"), None)


def run_sweep(cfg: SweepConfig) -> Sweep:
    inst = cfg.load()
    if cfg.metrics == "full" and inst.n > cfg.metrics_cap:
        raise PopulationTooLarge(
            f"full metrics are capped at n={cfg.metrics_cap} (instance has n={inst.n}); "
            "use sampled metrics or skip them"
        )
    opt_full = exact_opt(inst, inst.full)
    optimum = sum(inst.profits) - opt_full
    exact = h_star(inst, opt_full) if cfg.metrics != "skip" else None
    sweep = Sweep(inst, optimum)
    for eps in cfg.epsilons:
        h = h_epsilon(inst, eps)
        t0 = time.perf_counter()
        res = astar(KnapsackSpace(inst), h, time_limit=cfg.time_budget)
        elapsed = time.perf_counter() - t0
        if res.timed_out:
            sweep.rows.append(SweepRow(eps, res.expansions, None, None, wall_time=elapsed,
                                       status="timeout", reopens=res.reopens))
            continue
        row = SweepRow(eps, res.expansions, res.solution_cost, res.solution_cost == optimum,
                       wall_time=elapsed, reopens=res.reopens)
        if exact is not None:
            m = compute_metrics(h, inst, cfg.metrics, exact=exact, cap=cfg.metrics_cap)
            row.ars, row.arn, row.inr, row.wi = m.ars, m.arn, m.inr, m.wi
        sweep.rows.append(row)
    if cfg.include_bfs:
        t0 = time.perf_counter()
        space = KnapsackSpace(inst)
        if cfg.baseline == "fifo":
            res = breadth_first(space, time_limit=cfg.time_budget)
        else:
            res = astar(space, h_zero(inst), time_limit=cfg.time_budget)
        elapsed = time.perf_counter() - t0
        # no optimality claim is made for the baseline
        sweep.rows.append(SweepRow("BFS", res.expansions, res.solution_cost, False,
                                   wall_time=elapsed,
                                   status="timeout" if res.timed_out else "ok"))
    return sweep


def format_ratio(x: Fraction | None, places: int = 4) -> str:
    """Fixed-point decimal of an exact ratio, rounded half to even."""
    if x is None:
        return ""
    scaled = round(Fraction(x) * 10**places)
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(places + 1, "0")
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def format_epsilon(eps: Fraction | str) -> str:
    if isinstance(eps, str):
        return eps
    eps = Fraction(eps)
    # terminating decimals print exactly; anything else as num/den
    den = eps.denominator
    for p in (2, 5):
        while den % p == 0:
            den //= p
    if den != 1:
        return str(eps)
    places = 0
    while (eps * 10**places).denominator != 1:
        places += 1
    return format_ratio(eps, places) if places else str(eps.numerator)


def sweep_records(sweep: Sweep) -> list[dict]:
    meta = sweep.instance.meta_dict()
    base = {
        "instance_type": meta.get("type", ""),
        "seed": meta.get("seed", ""),
        "n": sweep.instance.n,
        "R": meta.get("R", ""),
        "t": meta.get("t", ""),
        "C": sweep.instance.capacity,
    }
    out = []
    for r in sweep.rows:
        out.append({
            **base,
            "epsilon": format_epsilon(r.epsilon),
            "node_expansions": r.node_expansions,
            "solution_cost": "" if r.solution_cost is None else r.solution_cost,
            "optimal": "" if r.optimal is None else str(r.optimal).lower(),
            "ars": format_ratio(r.ars),
            "arn": format_ratio(r.arn),
            "inr": format_ratio(r.inr),
            "wi": format_ratio(r.wi),
            "wall_time_ms": f"{r.wall_time * 1000:.1f}",
            "status": r.status,
        })
    return out


def emit_csv(sweeps: Sweep | Sequence[Sweep], path) -> None:
    if isinstance(sweeps, Sweep):
        sweeps = [sweeps]
    records = [rec for s in sweeps for rec in sweep_records(s)]
    if not records:
        raise ValueError("nothing to write")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(records)


def plot_series(sweeps: Sequence[Sweep]) -> dict:
    """Per-metric series over eps, averaged across sweeps that report a value."""
    grid = sorted({r.epsilon for s in sweeps for r in s.astar_rows()})
    series = {}
    for name in ("ars", "arn", "inr", "wi", "node_expansions"):
        values = []
        for eps in grid:
            got = [getattr(r, name) for s in sweeps for r in s.astar_rows()
                   if r.epsilon == eps and getattr(r, name) is not None and r.status == "ok"]
            values.append(float(sum(Fraction(v) for v in got) / len(got)) if got else None)
        series[name] = values
    return {"epsilon": [float(e) for e in grid], "sweeps": len(sweeps), "series": series}


def emit_plot_data(sweeps: Sequence[Sweep], path) -> None:
    if not sweeps:
        raise ValueError("nothing to write")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(plot_series(sweeps), fh, indent=2)
        fh.write("\n")
