"""Knapsack instances, the subset-removal search space, generators and file I/O.

Items are numbered ``1..n``. An item set is an ``int`` bit mask in which bit
``i - 1`` is set iff item ``i`` is a member; the integer value of the mask is
the canonical encoding used for tie-breaking.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np

INSTANCE_TYPES = (
    "strongly_correlated",
    "inverse_strongly_correlated",
    "almost_strongly_correlated",
    "subset_sum",
    "uncorrelated_similar_weight",
    "multiple_strongly_correlated",
    "profit_ceiling",
)


class InstanceFormatError(ValueError):
    """Malformed instance text; ``lineno`` is 1-based (0 when not line-specific)."""

    def __init__(self, message: str, lineno: int = 0):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno else message)


def item_set(items: Iterable[int]) -> int:
    """Encode 1-based item numbers as a bit mask."""
    mask = 0
    for i in items:
        if i < 1:
            raise ValueError(f"item numbers start at 1, got {i}")
        mask |= 1 << (i - 1)
    return mask


def members(mask: int) -> list[int]:
    """1-based item numbers of ``mask`` in increasing order."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _bits(mask: int) -> Iterator[int]:
    # 0-based positions, increasing
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class KnapsackInstance:
    profits: tuple[int, ...]
    weights: tuple[int, ...]
    capacity: int
    # provenance, e.g. (("type", "subset_sum"), ("seed", "7")); not part of equality
    meta: tuple[tuple[str, str], ...] = field(default=(), compare=False)

    def __post_init__(self):
        profits = tuple(int(x) for x in self.profits)
        weights = tuple(int(x) for x in self.weights)
        object.__setattr__(self, "profits", profits)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "capacity", int(self.capacity))
        if len(profits) < 1:
            raise ValueError("an instance needs at least one item")
        if len(profits) != len(weights):
            raise ValueError("profits and weights differ in length")
        if min(profits) < 1:
            raise ValueError("non-positive profit")
        if min(weights) < 1:
            raise ValueError("non-positive weight")
        if self.capacity < 1:
            raise ValueError("non-positive capacity")
        if sum(profits) >= 2**62 or sum(weights) >= 2**62:
            raise ValueError("totals exceed 64-bit headroom")

    @property
    def n(self) -> int:
        return len(self.profits)

    @property
    def full(self) -> int:
        """The start state ``[n]``."""
        return (1 << self.n) - 1

    @cached_property
    def profit_array(self) -> np.ndarray:
        return np.asarray(self.profits, dtype=np.int64)

    @cached_property
    def weight_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=np.int64)

    def profit(self, i: int) -> int:
        return self.profits[i - 1]

    def weight(self, i: int) -> int:
        return self.weights[i - 1]

    def meta_dict(self) -> dict[str, str]:
        return dict(self.meta)


def total_profit(inst: KnapsackInstance, mask: int) -> int:
    p = inst.profits
    return sum(p[b] for b in _bits(mask))


def total_weight(inst: KnapsackInstance, mask: int) -> int:
    w = inst.weights
    return sum(w[b] for b in _bits(mask))


def is_solution(inst: KnapsackInstance, mask: int) -> bool:
    if mask == 0:
        raise ValueError("the empty set is not a search state")
    return total_weight(inst, mask) <= inst.capacity


def successors(inst: KnapsackInstance, mask: int) -> list[tuple[int, int]]:
    """Children of ``mask``: one per removable item, by increasing item number.

    Singletons have no children since the empty set is not a state.
    """
    if mask == 0:
        raise ValueError("the empty set is not a search state")
    if mask & (mask - 1) == 0:
        return []
    p = inst.profits
    return [(mask ^ (1 << b), p[b]) for b in _bits(mask)]


class KnapsackSpace:
    """Search space over nonempty item subsets, starting at ``[n]``.

    Weight sums are cached per state since the engine asks for them once per
    generated state and child weights follow from the parent's.
    """

    def __init__(self, inst: KnapsackInstance):
        self.inst = inst
        self.start = inst.full
        self._weight: dict[int, int] = {self.start: sum(inst.weights)}

    def encode(self, mask: int) -> int:
        return mask

    def successors(self, mask: int) -> list[tuple[int, int]]:
        if mask == 0:
            raise ValueError("the empty set is not a search state")
        if mask & (mask - 1) == 0:
            return []
        p = self.inst.profits
        w = self.inst.weights
        cache = self._weight
        wx = cache.get(mask)
        if wx is None:
            wx = cache[mask] = total_weight(self.inst, mask)
        out = []
        rest = mask
        while rest:
            low = rest & -rest
            rest ^= low
            b = low.bit_length() - 1
            child = mask ^ low
            if child not in cache:
                cache[child] = wx - w[b]
            out.append((child, p[b]))
        return out

    def is_solution(self, mask: int) -> bool:
        if mask == 0:
            raise ValueError("the empty set is not a search state")
        wx = self._weight.get(mask)
        if wx is None:
            wx = self._weight[mask] = total_weight(self.inst, mask)
        return wx <= self.inst.capacity


@dataclass(frozen=True)
class GeneratorConfig:
    instance_type: str
    n: int
    R: int = 1000
    seed: int = 0
    t: int | None = None

    def __post_init__(self):
        if self.instance_type not in INSTANCE_TYPES:
            raise ValueError(
                f"unknown instance type {self.instance_type!r}; "
                f"choose from {', '.join(INSTANCE_TYPES)}"
            )
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.R < 500:
            raise ValueError("R must be at least 500")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.t is not None and not 30 <= self.t <= 70:
            raise ValueError("t must lie in [30, 70]")


def capacity_for(t: int, total_weight_: int) -> int:
    return t * total_weight_ // 101


def generate_instance(cfg: GeneratorConfig) -> KnapsackInstance:
    """Draw an instance of ``cfg.instance_type`` from a PCG64 stream seeded by ``cfg.seed``.

    Ranges are inclusive on both ends. Weights are drawn first, then any
    random profits, then ``t`` (unless fixed).
    """
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    n, R = cfg.n, cfg.R

    def draw(lo, hi):
        return rng.integers(lo, hi, size=n, endpoint=True, dtype=np.int64)

    kind = cfg.instance_type
    if kind == "strongly_correlated":
        w = draw(1, R)
        p = w + R // 10
    elif kind == "inverse_strongly_correlated":
        p = draw(1, R)
        w = p + R // 10
    elif kind == "almost_strongly_correlated":
        w = draw(1, R)
        mid = w + R // 10
        p = rng.integers(mid - R // 500, mid + R // 500, endpoint=True, dtype=np.int64)
    elif kind == "subset_sum":
        w = draw(1, R)
        p = w.copy()
    elif kind == "uncorrelated_similar_weight":
        w = draw(100000, 100100)
        p = draw(1, R)
    elif kind == "multiple_strongly_correlated":
        w = draw(1, R)
        p = np.where(w % 6 == 0, w + 3 * R // 10, w + 2 * R // 10)
    else:  # profit_ceiling
        w = draw(1, R)
        p = 3 * (-(-w // 3))

    t = cfg.t if cfg.t is not None else int(rng.integers(30, 70, endpoint=True))
    weights = tuple(int(x) for x in w)
    meta = (
        ("type", kind),
        ("R", str(R)),
        ("seed", str(cfg.seed)),
        ("t", str(t)),
    )
    return KnapsackInstance(
        tuple(int(x) for x in p), weights, capacity_for(t, sum(weights)), meta
    )


def serialize_instance(inst: KnapsackInstance) -> str:
    lines = []
    if inst.meta:
        lines.append("# " + " ".join(f"{k}={v}" for k, v in inst.meta))
    lines.append(f"{inst.n} {inst.capacity}")
    for i, (p, w) in enumerate(zip(inst.profits, inst.weights), start=1):
        lines.append(f"{i} {p} {w}")
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> KnapsackInstance:
    meta: list[tuple[str, str]] = []
    header = None
    rows: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                key, sep, value = tok.partition("=")
                if sep:
                    meta.append((key, value))
            continue
        fields = line.split()
        try:
            nums = [int(x) for x in fields]
        except ValueError:
            raise InstanceFormatError(f"expected integers, got {line!r}", lineno) from None
        if header is None:
            if len(nums) != 2:
                raise InstanceFormatError("header must be 'n C'", lineno)
            n, cap = nums
            if n < 1:
                raise InstanceFormatError("item count must be positive", lineno)
            if cap < 1:
                raise InstanceFormatError("non-positive capacity", lineno)
            header = (n, cap, lineno)
            continue
        if len(nums) != 3:
            raise InstanceFormatError("item line must be 'index profit weight'", lineno)
        idx, p, w = nums
        if idx != len(rows) + 1:
            raise InstanceFormatError(f"expected item index {len(rows) + 1}, got {idx}", lineno)
        if idx > header[0]:
            raise InstanceFormatError(f"more than {header[0]} items", lineno)
        if p < 1:
            raise InstanceFormatError("non-positive profit", lineno)
        if w < 1:
            raise InstanceFormatError("non-positive weight", lineno)
        rows.append((p, w))
    if header is None:
        raise InstanceFormatError("missing header line")
    n, cap, hline = header
    if len(rows) != n:
        raise InstanceFormatError(f"header declares {n} items, found {len(rows)}", hline)
    return KnapsackInstance(
        tuple(p for p, _ in rows), tuple(w for _, w in rows), cap, tuple(meta)
    )


def load_instance(path) -> KnapsackInstance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def save_instance(inst: KnapsackInstance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_instance(inst))
