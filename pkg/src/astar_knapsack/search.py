"""Best-first (A*) and breadth-first search with expansion accounting."""

from __future__ import annotations

import heapq
import math
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Protocol

State = Hashable


class SearchSpace(Protocol):
    start: State

    def successors(self, state: State) -> list[tuple[State, Any]]: ...

    def is_solution(self, state: State) -> bool: ...


class ContractError(RuntimeError):
    """The search space or heuristic broke its contract."""


@dataclass
class SearchResult:
    found: bool
    goal_state: State | None = None
    solution_cost: Any = None
    expansions: int = 0
    reopens: int = 0
    expanded_states: set | None = None
    path: list | None = None
    timed_out: bool = False
    # (state, g, f) for every live dequeue, when requested
    trace: list | None = None


def _encoder(space) -> Callable[[State], Any]:
    enc = getattr(space, "encode", None)
    return enc if enc is not None else (lambda s: s)


def _path(parent: dict, goal: State) -> list:
    out = [goal]
    while parent[out[-1]] is not None:
        out.append(parent[out[-1]])
    out.reverse()
    return out


def _check_h(value, state):
    if value != value or value < 0:
        raise ContractError(f"heuristic value {value!r} at {state!r} is not a non-negative number")
    return value


def astar(
    space: SearchSpace,
    h: Callable[[State], Any],
    record_expanded: bool = False,
    *,
    record_trace: bool = False,
    time_limit: float | None = None,
) -> SearchResult:
    """A* search: pop a minimum-f node, goal-test it, otherwise expand it.

    Among equal f the entry with larger g is popped first, then the one with
    the smaller ``space.encode(state)`` (the state itself when the space has
    no ``encode``). Entries with infinite f sort after every finite one.
    A regenerated state whose g improves is redirected and, if closed,
    reopened. Superseded heap entries are skipped without counting.
    """
    encode = _encoder(space)
    start = space.start
    h0 = _check_h(h(start), start)
    g = {start: 0}
    hval = {start: h0}
    parent: dict = {start: None}
    closed: set = set()
    heap = [(0 + h0, 0, encode(start), start)]
    expansions = reopens = 0
    expanded = set() if record_expanded else None
    trace = [] if record_trace else None
    deadline = None if time_limit is None else time.perf_counter() + time_limit

    while heap:
        f, neg_g, _, x = heapq.heappop(heap)
        gx = g[x]
        if -neg_g != gx or x in closed:
            continue
        if trace is not None:
            trace.append((x, gx, f))
        if space.is_solution(x):
            if hval[x] != 0:
                raise ContractError(f"heuristic is {hval[x]!r} at solution {x!r}")
            return SearchResult(
                True, x, gx, expansions, reopens, expanded, _path(parent, x), False, trace
            )
        if deadline is not None and expansions % 256 == 0 and time.perf_counter() > deadline:
            return SearchResult(False, None, None, expansions, reopens, expanded, None, True, trace)
        closed.add(x)
        expansions += 1
        if expanded is not None:
            expanded.add(x)
        for y, c in space.successors(x):
            if not c > 0:
                raise ContractError(f"edge {x!r} -> {y!r} has non-positive cost {c!r}")
            gy = gx + c
            old = g.get(y)
            if old is None:
                hy = hval[y] = _check_h(h(y), y)
                g[y] = gy
                parent[y] = x
                heapq.heappush(heap, (gy + hy, -gy, encode(y), y))
            elif gy < old:
                g[y] = gy
                parent[y] = x
                if y in closed:
                    closed.remove(y)
                    reopens += 1
                heapq.heappush(heap, (gy + hval[y], -gy, encode(y), y))

    return SearchResult(False, None, None, expansions, reopens, expanded, None, False, trace)


def breadth_first(
    space: SearchSpace, record_expanded: bool = False, *, time_limit: float | None = None
) -> SearchResult:
    """FIFO search with duplicate detection and goal test at dequeue.

    Returns the first solution dequeued, which need not be cheapest.
    """
    start = space.start
    g = {start: 0}
    parent: dict = {start: None}
    queue = deque([start])
    expansions = 0
    expanded = set() if record_expanded else None
    deadline = None if time_limit is None else time.perf_counter() + time_limit
    while queue:
        x = queue.popleft()
        if space.is_solution(x):
            return SearchResult(True, x, g[x], expansions, 0, expanded, _path(parent, x))
        if deadline is not None and expansions % 256 == 0 and time.perf_counter() > deadline:
            return SearchResult(False, None, None, expansions, 0, expanded, None, True)
        expansions += 1
        if expanded is not None:
            expanded.add(x)
        for y, c in space.successors(x):
            if not c > 0:
                raise ContractError(f"edge {x!r} -> {y!r} has non-positive cost {c!r}")
            if y not in g:
                g[y] = g[x] + c
                parent[y] = x
                queue.append(y)
    return SearchResult(False, None, None, expansions, 0, expanded)


INF = math.inf
