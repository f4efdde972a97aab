"""Scheduling commodities onto the quotient graph over discrete time steps.

Each remote interaction (commodity) must receive one time step and one
simple path of entanglement links from its source processor to its target.
Constraints: per-step edge capacities, strict ordering for logically
dependent pairs, and relaxed (same-step allowed) ordering for
quasi-parallel pairs.  Three solvers are provided: a feasibility/optimality
checker, an exact branch-and-bound for small instances minimizing the total
link count at a fixed horizon, and a greedy iterative compiler that packs as
many ready commodities as possible per step, shortest paths first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .circuit import CommoditySet
from .netmodel import QuotientGraph

EXACT_MAX_COMMODITIES = 10
EXACT_MAX_NODES = 25


@dataclass(frozen=True)
class FlowSchedule:
    """Per commodity: one time step in 1..horizon and one simple path."""

    horizon: int
    steps: tuple[int, ...]
    paths: tuple[tuple[int, ...], ...]  # node sequences from source to target

    @property
    def k(self) -> int:
        return len(self.steps)

    def path_edges(self, i: int) -> list[tuple[int, int]]:
        p = self.paths[i]
        return [(min(u, v), max(u, v)) for u, v in zip(p, p[1:])]

    def to_json(self) -> dict:
        return {
            "d": self.horizon,
            "assignments": [
                {"i": i, "tau": self.steps[i], "path": [[u, v] for u, v in zip(p, p[1:])]}
                for i, p in enumerate(self.paths)
            ],
        }

    @staticmethod
    def from_json(doc: dict) -> "FlowSchedule":
        assignments = sorted(doc["assignments"], key=lambda a: a["i"])
        steps = tuple(a["tau"] for a in assignments)
        paths = []
        for a in assignments:
            hops = a["path"]
            nodes = [hops[0][0]] + [v for _u, v in hops] if hops else []
            paths.append(tuple(nodes))
        return FlowSchedule(doc["d"], steps, tuple(paths))


@dataclass(frozen=True)
class ScheduleMetrics:
    e_depth: int
    e_count: int


@dataclass(frozen=True)
class Violation:
    constraint: str
    commodity: int | None = None
    edge: tuple[int, int] | None = None
    step: int | None = None
    message: str = ""


class InstanceTooLarge(ValueError):
    pass


def metrics(sched: FlowSchedule) -> ScheduleMetrics:
    depth = max(sched.steps, default=0)
    count = sum(len(p) - 1 for p in sched.paths if p)
    return ScheduleMetrics(depth, count)


def check_feasible(sched: FlowSchedule, q: QuotientGraph, cs: CommoditySet) -> Violation | None:
    """Verify demand, capacity, and both precedence families; None when sound."""
    if sched.k != cs.k:
        return Violation("demand", message=f"{sched.k} assignments for {cs.k} commodities")
    usage: dict[tuple[tuple[int, int], int], int] = {}
    for i, com in enumerate(cs.commodities):
        tau = sched.steps[i]
        path = sched.paths[i]
        if not 1 <= tau <= sched.horizon:
            return Violation("demand", commodity=i, step=tau, message="step outside horizon")
        if len(path) < 2 or path[0] != com.source or path[-1] != com.target:
            return Violation("c2", commodity=i, message="path must run from source to target")
        if len(set(path)) != len(path):
            return Violation("simple", commodity=i, message="path revisits a node")
        for u, v in zip(path, path[1:]):
            if not q.has_edge(u, v):
                return Violation("c1", commodity=i, edge=(u, v), message="missing edge")
            e = (min(u, v), max(u, v))
            usage[(e, tau)] = usage.get((e, tau), 0) + 1
    for (e, tau), used in sorted(usage.items()):
        if used > q.cap(*e):
            return Violation("c3", edge=e, step=tau, message=f"{used} > capacity {q.cap(*e)}")
    for j, i in sorted(cs.prec):
        if cs.quasi_parallel(i, j):
            if sched.steps[j] > sched.steps[i]:
                return Violation("c6", commodity=i, message=f"needs step >= step of {j}")
        elif sched.steps[j] >= sched.steps[i]:
            return Violation("c5", commodity=i, message=f"needs step > step of {j}")
    return None


def _simple_paths(q: QuotientGraph, s: int, t: int) -> list[tuple[int, ...]]:
    """All simple s-t paths, shortest first then lexicographic."""
    out: list[tuple[int, ...]] = []
    path = [s]
    on_path = {s}

    def dfs(u: int) -> None:
        if u == t:
            out.append(tuple(path))
            return
        for v in q.adjacency[u]:
            if v not in on_path:
                on_path.add(v)
                path.append(v)
                dfs(v)
                path.pop()
                on_path.remove(v)

    dfs(s)
    out.sort(key=lambda p: (len(p), p))
    return out


def shortest_path_len(q: QuotientGraph, s: int, t: int) -> int:
    if s == t:
        return 0
    dist = {s: 0}
    frontier = [s]
    while frontier:
        nxt: list[int] = []
        for u in frontier:
            for v in q.adjacency[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    if v == t:
                        return dist[v]
                    nxt.append(v)
        frontier = nxt
    raise ValueError(f"no path between {s} and {t}")


def _topological_order(cs: CommoditySet) -> list[int]:
    import heapq

    indeg = {i: 0 for i in range(cs.k)}
    succs: dict[int, list[int]] = {i: [] for i in range(cs.k)}
    for j, i in cs.prec:
        indeg[i] += 1
        succs[j].append(i)
    heap = [i for i in range(cs.k) if indeg[i] == 0]
    heapq.heapify(heap)
    order: list[int] = []
    while heap:
        u = heapq.heappop(heap)
        order.append(u)
        for v in succs[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(heap, v)
    if len(order) != cs.k:
        raise ValueError("order relation contains a cycle")
    return order


def solve_mcf_exact(q: QuotientGraph, cs: CommoditySet, d: int) -> FlowSchedule | None:
    """Minimum-total-flow schedule within horizon d, or None when infeasible.

    Branch and bound over (step, path) choices in topological commodity
    order, pruned with shortest-path lower bounds on the remaining flow.
    Intended for small instances; guarded against larger ones.
    """
    if cs.k > EXACT_MAX_COMMODITIES or q.node_count > EXACT_MAX_NODES:
        raise InstanceTooLarge(
            f"exact solver limited to {EXACT_MAX_COMMODITIES} commodities on "
            f"{EXACT_MAX_NODES} nodes (got k={cs.k}, nodes={q.node_count})"
        )
    if cs.k == 0:
        return FlowSchedule(0, (), ())
    if d < 1:
        return None
    order = _topological_order(cs)
    options = [_simple_paths(q, c.source, c.target) for c in cs.commodities]
    lower = [len(opts[0]) - 1 if opts else math.inf for opts in options]
    for i, opts in enumerate(options):
        if not opts:
            return None
    remaining_lb = [0] * (cs.k + 1)
    for pos in range(cs.k - 1, -1, -1):
        remaining_lb[pos] = remaining_lb[pos + 1] + lower[order[pos]]

    best_f = math.inf
    best: tuple[tuple[int, ...], tuple[tuple[int, ...], ...]] | None = None
    steps: dict[int, int] = {}
    paths: dict[int, tuple[int, ...]] = {}
    usage: dict[tuple[tuple[int, int], int], int] = {}

    preds = {i: cs.predecessors(i) for i in range(cs.k)}

    def assign(pos: int, flow: int) -> None:
        nonlocal best_f, best
        if flow + remaining_lb[pos] >= best_f:
            return
        if pos == cs.k:
            best_f = flow
            best = (
                tuple(steps[i] for i in range(cs.k)),
                tuple(paths[i] for i in range(cs.k)),
            )
            return
        i = order[pos]
        earliest = 1
        for j in preds[i]:
            if cs.quasi_parallel(i, j):
                earliest = max(earliest, steps[j])
            else:
                earliest = max(earliest, steps[j] + 1)
        for tau in range(earliest, d + 1):
            for path in options[i]:
                if flow + (len(path) - 1) + remaining_lb[pos + 1] >= best_f:
                    break  # paths are sorted by length
                edges = [(min(u, v), max(u, v)) for u, v in zip(path, path[1:])]
                if any(usage.get((e, tau), 0) + 1 > q.cap(*e) for e in edges):
                    continue
                for e in edges:
                    usage[(e, tau)] = usage.get((e, tau), 0) + 1
                steps[i] = tau
                paths[i] = path
                assign(pos + 1, flow + len(edges))
                for e in edges:
                    usage[(e, tau)] -= 1
        steps.pop(i, None)
        paths.pop(i, None)

    assign(0, 0)
    if best is None:
        return None
    return FlowSchedule(d, best[0], best[1])


SubSolver = Callable[[QuotientGraph, CommoditySet, int], FlowSchedule | None]


def quickest_flow(
    q: QuotientGraph,
    cs: CommoditySet,
    subsolver: SubSolver = solve_mcf_exact,
    call_log: list[int] | None = None,
) -> FlowSchedule:
    """Binary search for the minimum horizon with a feasible schedule.

    The horizon is at most k (all commodities in sequence), so the search
    runs ceil(log2 k) + O(1) calls of the pluggable sub-solver.  Feasibility
    is monotone in the horizon (append an idle step), which makes the
    bisection sound.
    """
    if cs.k == 0:
        return FlowSchedule(0, (), ())
    lo, hi = 1, cs.k
    best: FlowSchedule | None = None
    while lo <= hi:
        mid = (lo + hi) // 2
        if call_log is not None:
            call_log.append(mid)
        sched = subsolver(q, cs, mid)
        if sched is not None:
            best = sched
            hi = mid - 1
        else:
            lo = mid + 1
    if best is None:
        raise ValueError("no feasible schedule up to horizon k; instance is malformed")
    return FlowSchedule(max(best.steps, default=0), best.steps, best.paths)


def _bfs_shortest_residual(
    q: QuotientGraph, s: int, t: int, residual: dict[tuple[int, int], int]
) -> tuple[int, ...] | None:
    """Lexicographically smallest shortest path using edges with residual capacity."""
    if s == t:
        return (s,)
    parent: dict[int, int] = {s: -1}
    frontier = [s]
    while frontier:
        nxt = []
        for u in frontier:
            for v in q.adjacency[u]:
                e = (min(u, v), max(u, v))
                if residual.get(e, 0) < 1 or v in parent:
                    continue
                parent[v] = u
                if v == t:
                    path = [t]
                    while path[-1] != s:
                        path.append(parent[path[-1]])
                    return tuple(reversed(path))
                nxt.append(v)
        frontier = nxt
    return None


def iterative_greedy(q: QuotientGraph, cs: CommoditySet) -> FlowSchedule:
    """One step at a time, route as many ready commodities as capacity allows.

    Ready commodities are sorted by (shortest-path length, index) and routed
    along their shortest path in the step's residual graph; commodities whose
    quasi-parallel predecessors landed in the current batch become ready
    within the same step.  Always terminates: a fresh step offers full
    capacities and a connected graph, so some ready commodity routes.
    """
    steps: dict[int, int] = {}
    paths: dict[int, tuple[int, ...]] = {}
    preds = {i: cs.predecessors(i) for i in range(cs.k)}
    sp_len = {
        i: shortest_path_len(q, c.source, c.target) for i, c in enumerate(cs.commodities)
    }
    remaining = set(range(cs.k))
    tau = 0
    while remaining:
        tau += 1
        residual = dict(q.capacity)

        def ready(i: int) -> bool:
            for j in preds[i]:
                done = j in steps
                if cs.quasi_parallel(i, j):
                    if not (done and steps[j] <= tau):
                        return False
                elif not (done and steps[j] < tau):
                    return False
            return True

        progress = True
        while progress:
            progress = False
            batch = sorted((i for i in remaining if ready(i)), key=lambda i: (sp_len[i], i))
            for i in batch:
                c = cs.commodities[i]
                path = _bfs_shortest_residual(q, c.source, c.target, residual)
                if path is None:
                    continue
                for u, v in zip(path, path[1:]):
                    residual[(min(u, v), max(u, v))] -= 1
                steps[i] = tau
                paths[i] = path
                remaining.discard(i)
                progress = True
    horizon = max(steps.values(), default=0)
    return FlowSchedule(
        horizon,
        tuple(steps[i] for i in range(cs.k)),
        tuple(paths[i] for i in range(cs.k)),
    )


def compile_circuit_flow(
    circuit,
    placement,
    q: QuotientGraph,
    mode: str = "greedy",
):
    """Schedule a placed circuit and expand it into an extended circuit.

    mode "greedy" runs the iterative compiler; "exact" runs the quickest-flow
    binary search over the exact sub-solver (small instances only).  Returns
    (extended circuit, schedule, commodity set).
    """
    from .circuit import extract_commodities
    from .telegate import CircuitExpander

    cs = extract_commodities(circuit, placement)
    if mode == "greedy":
        sched = iterative_greedy(q, cs)
    elif mode == "exact":
        sched = quickest_flow(q, cs)
    else:
        raise ValueError(f"unknown flow mode {mode!r}")
    bad = check_feasible(sched, q, cs)
    if bad is not None:
        raise AssertionError(f"scheduler produced an infeasible schedule: {bad}")

    expander = CircuitExpander(circuit, placement, q)
    pointer = 0
    for li, layer in enumerate(circuit.layers):
        layer_comms: list[tuple[int, object]] = []
        while pointer < cs.k and cs.commodities[pointer].layer == li:
            layer_comms.append((pointer, cs.commodities[pointer]))
            pointer += 1
        by_gate: dict = {}
        for idx, com in layer_comms:
            by_gate.setdefault(com.gate, []).append((idx, com))
        for g in layer:
            if g not in by_gate:
                expander.emit_local(g)
                continue
            routes = {
                com.target: set(sched.path_edges(idx)) for idx, com in by_gate[g]
            }
            expander.emit_remote(g, routes)
    return expander.finish(), sched, cs
