"""Independent brute-force oracles used to pin expected values in tests.

These deliberately avoid the library's solver code paths: plain recursive
enumeration for schedules, subset enumeration for Steiner trees, and
networkx max-flow for the directed-gadget checks.
"""

from __future__ import annotations

import itertools
import random

import networkx as nx

from distqc.circuit import Commodity, CommoditySet, cz
from distqc.netmodel import QuotientGraph


def all_simple_paths(q: QuotientGraph, s: int, t: int) -> list[tuple[int, ...]]:
    g = q.to_nx()
    return [tuple(p) for p in nx.all_simple_paths(g, s, t)]


def enumerate_schedules(q: QuotientGraph, cs: CommoditySet, d: int):
    """Yield every feasible (steps, paths) assignment within horizon d."""
    options = []
    for c in cs.commodities:
        paths = all_simple_paths(q, c.source, c.target)
        options.append([(tau, p) for tau in range(1, d + 1) for p in paths])

    k = cs.k
    preds = {i: [j for (j, i2) in cs.prec if i2 == i] for i in range(k)}

    def feasible_prefix(chosen):
        usage: dict = {}
        for i, (tau, path) in enumerate(chosen):
            for u, v in zip(path, path[1:]):
                e = (min(u, v), max(u, v), tau)
                usage[e] = usage.get(e, 0) + 1
                if usage[e] > q.cap(e[0], e[1]):
                    return False
        for i, (tau, _p) in enumerate(chosen):
            for j in preds[i]:
                if j < len(chosen):
                    tj = chosen[j][0]
                    if cs.quasi_parallel(i, j):
                        if tj > tau:
                            return False
                    elif tj >= tau:
                        return False
        return True

    def rec(pos, chosen):
        if not feasible_prefix(chosen):
            return
        if pos == k:
            yield tuple(chosen)
            return
        for opt in options[pos]:
            chosen.append(opt)
            yield from rec(pos + 1, chosen)
            chosen.pop()

    yield from rec(0, [])


def brute_min_flow(q: QuotientGraph, cs: CommoditySet, d: int) -> int | None:
    """Minimum total path length over all feasible schedules at horizon d."""
    best = None
    for sched in enumerate_schedules(q, cs, d):
        f = sum(len(p) - 1 for _tau, p in sched)
        if best is None or f < best:
            best = f
    return best


def brute_quickest(q: QuotientGraph, cs: CommoditySet) -> tuple[int, int] | None:
    """Smallest feasible horizon and the minimum flow at that horizon."""
    for d in range(1, cs.k + 1):
        f = brute_min_flow(q, cs, d)
        if f is not None:
            return d, f
    return None


def brute_steiner_weight(q: QuotientGraph, terminals: set[int]) -> int:
    """Minimum Steiner weight by enumerating Steiner-point subsets."""
    g = q.to_nx()
    others = [v for v in range(q.node_count) if v not in terminals]
    best = None
    for r in range(len(others) + 1):
        for extra in itertools.combinations(others, r):
            nodes = set(terminals) | set(extra)
            sub = g.subgraph(nodes)
            if not nx.is_connected(sub):
                continue
            w = len(nodes) - 1
            if best is None or w < best:
                best = w
    if best is None:
        raise ValueError("terminals cannot be connected")
    return best


def undirected_max_flow(q: QuotientGraph, s: int, t: int) -> int:
    """Max flow in the undirected graph via antiparallel arcs."""
    g = nx.DiGraph()
    g.add_nodes_from(range(q.node_count))
    for u, v, c in q.edges:
        g.add_edge(u, v, capacity=c)
        g.add_edge(v, u, capacity=c)
    return int(nx.maximum_flow_value(g, s, t))


def gadget_max_flow(dfg, s: int, t: int) -> int:
    """Max flow on the directed gadget expansion (unbounded arcs made huge)."""
    g = nx.DiGraph()
    g.add_nodes_from(range(dfg.nodes))
    big = 10**9
    for u, v, c in dfg.arcs:
        g.add_edge(u, v, capacity=big if c is None else c)
    return int(nx.maximum_flow_value(g, s, t))


def random_connected_graph(rng: random.Random, n: int, max_cap: int = 2) -> QuotientGraph:
    """Random spanning tree plus extra edges, capacities in 1..max_cap."""
    edges: set[tuple[int, int]] = set()
    nodes = list(range(n))
    rng.shuffle(nodes)
    for i in range(1, n):
        u = nodes[rng.randrange(i)]
        v = nodes[i]
        edges.add((min(u, v), max(u, v)))
    extra = rng.randrange(0, n)
    for _ in range(extra):
        u, v = rng.sample(range(n), 2)
        edges.add((min(u, v), max(u, v)))
    return QuotientGraph(
        n, tuple(sorted((u, v, rng.randint(1, max_cap)) for u, v in edges))
    )


def random_commodity_set(
    rng: random.Random, q: QuotientGraph, k: int, qpar_prob: float = 0.3
) -> CommoditySet:
    """Random commodities with a random order DAG (edges only j -> i, j < i)."""
    comms = []
    for i in range(k):
        s, t = rng.sample(range(q.node_count), 2)
        comms.append(Commodity(s, t, i, "cz", 0, (1,), cz(0, 1)))
    prec = set()
    qpar = set()
    for i in range(k):
        for j in range(i):
            if rng.random() < 0.4:
                prec.add((j, i))
                if rng.random() < qpar_prob:
                    qpar.add(frozenset({j, i}))
    return CommoditySet(tuple(comms), frozenset(prec), frozenset(qpar))
