"""Optimal assignment of agents to a fixed set of alternatives.

For Chamberlin-Courant every agent simply takes its best-ranked member of the
set. For Monroe the problem is a capacitated transportation problem: agents
send one unit each, alternatives absorb at most ``ceil(n/K)`` units (and at
least ``floor(n/K)`` once the committee is complete).

Three interchangeable solvers are provided:

``flow``
    successive shortest augmenting paths on the explicit network, pure Python.
    Slow but self-contained; used as a reference.
``lsa``
    every alternative is expanded into one column per unit of capacity and the
    result is solved as a rectangular assignment problem.
``lp``
    agents with identical utility rows are merged and the (much smaller)
    transportation LP is solved with HiGHS dual simplex. The constraint matrix
    is totally unimodular so the vertex returned is integral.

``auto`` picks ``lsa`` for moderate sizes and ``lp`` beyond that.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np
from scipy import sparse
from scipy.optimize import linear_sum_assignment, linprog

from .core import (
    Assignment,
    CapacityFunction,
    PreferenceProfile,
    Rule,
    ScoringFunction,
    _check_psf,
)

LSA_MAX_SIZE = 3000
BRUTE_MAX_AGENTS = 10
BRUTE_MAX_ALTERNATIVES = 4


class SizeLimitError(ValueError):
    """Raised when an exhaustive routine is asked for an instance it refuses to enumerate."""


def _as_alt_set(profile: PreferenceProfile, S: Iterable[int]) -> list:
    S = sorted({int(a) for a in S})
    for a in S:
        if not 1 <= a <= profile.m:
            raise ValueError(f"alternative {a} out of range 1..{profile.m}")
    return S


# ---------------------------------------------------------------------------
# Chamberlin-Courant


def optimal_cc_assignment(
    profile: PreferenceProfile, psf: ScoringFunction, S: Iterable[int], K: Optional[int] = None
) -> Assignment:
    """Assign every agent its best-ranked member of ``S``."""
    _check_psf(profile, psf)
    S = _as_alt_set(profile, S)
    if not S:
        raise ValueError("CC assignment needs a non-empty alternative set")
    cols = np.asarray(S) - 1
    best = np.argmin(profile.positions[:, cols], axis=1)
    return Assignment(cols[best] + 1, Rule.CC, K if K is not None else len(S))


# ---------------------------------------------------------------------------
# flow network


@dataclass
class FlowNetwork:
    """Directed network with integral capacities and costs.

    Node 0 is the source and node ``num_nodes - 1`` the sink. ``arcs`` holds
    ``(tail, head, capacity, cost)`` tuples; the order is significant for
    tie-breaking.
    """

    num_nodes: int
    arcs: list = field(default_factory=list)
    agent_nodes: dict = field(default_factory=dict)
    alt_nodes: dict = field(default_factory=dict)

    @property
    def source(self) -> int:
        return 0

    @property
    def sink(self) -> int:
        return self.num_nodes - 1

    def add_arc(self, tail: int, head: int, capacity: int, cost: int) -> int:
        if capacity < 0:
            raise ValueError("arc capacity must be nonnegative")
        self.arcs.append((tail, head, int(capacity), int(cost)))
        return len(self.arcs) - 1


@dataclass
class FlowResult:
    flow: list
    value: int
    cost: int


def min_cost_max_flow(network: FlowNetwork) -> FlowResult:
    """Integral maximum flow of minimum cost.

    Successive shortest paths with Dijkstra on reduced costs. Arc costs must be
    nonnegative (which makes the zero potential feasible at the start). Ties
    between equal-length paths resolve to the smallest node ids because heap
    entries compare ``(distance, node)`` and predecessors only change on a
    strict improvement.
    """
    N = network.num_nodes
    s, t = network.source, network.sink
    head, cap, cost = [], [], []
    adj = [[] for _ in range(N)]
    for u, v, c, w in network.arcs:
        if w < 0:
            raise ValueError("negative arc costs are not supported")
        adj[u].append(len(head))
        head.append(v), cap.append(c), cost.append(w)
        adj[v].append(len(head))
        head.append(u), cap.append(0), cost.append(-w)
    pot = [0] * N
    value = total = 0
    inf = float("inf")
    while True:
        dist = [inf] * N
        prev = [-1] * N
        dist[s] = 0
        heap = [(0, s)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            pu = pot[u]
            for e in adj[u]:
                if cap[e] <= 0:
                    continue
                v = head[e]
                nd = d + cost[e] + pu - pot[v]
                if nd < dist[v]:
                    dist[v] = nd
                    prev[v] = e
                    heapq.heappush(heap, (nd, v))
        if dist[t] == inf:
            break
        for v in range(N):
            if dist[v] < inf:
                pot[v] += dist[v]
        push = inf
        v = t
        while v != s:
            e = prev[v]
            push = min(push, cap[e])
            v = head[e ^ 1]
        v = t
        while v != s:
            e = prev[v]
            cap[e] -= push
            cap[e ^ 1] += push
            total += push * cost[e]
            v = head[e ^ 1]
        value += push
    flow = [cap[2 * k + 1] for k in range(len(network.arcs))]
    return FlowResult(flow=flow, value=value, cost=total)


def build_assignment_network(
    profile: PreferenceProfile, psf: ScoringFunction, capacity: CapacityFunction
) -> FlowNetwork:
    """Network whose min-cost max-flow is the optimal capacitated assignment.

    Agent-to-alternative arcs cost ``alpha[1] - alpha[pos]`` so that minimizing
    cost maximizes satisfaction. With ``floor_required`` each alternative sends
    exactly its floor straight to the sink and any excess through a shared
    overflow node whose outflow is ``n - sum(floors)``.
    """
    _check_psf(profile, psf)
    n = profile.n
    alts = sorted(a for a, c in capacity.cap.items() if c > 0)
    util = profile.utilities(psf)
    top = psf.top
    floors = capacity.floor_required
    num = 1 + n + len(alts) + (1 if floors else 0) + 1
    net = FlowNetwork(num)
    net.agent_nodes = {i + 1: 1 + i for i in range(n)}
    net.alt_nodes = {a: 1 + n + j for j, a in enumerate(alts)}
    overflow = 1 + n + len(alts) if floors else None
    for i in range(n):
        net.add_arc(0, 1 + i, 1, 0)
    for i in range(n):
        for a in alts:
            net.add_arc(1 + i, net.alt_nodes[a], 1, top - int(util[i, a - 1]))
    for a in alts:
        node = net.alt_nodes[a]
        if floors:
            net.add_arc(node, net.sink, capacity.floor, 0)
            net.add_arc(node, overflow, capacity[a] - capacity.floor, 0)
        else:
            net.add_arc(node, net.sink, capacity[a], 0)
    if floors:
        net.add_arc(overflow, net.sink, n - capacity.floor * len(capacity.cap), 0)
    return net


def _solve_flow(profile, psf, capacity) -> np.ndarray:
    net = build_assignment_network(profile, psf, capacity)
    res = min_cost_max_flow(net)
    rep = np.zeros(profile.n, dtype=np.int64)
    node_alt = {v: a for a, v in net.alt_nodes.items()}
    for k, (u, v, _, _) in enumerate(net.arcs):
        if res.flow[k] and 1 <= u <= profile.n and v in node_alt:
            rep[u - 1] = node_alt[v]
    return rep


def _solve_lsa(profile, psf, capacity) -> np.ndarray:
    alts = sorted(a for a, c in capacity.cap.items() if c > 0)
    n = profile.n
    if not alts:
        return np.zeros(n, dtype=np.int64)
    cost = psf.top - profile.utilities(psf)[:, np.asarray(alts) - 1].astype(float)
    caps = np.array([capacity[a] for a in alts])
    slot_alt = np.repeat(np.arange(len(alts)), caps)
    matrix = cost[:, slot_alt]
    if capacity.floor_required:
        # dummy agents soak up the optional slots that real agents leave empty
        optional = np.concatenate([np.arange(c) >= capacity.floor for c in caps])
        dummies = len(slot_alt) - n
        if dummies < 0 or dummies > optional.sum():
            raise ValueError("load bounds cannot be met by this many agents")
        if dummies:
            block = np.where(optional, 0.0, np.inf)
            matrix = np.vstack([matrix, np.broadcast_to(block, (dummies, len(slot_alt)))])
    rows, cols = linear_sum_assignment(matrix)
    rep = np.zeros(n, dtype=np.int64)
    real = rows < n
    rep[rows[real]] = np.asarray(alts)[slot_alt[cols[real]]]
    return rep


def _solve_lp(profile, psf, capacity) -> np.ndarray:
    alts = sorted(a for a, c in capacity.cap.items() if c > 0)
    n = profile.n
    if not alts:
        return np.zeros(n, dtype=np.int64)
    k = len(alts)
    util = profile.utilities(psf)[:, np.asarray(alts) - 1]
    types, inverse, counts = np.unique(util, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.reshape(-1)
    T = len(types)
    c = (psf.top - types).ravel().astype(float)
    var = np.arange(T * k)
    by_type = sparse.csr_matrix((np.ones(T * k), (np.repeat(np.arange(T), k), var)), shape=(T, T * k))
    by_alt = sparse.csr_matrix((np.ones(T * k), (np.tile(np.arange(k), T), var)), shape=(k, T * k))
    caps = np.array([capacity[a] for a in alts], dtype=float)
    if capacity.floor_required:
        A_ub = sparse.vstack([by_alt, -by_alt])
        b_ub = np.concatenate([caps, -np.full(k, float(capacity.floor))])
        A_eq, b_eq = by_type, counts.astype(float)
    else:
        flow = min(n, int(caps.sum()))
        A_ub = sparse.vstack([by_type, by_alt])
        b_ub = np.concatenate([counts.astype(float), caps])
        A_eq, b_eq = sparse.csr_matrix(np.ones((1, T * k))), np.array([float(flow)])
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs-ds")
    if res.status != 0:
        raise RuntimeError(f"transportation LP failed: {res.message}")
    x = np.rint(res.x).astype(np.int64).reshape(T, k)
    if np.abs(res.x - x.ravel()).max() > 1e-6:
        raise RuntimeError("transportation LP returned a fractional vertex")
    rep = np.zeros(n, dtype=np.int64)
    order = np.argsort(inverse, kind="stable")
    starts = np.concatenate([[0], np.cumsum(counts)])
    for t in range(T):
        agents = order[starts[t]:starts[t + 1]]
        fill = np.repeat(np.asarray(alts), x[t])
        rep[agents[: len(fill)]] = fill
    return rep


_BACKENDS = {"flow": _solve_flow, "lsa": _solve_lsa, "lp": _solve_lp}


def optimal_capacity_assignment(
    profile: PreferenceProfile,
    psf: ScoringFunction,
    capacity: CapacityFunction,
    K: int,
    backend: str = "auto",
) -> Assignment:
    """Maximum-satisfaction assignment respecting ``capacity``.

    The number of assigned agents is maximized first (``min(n, total
    capacity)``), then satisfaction. Because unassigned agents score 0 this
    also maximizes satisfaction outright.
    """
    _check_psf(profile, psf)
    _as_alt_set(profile, capacity.cap)
    if capacity.floor_required:
        lo = capacity.floor * len(capacity.cap)
        if not lo <= profile.n <= capacity.total():
            raise ValueError("load bounds cannot be met by this many agents")
    if backend == "auto":
        size = max(profile.n, capacity.total())
        backend = "lsa" if size <= LSA_MAX_SIZE else "lp"
    try:
        solve = _BACKENDS[backend]
    except KeyError:
        raise ValueError(f"unknown assignment backend {backend!r}") from None
    return Assignment(solve(profile, psf, capacity), Rule.MONROE, K)


def optimal_monroe_assignment(
    profile: PreferenceProfile,
    psf: ScoringFunction,
    S: Iterable[int],
    K: int,
    backend: str = "auto",
) -> Assignment:
    """Optimal Monroe assignment into ``S``.

    With ``|S| = K`` the result is a complete Monroe assignment. With fewer
    members each serves at most ``ceil(n/K)`` agents and the rest stay null.
    """
    S = _as_alt_set(profile, S)
    if not 1 <= K <= profile.m:
        raise ValueError(f"K={K} out of range 1..{profile.m}")
    if len(S) > K:
        raise ValueError(f"|S|={len(S)} exceeds K={K}")
    if profile.n < K:
        raise ValueError(f"Monroe needs at least K={K} agents, got {profile.n}")
    return optimal_capacity_assignment(
        profile, psf, CapacityFunction.monroe(S, profile.n, K), K, backend
    )


# ---------------------------------------------------------------------------
# brute force oracle


def brute_force_capacity_assignment(
    profile: PreferenceProfile, psf: ScoringFunction, capacity: CapacityFunction, K: int
) -> Assignment:
    """Exhaustive search over every assignment that respects ``capacity``."""
    alts = sorted(a for a, c in capacity.cap.items() if c > 0)
    n = profile.n
    if n > BRUTE_MAX_AGENTS or len(alts) > BRUTE_MAX_ALTERNATIVES:
        raise SizeLimitError(
            f"brute force limited to n<={BRUTE_MAX_AGENTS}, |S|<={BRUTE_MAX_ALTERNATIVES}"
        )
    util = profile.utilities(psf).tolist()
    caps = [capacity[a] for a in alts]
    floors = capacity.floor_required
    options = list(range(len(alts))) + ([] if floors else [None])
    loads = [0] * len(alts)
    current = [0] * n
    best = [-1, None]

    def rec(i, sat):
        if i == n:
            if floors and any(load < capacity.floor for load in loads):
                return
            if sat > best[0]:
                best[0], best[1] = sat, list(current)
            return
        for j in options:
            if j is None:
                current[i] = 0
                rec(i + 1, sat)
            elif loads[j] < caps[j]:
                loads[j] += 1
                current[i] = alts[j]
                rec(i + 1, sat + util[i][alts[j] - 1])
                loads[j] -= 1

    rec(0, 0)
    if best[1] is None:
        raise ValueError("no assignment satisfies the load bounds")
    return Assignment(np.array(best[1], dtype=np.int64), Rule.MONROE, K)


def brute_force_assignment(
    profile: PreferenceProfile, psf: ScoringFunction, S: Iterable[int], K: int
) -> Assignment:
    """Exhaustive counterpart of :func:`optimal_monroe_assignment` for tiny inputs."""
    S = _as_alt_set(profile, S)
    if len(S) > K:
        raise ValueError(f"|S|={len(S)} exceeds K={K}")
    return brute_force_capacity_assignment(
        profile, psf, CapacityFunction.monroe(S, profile.n, K), K
    )
