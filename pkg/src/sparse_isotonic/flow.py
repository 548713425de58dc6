"""Maximum flow / minimum s-t cut (Dinic's algorithm)."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

from .core import ArgumentError


@dataclass
class FlowNetwork:
    n_nodes: int
    source: int
    sink: int
    arcs: list[tuple[int, int, float]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.n_nodes < 2:
            raise ArgumentError("a flow network needs at least two nodes")
        for name in ("source", "sink"):
            v = getattr(self, name)
            if not 0 <= v < self.n_nodes:
                raise ArgumentError(f"{name} {v} out of range")
        if self.source == self.sink:
            raise ArgumentError("source and sink must differ")
        arcs, self.arcs = self.arcs, []
        for u, v, c in arcs:
            self.add_arc(u, v, c)

    def add_arc(self, u: int, v: int, capacity: float) -> None:
        if not (0 <= u < self.n_nodes and 0 <= v < self.n_nodes):
            raise ArgumentError(f"arc ({u}, {v}) references a missing node")
        capacity = float(capacity)
        if math.isnan(capacity) or capacity < 0:
            raise ArgumentError(f"arc ({u}, {v}) has invalid capacity {capacity}")
        self.arcs.append((u, v, capacity))

    def finite_capacity_bound(self) -> float:
        """Stand-in for infinite capacity: strictly above any cut of finite arcs."""
        finite = [c for _, _, c in self.arcs if not math.isinf(c)]
        top = max(finite, default=0.0)
        if top <= 0.0:
            return 1.0
        return max((self.n_nodes + 1) * top, sum(finite) + top)


class MaxFlowResult(NamedTuple):
    value: float
    source_side: frozenset[int]

    def sink_side(self, n_nodes: int) -> frozenset[int]:
        return frozenset(range(n_nodes)) - self.source_side


def max_flow(network: FlowNetwork) -> MaxFlowResult:
    """Max-flow value and the minimal min cut (residual reachability from s).

    Deterministic for a fixed arc order. The returned source side is the
    smallest source side over all minimum cuts.
    """
    n, s, t = network.n_nodes, network.source, network.sink
    big = network.finite_capacity_bound()
    head: list[list[int]] = [[] for _ in range(n)]
    to: list[int] = []
    cap: list[float] = []
    original: list[float] = []
    for u, v, c in network.arcs:
        c = big if math.isinf(c) else c
        head[u].append(len(to))
        to.append(v)
        cap.append(c)
        original.append(c)
        head[v].append(len(to))
        to.append(u)
        cap.append(0.0)
        original.append(0.0)
    top = max((c for _, _, c in network.arcs if not math.isinf(c)), default=0.0)
    eps = 1e-12 * max(top, 1e-300)

    value = 0.0
    while True:
        level = [-1] * n
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            lu = level[u] + 1
            for e in head[u]:
                v = to[e]
                if level[v] < 0 and cap[e] > eps:
                    level[v] = lu
                    queue.append(v)
        if level[t] < 0:
            break
        ptr = [0] * n
        while True:
            pushed = _blocking_path(s, t, head, to, cap, level, ptr, eps)
            if pushed <= 0.0:
                break
            value += pushed

    seen = [False] * n
    seen[s] = True
    stack = [s]
    while stack:
        u = stack.pop()
        for e in head[u]:
            v = to[e]
            if not seen[v] and cap[e] > eps:
                seen[v] = True
                stack.append(v)
    source_side = frozenset(i for i in range(n) if seen[i])

    cut = 0.0
    for e in range(0, len(to), 2):
        u, v = to[e + 1], to[e]
        if seen[u] and not seen[v]:
            cut += original[e]
    if abs(cut - value) > 1e-9 * max(1.0, abs(value)):
        raise RuntimeError(f"max-flow/min-cut mismatch: flow {value!r}, cut {cut!r}")
    return MaxFlowResult(value, source_side)


def _blocking_path(s, t, head, to, cap, level, ptr, eps) -> float:
    """Find one augmenting path in the level graph and push its bottleneck."""
    path: list[int] = []
    u = s
    while True:
        if u == t:
            f = min(cap[e] for e in path)
            for e in path:
                cap[e] -= f
                cap[e ^ 1] += f
            return f
        adj = head[u]
        i = ptr[u]
        lu = level[u] + 1
        while i < len(adj):
            e = adj[i]
            if cap[e] > eps and level[to[e]] == lu:
                break
            i += 1
        ptr[u] = i
        if i < len(adj):
            e = adj[i]
            path.append(e)
            u = to[e]
            continue
        if u == s:
            return 0.0
        level[u] = -1
        e = path.pop()
        u = to[e ^ 1]
        ptr[u] += 1
