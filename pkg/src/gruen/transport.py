"""Exact solver for balanced transportation problems.

Implements the transportation simplex (northwest-corner start, spanning-tree
duals, most-negative-reduced-cost pivoting). Problems here are sentence
scale (supports of a few dozen points), where the exact method is both fast
and free of approximation error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class TransportError(ValueError):
    """Malformed or unsolvable transportation problem."""


@dataclass(frozen=True)
class TransportResult:
    cost: float
    plan: np.ndarray  # shape (len(supply), len(demand)), rows sum to supply


def solve_transport(
    cost: np.ndarray,
    supply: np.ndarray,
    demand: np.ndarray,
    tol: float = 1e-12,
) -> TransportResult:
    """Minimize sum(plan * cost) subject to the supply/demand marginals.

    supply and demand must be positive and have (numerically) equal totals;
    the demand side is rescaled to balance exactly.
    """
    cost = np.asarray(cost, dtype=float)
    supply = np.asarray(supply, dtype=float).copy()
    demand = np.asarray(demand, dtype=float).copy()
    m, n = cost.shape
    if supply.shape != (m,) or demand.shape != (n,):
        raise TransportError("marginal shapes do not match the cost matrix")
    if np.any(supply <= 0) or np.any(demand <= 0):
        raise TransportError("marginals must be strictly positive")
    if not np.all(np.isfinite(cost)):
        raise TransportError("cost matrix must be finite")
    total_supply, total_demand = supply.sum(), demand.sum()
    if abs(total_supply - total_demand) > 1e-6 * max(total_supply, total_demand):
        raise TransportError("unbalanced problem: supply and demand totals differ")
    demand *= total_supply / total_demand

    flows, basis = _northwest_corner(supply, demand)
    adjacency = _tree_adjacency(basis, m)

    max_pivots = 20 * m * n + 200
    for _ in range(max_pivots):
        u, v = _tree_duals(cost, adjacency, m, n)
        reduced = cost - u[:, None] - v[None, :]
        for i, j in basis:
            reduced[i, j] = 0.0
        enter = np.unravel_index(np.argmin(reduced), reduced.shape)
        if reduced[enter] >= -tol:
            break
        _pivot(flows, basis, adjacency, enter, m)
    else:
        raise TransportError("pivot limit exceeded; problem appears to cycle")

    plan = np.zeros((m, n))
    for (i, j), q in flows.items():
        plan[i, j] = max(q, 0.0)
    return TransportResult(cost=float((plan * cost).sum()), plan=plan)


def _northwest_corner(supply, demand):
    """Initial basic feasible solution with exactly m + n - 1 basic cells."""
    m, n = len(supply), len(demand)
    a, b = supply.copy(), demand.copy()
    flows: dict[tuple[int, int], float] = {}
    basis: list[tuple[int, int]] = []
    i = j = 0
    for _ in range(m + n - 1):
        q = min(a[i], b[j])
        flows[(i, j)] = q
        basis.append((i, j))
        a[i] -= q
        b[j] -= q
        if i == m - 1:
            j += 1
        elif j == n - 1:
            i += 1
        elif a[i] <= b[j]:
            i += 1
        else:
            j += 1
    return flows, basis


def _tree_adjacency(basis, m):
    # Nodes: rows are 0..m-1, columns are m..m+n-1.
    adjacency: dict[int, list[int]] = {}
    for i, j in basis:
        adjacency.setdefault(i, []).append(m + j)
        adjacency.setdefault(m + j, []).append(i)
    return adjacency

def _tree_duals(cost, adjacency, m, n):
    """Solve u_i + v_j = c_ij over the spanning tree, anchored at u_0 = 0."""
    u = np.full(m, np.nan)
    v = np.full(n, np.nan)
    u[0] = 0.0
    stack = [0]
    while stack:
        node = stack.pop()
        for peer in adjacency.get(node, ()):
            if node < m:  # row -> column edge
                if np.isnan(v[peer - m]):
                    v[peer - m] = cost[node, peer - m] - u[node]
                    stack.append(peer)
            else:  # column -> row edge
                if np.isnan(u[peer]):
                    u[peer] = cost[peer, node - m] - v[node - m]
                    stack.append(peer)
    return u, v


def _tree_path(adjacency, start, goal):
    """Node path between two tree nodes (unique since the basis is a tree)."""
    parent = {start: start}
    stack = [start]
    while stack:
        node = stack.pop()
        if node == goal:
            break
        for peer in adjacency.get(node, ()):
            if peer not in parent:
                parent[peer] = node
                stack.append(peer)
    path = [goal]
    while path[-1] != start:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def _pivot(flows, basis, adjacency, enter, m):
    """Push flow around the unique cycle closed by the entering cell."""
    ei, ej = enter
    # Walk the existing tree from the entering column back to its row; the
    # cycle alternates +/- starting with '+' on the entering cell.
    nodes = _tree_path(adjacency, m + ej, ei)
    cycle = [enter]
    for a, b in zip(nodes, nodes[1:]):
        i, j = (a, b - m) if a < m else (b, a - m)
        cycle.append((i, j))

    minus_cells = cycle[1::2]
    theta = min(flows[c] for c in minus_cells)
    leave = min(
        (c for c in minus_cells if flows[c] <= theta),
        key=minus_cells.index,
    )

    for k, cell in enumerate(cycle):
        if k == 0:
            continue
        flows[cell] += theta if k % 2 == 0 else -theta
    flows[leave] = 0.0

    del flows[leave]
    flows[enter] = theta
    basis.remove(leave)
    basis.append(enter)
    li, lj = leave
    adjacency[li].remove(m + lj)
    adjacency[m + lj].remove(li)
    adjacency.setdefault(ei, []).append(m + ej)
    adjacency.setdefault(m + ej, []).append(ei)
