"""Maximum-edge search for pattern-free multipartite graphs.

Branch and bound over the cross pairs of a k-partite host in canonical
order (part pair, then local indices), include-branch first so dense
incumbents are found early.  The include branch is feasible iff adding the
pair creates no forbidden copy; since the current graph is pattern-free,
any new copy must contain both endpoints, so feasibility is a containment
test seeded with the new edge (see ``contains_uniform_pattern``).

For K_2(t) (the multipartite Zarankiewicz case) three counting bounds
prune the tree: per part-pair block the bipartite restriction obeys the
Kovari--Sos--Turan convexity bound, the whole vertex set obeys the
all-graph star count sum_v C(d_v, t) <= (t-1) C(N, t), and each part's cut
obeys the bipartite bound against the rest (applied recursively).

Used directly by the extremal-search module and, for part counts >= 3, by
the Zarankiewicz oracle (z_t^{(a)} is exactly ex(n_1..n_a; K_2(t))).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence

from .detectors import Budget, BudgetExhausted, as_budget, contains_uniform_pattern
from .graphs import PartitionedGraph, bits


def min_star_cost(edges: int, rows: int, t: int) -> int:
    """Min of sum C(d_i, t) over ``rows`` nonnegative degrees summing to ``edges``."""
    if rows <= 0:
        return 0 if edges == 0 else 10**18
    d, s = divmod(edges, rows)
    return s * comb(d + 1, t) + (rows - s) * comb(d, t)


def max_edges_for_budget(rows: int, cols: int, t: int, star_budget: int) -> int:
    """Largest e <= rows*cols whose equal-degree star cost is within budget."""
    if star_budget < 0:
        return -1
    lo, hi = 0, rows * cols
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if min_star_cost(mid, rows, t) <= star_budget:
            lo = mid
        else:
            hi = mid - 1
    return lo


def kst_upper_raw(m: int, n: int, t: int) -> int:
    """Both-orientation integer convexity bound for z_t(m, n)."""
    if m < t or n < t:
        return m * n
    left = max_edges_for_budget(m, n, t, (t - 1) * comb(n, t))
    right = max_edges_for_budget(n, m, t, (t - 1) * comb(m, t))
    return min(m * n, left, right)


def whole_graph_cap(num_vertices: int, t: int) -> int:
    """Max edges with sum_v C(d_v, t) <= (t-1) C(N, t): in any K_{t,t}-free
    graph every t-set has at most t-1 common neighbours, so the star count
    is capped regardless of the part structure."""
    n = num_vertices
    cap = (t - 1) * comb(n, t)
    lo, hi = 0, n * (n - 1) // 2
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if min_star_cost(2 * mid, n, t) <= cap:
            lo = mid
        else:
            hi = mid - 1
    return lo


def biclique_host_cap(part_sizes: Sequence[int], t: int) -> int:
    """Recursive static cap on K_2(t)-free edge counts in a multipartite host."""
    sizes = tuple(sorted(part_sizes, reverse=True))
    if len(sizes) == 1:
        return 0
    if len(sizes) == 2:
        return kst_upper_raw(sizes[0], sizes[1], t)
    total = sum(sizes)
    best = whole_graph_cap(total, t)
    blocks = 0
    for i in range(len(sizes)):
        for j in range(i + 1, len(sizes)):
            blocks += kst_upper_raw(sizes[i], sizes[j], t)
    best = min(best, blocks)
    for i in range(len(sizes)):
        rest = sizes[:i] + sizes[i + 1:]
        cut = kst_upper_raw(sizes[i], total - sizes[i], t)
        best = min(best, cut + biclique_host_cap(rest, t))
    return best


@dataclass
class SearchOutcome:
    value: int
    graph: PartitionedGraph
    exact: bool
    nodes: int


def cross_pairs(part_sizes: Sequence[int]) -> list[tuple[int, int]]:
    """Canonical pair order: by (part pair, then index)."""
    starts = []
    pos = 0
    for s in part_sizes:
        starts.append(pos)
        pos += s
    pairs = []
    k = len(part_sizes)
    for i in range(k):
        for j in range(i + 1, k):
            for u in range(starts[i], starts[i] + part_sizes[i]):
                for v in range(starts[j], starts[j] + part_sizes[j]):
                    pairs.append((u, v))
    return pairs


def maximize_free(part_sizes: Sequence[int], q: int, t: int,
                  budget: "int | Budget | None" = None) -> SearchOutcome:
    """Exact max edge count of a K_q(t)-free graph in G(n_1, ..., n_k).

    Returns the best graph found; ``exact`` is False when the budget ran out
    first (the value is then only a lower bound).
    """
    host = PartitionedGraph(part_sizes)
    pairs = cross_pairs(part_sizes)
    total = len(pairs)
    universe = host.universe_mask
    part_masks = [host.part_mask(i) for i in range(len(part_sizes))]
    rows = [0] * host.num_vertices
    bud = as_budget(budget)

    # block structure for the K_2(t) counting bounds
    block_of = []
    block_ids = {}
    for (u, v) in pairs:
        key = (host.part_of[u], host.part_of[v])
        if key not in block_ids:
            block_ids[key] = len(block_ids)
        block_of.append(block_ids[key])
    nblocks = len(block_ids)
    block_kst = [0] * nblocks
    if q == 2:
        for (i, j), b in block_ids.items():
            block_kst[b] = kst_upper_raw(part_sizes[i], part_sizes[j], t)
        static_cap = biclique_host_cap(part_sizes, t)
    else:
        for (i, j), b in block_ids.items():
            block_kst[b] = part_sizes[i] * part_sizes[j]
        static_cap = total
    # remaining pairs per block at each index
    rem_table = [[0] * nblocks for _ in range(total + 1)]
    for idx in range(total - 1, -1, -1):
        rem_table[idx] = list(rem_table[idx + 1])
        rem_table[idx][block_of[idx]] += 1

    best = -1
    best_rows: list[int] = [0] * host.num_vertices
    exact = True
    pattern_fits = q * t <= host.num_vertices
    used_block = [0] * nblocks

    def probe(u: int, v: int) -> bool:
        rows[u] |= 1 << v
        rows[v] |= 1 << u
        try:
            return contains_uniform_pattern(rows, universe, part_masks,
                                            q, t, bud, seed=(u, v))
        finally:
            rows[u] &= ~(1 << v)
            rows[v] &= ~(1 << u)

    def rec(idx: int, cur: int) -> None:
        nonlocal best, best_rows
        bud.spend()
        if cur > best:
            best = cur
            best_rows = list(rows)
        if idx == total or cur >= static_cap:
            return
        rem = rem_table[idx]
        headroom = 0
        for b in range(nblocks):
            if rem[b]:
                headroom += min(rem[b], block_kst[b] - used_block[b])
        if min(cur + headroom, static_cap) <= best:
            return
        u, v = pairs[idx]
        b = block_of[idx]
        if used_block[b] < block_kst[b] and (not pattern_fits or not probe(u, v)):
            rows[u] |= 1 << v
            rows[v] |= 1 << u
            used_block[b] += 1
            rec(idx + 1, cur + 1)
            used_block[b] -= 1
            rows[u] &= ~(1 << v)
            rows[v] &= ~(1 << u)
        rec(idx + 1, cur)

    try:
        rec(0, 0)
    except BudgetExhausted:
        exact = False

    edges = []
    for u in range(host.num_vertices):
        for off in bits(best_rows[u] >> (u + 1)):
            edges.append((u, u + 1 + off))
    return SearchOutcome(max(best, 0), PartitionedGraph(part_sizes, edges),
                         exact, bud.used)
