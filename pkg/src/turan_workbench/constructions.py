"""Builders for the explicit extremal graph families.

Every builder has an exact edge-count postcondition, asserted by the test
suite rather than trusted:

* ``build_template``    -> turan_count(r, k) * n^2
* ``basic_construction``    -> turan_count(r, k) * n^2 + e(B) + (t-1)(k-r-1)n
* ``improved_construction`` -> turan_count(r, k) * n^2 + e(B) + (t-1)(b-1)n
                               + b' * floor((t-1)^2 / 4),  b = k-r, b' = min(b-1, r-b)

where B is the pluggable class-1 graph (a maximum K_{t,t}-free graph is
unknown in general, so both builders accept any K_{t,t}-free bipartite B on
two n-sets and express their edge counts in terms of e(B); the oracle module
supplies a true maximum when n is small).

The C4-free regular overlays come from Sidon (B2) sets: a set S of residues
mod n with all pairwise differences distinct yields a |S|-regular bipartite
Cayley graph (i, i+s mod n) without K_{2,2}, since a repeated difference
would be exactly a 4-cycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Optional, Sequence

from .detectors import find_biclique
from .graphs import PartitionedGraph


class ConstructionError(ValueError):
    """Parameters outside a builder's validity range, or a bad plug-in graph."""


def turan_count(r: int, k: int) -> int:
    """Edge count t_r(k) of the Turan graph T_r(k) (balanced complete r-partite)."""
    if not (1 <= r <= k):
        raise ConstructionError(f"need 1 <= r <= k, got r={r}, k={k}")
    a, b = divmod(k, r)
    return (k * k - b * (a + 1) ** 2 - (r - b) * a * a) // 2


def g_value(n: int, r: int, k: int, t: int, z_value: int) -> int:
    """Lower-bound formula: t_r(k)n^2 + z + (t-1)(k-r-1)n + min(k-r-1, 2r-k)*floor((t-1)^2/4).

    ``z_value`` stands in for z_t(n, n); supplying it is the caller's
    responsibility (exact from the oracle when in range, otherwise a
    construction value) and is recorded in output provenance.
    """
    if not (r < k <= 2 * r):
        raise ConstructionError(f"need r < k <= 2r, got r={r}, k={k}")
    if t < 2 or n < 1 or z_value < 0:
        raise ConstructionError(f"need t >= 2, n >= 1, z >= 0 (t={t}, n={n}, z={z_value})")
    return (turan_count(r, k) * n * n + z_value + (t - 1) * (k - r - 1) * n
            + min(k - r - 1, 2 * r - k) * ((t - 1) ** 2 // 4))


def chromatic_trivial_value(k: int, pattern) -> Optional[int]:
    """Coefficient C(k,2) when chi(pattern) > k (so ex_k(n, F) = C(k,2) n^2), else None."""
    if pattern.chromatic_number > k:
        return comb(k, 2)
    return None


# ---------------------------------------------------------------------------
# templates


@dataclass(frozen=True, order=True)
class Piece:
    """One leftover-cluster piece W_i: ``size`` vertices of ``cluster`` in ``cls``."""
    cls: int
    cluster: int
    size: int


@dataclass(frozen=True)
class TemplateSpec:
    """Combinatorial description of a template: r classes over k clusters of size n.

    ``cluster_classes[c]`` is the class of whole cluster c, or -1 for the
    b = k - a*r leftover clusters, whose vertices are split into pieces
    (at most one piece per class; the pieces of one cluster partition it).
    """

    r: int
    k: int
    n: int
    cluster_classes: tuple[int, ...]
    pieces: tuple[Piece, ...] = field(default=())

    def validate(self) -> None:
        r, k, n = self.r, self.k, self.n
        if r < 1 or n < 1 or k < r:
            raise ConstructionError(f"bad template ranges r={r}, k={k}, n={n}")
        a, b = divmod(k, r)
        if len(self.cluster_classes) != k:
            raise ConstructionError("cluster_classes must have one entry per cluster")
        whole = [c for c in self.cluster_classes if c != -1]
        if any(not (0 <= c < r) for c in whole):
            raise ConstructionError("cluster class out of range")
        per_class = [whole.count(i) for i in range(r)]
        if per_class != [a] * r:
            raise ConstructionError(f"each class needs exactly {a} whole clusters, got {per_class}")
        leftovers = [c for c, cl in enumerate(self.cluster_classes) if cl == -1]
        if len(leftovers) != b:
            raise ConstructionError(f"expected {b} leftover clusters, got {len(leftovers)}")
        classes_seen = set()
        per_cluster: dict[int, int] = {q: 0 for q in leftovers}
        for p in self.pieces:
            if p.cls in classes_seen:
                raise ConstructionError(f"class {p.cls} receives more than one piece")
            classes_seen.add(p.cls)
            if p.cluster not in per_cluster:
                raise ConstructionError(f"piece drawn from non-leftover cluster {p.cluster}")
            if not (0 <= p.cls < r) or p.size < 0:
                raise ConstructionError(f"bad piece {p}")
            per_cluster[p.cluster] += p.size
        if any(tot != n for tot in per_cluster.values()):
            raise ConstructionError("piece sizes of each leftover cluster must sum to n")

    # vertex layout: clusters are the host parts in index order; within a
    # leftover cluster, pieces occupy consecutive ranges in piece order.

    def class_of_vertices(self) -> list[int]:
        out = [0] * (self.k * self.n)
        for c, cl in enumerate(self.cluster_classes):
            if cl != -1:
                for v in range(c * self.n, (c + 1) * self.n):
                    out[v] = cl
        offsets = {c: 0 for c, cl in enumerate(self.cluster_classes) if cl == -1}
        for p in self.pieces:
            start = p.cluster * self.n + offsets[p.cluster]
            for v in range(start, start + p.size):
                out[v] = p.cls
            offsets[p.cluster] += p.size
        return out

    def z_masks(self) -> list[int]:
        """Per class, the union of its whole clusters (the Z_i)."""
        n = self.n
        masks = [0] * self.r
        for c, cl in enumerate(self.cluster_classes):
            if cl != -1:
                masks[cl] |= ((1 << n) - 1) << (c * n)
        return masks

    def w_masks(self) -> list[int]:
        """Per class, its piece W_i (may be empty)."""
        n = self.n
        masks = [0] * self.r
        offsets = {c: 0 for c, cl in enumerate(self.cluster_classes) if cl == -1}
        for p in self.pieces:
            start = p.cluster * n + offsets[p.cluster]
            masks[p.cls] |= ((1 << p.size) - 1) << start
            offsets[p.cluster] += p.size
        return masks

    def u_masks(self) -> list[int]:
        return [z | w for z, w in zip(self.z_masks(), self.w_masks())]

    def piece_cluster(self, cls: int) -> Optional[int]:
        for p in self.pieces:
            if p.cls == cls and p.size > 0:
                return p.cluster
        return None

    def to_document(self) -> dict:
        return {"r": self.r, "k": self.k, "n": self.n,
                "cluster_classes": list(self.cluster_classes),
                "pieces": [[p.cls, p.cluster, p.size] for p in self.pieces]}

    @classmethod
    def from_document(cls, doc: dict) -> "TemplateSpec":
        return cls(doc["r"], doc["k"], doc["n"], tuple(doc["cluster_classes"]),
                   tuple(Piece(*p) for p in doc["pieces"]))

    @classmethod
    def standard(cls, r: int, k: int, n: int,
                 splits: Sequence[Sequence[tuple[int, int]]] = ()) -> "TemplateSpec":
        """Definition-3.1 layout: class i owns clusters [i*a, (i+1)*a), leftovers last.

        ``splits`` has one entry per leftover cluster: a sequence of
        (class, size) pairs.  Default: leftover cluster j goes wholly to class j.
        """
        a, b = divmod(k, r)
        assignment = [-1] * k
        for i in range(r):
            for j in range(i * a, (i + 1) * a):
                assignment[j] = i
        pieces = []
        if b and not splits:
            splits = [[(j, n)] for j in range(b)]
        for j, split in enumerate(splits):
            for cl, size in split:
                pieces.append(Piece(cl, a * r + j, size))
        spec = cls(r, k, n, tuple(assignment), tuple(pieces))
        spec.validate()
        return spec


def build_template(spec: TemplateSpec) -> PartitionedGraph:
    """The template graph: all cross-class pairs except pairs inside one cluster."""
    spec.validate()
    n, k = spec.n, spec.k
    cls = spec.class_of_vertices()
    return PartitionedGraph([n] * k, _cross_class_edges([n] * k, cls))


# ---------------------------------------------------------------------------
# Sidon sets and C4-free regular bipartite graphs


def sidon_set(n: int, t: int) -> tuple[int, ...]:
    """A t-element B2 set in Z_n: all pairwise differences distinct mod n.

    Deterministic greedy search with backtracking over residues in increasing
    order; n >= 8t^2 guarantees room (t = 1 is exempt).  Failure in range is a
    defect, so it raises rather than returning a partial set.
    """
    if t < 1:
        raise ConstructionError("t must be >= 1")
    if t == 1:
        if n < 1:
            raise ConstructionError("n must be >= 1")
        return (0,)
    if n < 8 * t * t:
        raise ConstructionError(f"need n >= 8t^2 = {8 * t * t}, got n={n}")

    chosen = [0]
    diffs = set()

    def admissible(x: int) -> Optional[list[int]]:
        new = []
        for s in chosen:
            for d in ((x - s) % n, (s - x) % n):
                if d in diffs or d in new:
                    return None
                new.append(d)
        return new

    def extend(start: int) -> bool:
        if len(chosen) == t:
            return True
        for x in range(start, n):
            new = admissible(x)
            if new is None:
                continue
            chosen.append(x)
            diffs.update(new)
            if extend(x + 1):
                return True
            chosen.pop()
            diffs.difference_update(new)
        return False

    if not extend(1):
        raise ConstructionError(f"no Sidon set of size {t} found in Z_{n} (defect)")
    return tuple(chosen)


def largest_sidon_set(n: int, node_cap: int = 2_000_000) -> tuple[int, ...]:
    """The largest B2 set in Z_n found by backtracking (0 is wlog included).

    Exhaustive (hence maximum) when the search finishes under the node cap;
    on larger n the cap truncates the search and the best set found so far
    is returned, which is still a valid Sidon set.
    """
    if n < 1:
        raise ConstructionError("n must be >= 1")
    if n == 1:
        return (0,)
    best: list[int] = [0]
    chosen = [0]
    diffs: set[int] = set()
    nodes = 0

    class _Stop(Exception):
        pass

    def extend(start: int) -> None:
        nonlocal best, nodes
        nodes += 1
        if nodes > node_cap:
            raise _Stop
        if len(chosen) > len(best):
            best = list(chosen)
        if len(chosen) + (n - start) <= len(best):
            return
        for x in range(start, n):
            new = []
            bad = False
            for s in chosen:
                for d in ((x - s) % n, (s - x) % n):
                    if d in diffs or d in new:
                        bad = True
                        break
                    new.append(d)
                if bad:
                    break
            if bad:
                continue
            chosen.append(x)
            diffs.update(new)
            extend(x + 1)
            chosen.pop()
            diffs.difference_update(new)

    try:
        extend(1)
    except _Stop:
        pass
    return tuple(best)


def cayley_bipartite(n: int, shifts: Iterable[int]) -> PartitionedGraph:
    """Bipartite Cayley graph on two n-sets: left i ~ right (i+s mod n)."""
    edges = [(i, n + (i + s) % n) for s in shifts for i in range(n)]
    return PartitionedGraph([n, n], edges)


def regular_c4free_bipartite(n: int, t: int) -> PartitionedGraph:
    """t-regular K_{2,2}-free bipartite graph on two n-sets (Sidon-Cayley).

    t = 1 is a perfect matching and bypasses the n >= 8t^2 gate.
    """
    if t < 1 or n < 1:
        raise ConstructionError("need n, t >= 1")
    if t > 1 and n < 8 * t * t:
        raise ConstructionError(f"need n >= 8t^2 = {8 * t * t}, got n={n}")
    return cayley_bipartite(n, sidon_set(n, t))


# ---------------------------------------------------------------------------
# the two lower-bound constructions


@dataclass(frozen=True)
class ConstructionParams:
    n: int
    r: int
    k: int
    t: int

    def __post_init__(self):
        if not (self.r < self.k <= 2 * self.r):
            raise ConstructionError(f"need r < k <= 2r, got r={self.r}, k={self.k}")
        if self.t < 2 or self.n < 1:
            raise ConstructionError(f"need t >= 2 and n >= 1 (t={self.t}, n={self.n})")

    @property
    def b(self) -> int:
        return self.k - self.r

    @property
    def t_prime(self) -> int:
        return (self.t - 1 + 1) // 2  # ceil((t-1)/2)

    @property
    def b_prime(self) -> int:
        return min(self.b - 1, self.r - self.b)


def _check_class1(class1: PartitionedGraph, n: int, t: int) -> None:
    if class1.part_sizes != (n, n):
        raise ConstructionError(
            f"class-1 graph must be bipartite on two {n}-sets, got parts {class1.part_sizes}")
    w = find_biclique(class1, t)
    if w is not None:
        raise ConstructionError(f"class-1 graph contains K_{{{t},{t}}}: {w.classes}")


def _overlay_gate(n: int, t: int) -> None:
    if t - 1 > 1 and n < 8 * (t - 1) ** 2:
        raise ConstructionError(
            f"(t-1)-regular C4-free overlays need n >= 8(t-1)^2 = {8 * (t - 1) ** 2}")


def basic_construction(p: ConstructionParams,
                       class1_graph: PartitionedGraph) -> PartitionedGraph:
    """Blow-up with classes V_i u V_{i+r}: B on class 1, (t-1)-regular C4-free
    graphs on classes 2..k-r.  Edge count t_r(k)n^2 + e(B) + (t-1)(k-r-1)n."""
    n, r, k, t = p.n, p.r, p.k, p.t
    _check_class1(class1_graph, n, t)
    if k - r - 1 >= 1:
        _overlay_gate(n, t)
    cls = [0] * (k * n)
    for c in range(k):
        i = c if c < r else c - r
        for v in range(c * n, (c + 1) * n):
            cls[v] = i
    edges = _cross_class_edges([n] * k, cls)
    edges.extend(_map_bipartite(class1_graph, 0, r))
    for i in range(1, k - r):          # classes 2..k-r, 0-based rows 1..k-r-1
        overlay = regular_c4free_bipartite(n, t - 1)
        edges.extend(_map_bipartite(overlay, i, i + r))
    return PartitionedGraph([n] * k, edges)


def improved_construction(p: ConstructionParams,
                          class1_graph: PartitionedGraph) -> PartitionedGraph:
    """The moved-vertex construction; falls back to basic when b < 2 or k = 2r.

    Moves the first t' vertices of clusters V_{i,1} and V_{i,2} from row i to
    row i+b-1 for i in [2, b'+1], overlays (t-1)-regular C4-free graphs on the
    trimmed rows 2..b, and places 2t' disjoint K_{1,t-1} stars plus one
    K_{t',t'} on each receiving row.  Edge count
    t_r(k)n^2 + e(B) + (t-1)(b-1)n + b' * floor((t-1)^2/4).
    """
    n, r, k, t = p.n, p.r, p.k, p.t
    b = p.b
    if b < 2 or k == 2 * r:
        return basic_construction(p, class1_graph)
    _check_class1(class1_graph, n, t)
    if n < 8 * t * t:
        raise ConstructionError(f"improved construction needs n >= 8t^2 = {8 * t * t}")
    tp = p.t_prime
    bp = p.b_prime
    # clusters: V_{i,1} -> part i-1 (i in [1,r]); V_{i,2} -> part r+i-1 (i in [1,b])
    def first_cluster(i):
        return i - 1

    def second_cluster(i):
        return r + i - 1

    cls = [0] * (k * n)
    for i in range(1, r + 1):
        for v in g_range(first_cluster(i), n):
            cls[v] = i - 1
    for i in range(1, b + 1):
        for v in g_range(second_cluster(i), n):
            cls[v] = i - 1
    moved: dict[int, list[list[int]]] = {}
    for i in range(2, bp + 2):
        s1 = list(g_range(first_cluster(i), n))[:tp]
        s2 = list(g_range(second_cluster(i), n))[:tp]
        for v in s1 + s2:
            cls[v] = i + b - 2       # row i+b-1, 0-based
        moved[i] = [s1, s2]
    edges = _cross_class_edges([n] * k, cls)
    edges.extend(_map_bipartite(class1_graph, first_cluster(1), second_cluster(1)))
    for i in range(2, b + 1):
        if i <= bp + 1:
            overlay = regular_c4free_bipartite(n - tp, t - 1)
            left = list(g_range(first_cluster(i), n))[tp:]
            right = list(g_range(second_cluster(i), n))[tp:]
        else:
            overlay = regular_c4free_bipartite(n, t - 1)
            left = list(g_range(first_cluster(i), n))
            right = list(g_range(second_cluster(i), n))
        edges.extend(_map_bipartite_onto(overlay, left, right))
    for i in range(b + 1, b + bp + 1):
        s1, s2 = moved[i - b + 1]
        centers = s1 + s2
        host = list(g_range(first_cluster(i), n))
        if 2 * tp * (t - 1) > n:
            raise ConstructionError("row too small for disjoint stars")
        for m, c in enumerate(centers):
            for leaf in host[m * (t - 1):(m + 1) * (t - 1)]:
                edges.append((c, leaf))
        for u in s1:
            for v in s2:
                edges.append((u, v))
    return PartitionedGraph([n] * k, edges)


def g_range(cluster: int, n: int) -> range:
    return range(cluster * n, (cluster + 1) * n)


def _cross_class_edges(part_sizes: Sequence[int], cls: Sequence[int]) -> list[tuple[int, int]]:
    """All pairs in different classes and different parts."""
    edges = []
    total = sum(part_sizes)
    part_of = []
    for i, s in enumerate(part_sizes):
        part_of.extend([i] * s)
    for u in range(total):
        cu, pu = cls[u], part_of[u]
        for v in range(u + 1, total):
            if cls[v] != cu and part_of[v] != pu:
                edges.append((u, v))
    return edges


def _map_bipartite(g: PartitionedGraph, left_cluster: int, right_cluster: int
                   ) -> list[tuple[int, int]]:
    n = g.part_sizes[0]
    return [(left_cluster * n + u, right_cluster * n + (v - n)) for u, v in g.edges()]


def _map_bipartite_onto(g: PartitionedGraph, left: Sequence[int], right: Sequence[int]
                        ) -> list[tuple[int, int]]:
    n = g.part_sizes[0]
    return [(left[u], right[v - n]) for u, v in g.edges()]


def basic_edge_count(p: ConstructionParams, class1_edges: int) -> int:
    return (turan_count(p.r, p.k) * p.n * p.n + class1_edges
            + (p.t - 1) * (p.k - p.r - 1) * p.n)


def improved_edge_count(p: ConstructionParams, class1_edges: int) -> int:
    if p.b < 2 or p.k == 2 * p.r:
        return basic_edge_count(p, class1_edges)
    return (turan_count(p.r, p.k) * p.n * p.n + class1_edges
            + (p.t - 1) * (p.b - 1) * p.n + p.b_prime * ((p.t - 1) ** 2 // 4))
