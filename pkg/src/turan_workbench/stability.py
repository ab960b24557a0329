"""Structural analysis of near-extremal hosts against the template family.

Implements the constructive side of the stability machinery: template
enumeration, closest-template edit distance (gamma-closeness), the stable
partition predicate, the two-case minimum-degree audit, atypical-vertex
classification with the refined partition, the high-degree core bound, and
the final structure report.

The template family is vertex-labelled (a leftover cluster may be divided
arbitrarily), so closest_template optimizes a per-vertex class assignment;
the returned TemplateSpec records the resulting piece sizes and the result
carries the full vertex->class map of the minimizer.  When at most one
cluster is split (b <= 1) the per-vertex costs are independent and the
greedy assignment is provably optimal per shape; for b >= 2 a swap local
search refines it and the result is flagged heuristic.

Classification thresholds are epsilon*n comparisons done in exact rational
arithmetic.  A vertex satisfying several membership conditions at once is
flagged ambiguous rather than silently placed: the disjointness of the
classification is a consequence of extremality, not of the definitions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Optional, Sequence

from .constructions import ConstructionError, Piece, TemplateSpec
from .detectors import find_biclique, find_star
from .graphs import PartitionedGraph, bits, validate_class_partition


@dataclass(frozen=True)
class AnalysisParams:
    """Constant hierarchy for the analyzer: 0 < gamma < epsilon < 1."""

    r: int
    k: int
    n: int
    t: int
    gamma: Fraction = Fraction(1, 1024)
    epsilon: Fraction = Fraction(1, 8)

    def __post_init__(self):
        g, e = Fraction(self.gamma), Fraction(self.epsilon)
        if not (0 < g < e < 1):
            raise ValueError(f"need 0 < gamma < epsilon < 1, got {g}, {e}")
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "epsilon", e)

    @property
    def c0(self) -> Fraction:
        """High-degree core bound 2(t-1) * epsilon^(-rt)."""
        return 2 * (self.t - 1) * self.epsilon ** (-self.r * self.t)

    @property
    def min_degree_slack(self) -> Fraction:
        return 2 * self.t * self.gamma * self.n


# ---------------------------------------------------------------------------
# template enumeration


def _group_partitions(items: list[int], size: int) -> Iterator[list[tuple[int, ...]]]:
    """Unordered partitions of items into groups of the given size."""
    if not items:
        yield []
        return
    head = items[0]
    for rest in combinations(items[1:], size - 1):
        group = (head,) + rest
        remaining = [x for x in items[1:] if x not in rest]
        for tail in _group_partitions(remaining, size):
            yield [group] + tail


def _compositions(total: int, parts: int, sizes: Sequence[int]) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for s in sizes:
        if 0 < s <= total - (parts - 1):
            for rest in _compositions(total - s, parts - 1, sizes):
                yield (s,) + rest


def enumerate_templates(r: int, k: int, n: int,
                        size_grid: Optional[Sequence[int]] = None,
                        exhaustive_k_limit: int = 6) -> Iterator[TemplateSpec]:
    """All template shapes up to class relabeling, piece sizes from size_grid.

    Shapes = (which clusters are leftover) x (grouping of the rest into
    classes) x (piece-to-class layouts); the default size grid is 1..n.
    """
    if k > exhaustive_k_limit:
        raise ConstructionError(
            f"exhaustive template enumeration is guarded at k <= {exhaustive_k_limit}")
    a, b = divmod(k, r)
    sizes = list(size_grid) if size_grid is not None else list(range(1, n + 1))
    seen: set[tuple] = set()
    for leftover in combinations(range(k), b):
        rest = [c for c in range(k) if c not in leftover]
        for groups in _group_partitions(rest, a):
            groups = sorted(groups)
            assignment = [-1] * k
            for cls_idx, grp in enumerate(groups):
                for c in grp:
                    assignment[c] = cls_idx
            for layout in _piece_layouts(list(leftover), r, n, sizes):
                pieces = tuple(sorted(layout))
                key = tuple(sorted(
                    (groups[i], tuple(sorted((p.cluster, p.size)
                                             for p in pieces if p.cls == i)))
                    for i in range(r)))
                if key in seen:
                    continue
                seen.add(key)
                spec = TemplateSpec(r, k, n, tuple(assignment), pieces)
                spec.validate()
                yield spec


def _piece_layouts(leftover: list[int], r: int, n: int,
                   sizes: Sequence[int]) -> Iterator[list[Piece]]:
    """Assign each leftover cluster a set of classes and a size composition."""
    def rec(idx: int, free_classes: tuple[int, ...]) -> Iterator[list[Piece]]:
        if idx == len(leftover):
            yield []
            return
        q = leftover[idx]
        for count in range(1, min(r, len(free_classes)) + 1):
            for chosen in combinations(free_classes, count):
                for comp in _compositions(n, count, sizes):
                    head = [Piece(c, q, s) for c, s in zip(chosen, comp)]
                    rest_free = tuple(c for c in free_classes if c not in chosen)
                    for tail in rec(idx + 1, rest_free):
                        yield head + tail
    return rec(0, tuple(range(r)))


# ---------------------------------------------------------------------------
# closest template


@dataclass
class ClosestTemplateResult:
    spec: TemplateSpec
    class_of: tuple[int, ...]      # vertex -> class map of the minimizer
    distance: int
    gamma_close: bool
    heuristic: bool


def _assignment_distance(g: PartitionedGraph, class_of: Sequence[int], r: int) -> int:
    """|E(G) triangle E(T)| for the vertex-level template T of the assignment."""
    class_masks = [0] * r
    for v, c in enumerate(class_of):
        class_masks[c] |= 1 << v
    total = 0
    universe = g.universe_mask
    for v in range(g.num_vertices):
        trow = universe & ~class_masks[class_of[v]] & ~g.part_mask(g.part_of[v])
        total += (g.neighbors(v) ^ trow).bit_count()
    return total // 2


def closest_template(g: PartitionedGraph, params: AnalysisParams,
                     local_search_passes: int = 10) -> ClosestTemplateResult:
    """Template of the family minimizing |E(G) triangle E(T)|.

    Exhaustive over shapes; per shape the leftover vertices are assigned to
    allowed classes greedily by independent disagreement against the whole
    clusters, then refined by a swap local search until fixpoint.
    """
    r, k, n = params.r, params.k, params.n
    if g.part_sizes != (n,) * k:
        raise ConstructionError("closest_template needs k parts of size n")
    a, b = divmod(k, r)
    best: Optional[ClosestTemplateResult] = None
    for leftover in combinations(range(k), b):
        rest = [c for c in range(k) if c not in leftover]
        for groups in _group_partitions(rest, a):
            groups = sorted(groups)
            for allowance in _allowances(list(leftover), r):
                class_of = _fit_assignment(g, groups, allowance, r, n,
                                           local_search_passes if b >= 2 else 0)
                dist = _assignment_distance(g, class_of, r)
                if best is None or dist < best.distance:
                    spec = _spec_from_assignment(r, k, n, groups, leftover, class_of)
                    best = ClosestTemplateResult(
                        spec, tuple(class_of), dist,
                        gamma_close=Fraction(dist) <= params.gamma * n * n,
                        heuristic=b >= 2)
    assert best is not None
    return best


def _allowances(leftover: list[int], r: int) -> Iterator[dict[int, tuple[int, ...]]]:
    """Maps cluster -> allowed classes: each class allowed in at most one
    cluster, every leftover cluster allowed at least one class."""
    if not leftover:
        yield {}
        return

    def rec(cls: int, alloc: dict[int, list[int]]) -> Iterator[dict[int, tuple[int, ...]]]:
        if cls == r:
            if all(alloc[q] for q in leftover):
                yield {q: tuple(v) for q, v in alloc.items()}
            return
        for q in leftover:
            alloc[q].append(cls)
            yield from rec(cls + 1, alloc)
            alloc[q].pop()
        # class takes no piece
        yield from rec(cls + 1, alloc)

    yield from rec(0, {q: [] for q in leftover})


def _fit_assignment(g: PartitionedGraph, groups: list[tuple[int, ...]],
                    allowance: dict[int, tuple[int, ...]], r: int, n: int,
                    passes: int) -> list[int]:
    class_of = [0] * g.num_vertices
    fixed_masks = [0] * r
    for cls_idx, grp in enumerate(groups):
        for c in grp:
            fixed_masks[cls_idx] |= g.part_mask(c)
            for v in g.part_vertices(c):
                class_of[v] = cls_idx
    all_fixed = 0
    for m in fixed_masks:
        all_fixed |= m
    free_vertices = [v for q in allowance for v in g.part_vertices(q)]
    # greedy: cost of class c counts disagreements against fixed vertices only
    for v in free_vertices:
        row = g.neighbors(v)
        bestc, bestcost = None, None
        for c in allowance[g.part_of[v]]:
            inside = (row & fixed_masks[c]).bit_count()
            outside_missing = (all_fixed & ~fixed_masks[c] & ~row).bit_count()
            cost = inside + outside_missing
            if bestcost is None or cost < bestcost:
                bestc, bestcost = c, cost
        class_of[v] = bestc
    # swap local search over the full distance (only needed when b >= 2)
    for _ in range(passes):
        improved = False
        base = _assignment_distance(g, class_of, r)
        for v in free_vertices:
            cur = class_of[v]
            for c in allowance[g.part_of[v]]:
                if c == cur:
                    continue
                class_of[v] = c
                d = _assignment_distance(g, class_of, r)
                if d < base:
                    base = d
                    cur = c
                    improved = True
                else:
                    class_of[v] = cur
        if not improved:
            break
    return class_of


def _spec_from_assignment(r: int, k: int, n: int, groups: list[tuple[int, ...]],
                          leftover: Sequence[int], class_of: Sequence[int]
                          ) -> TemplateSpec:
    assignment = [-1] * k
    for cls_idx, grp in enumerate(groups):
        for c in grp:
            assignment[c] = cls_idx
    pieces = []
    for q in leftover:
        counts: dict[int, int] = {}
        for v in range(q * n, (q + 1) * n):
            counts[class_of[v]] = counts.get(class_of[v], 0) + 1
        for cls_idx in sorted(counts):
            pieces.append(Piece(cls_idx, q, counts[cls_idx]))
    spec = TemplateSpec(r, k, n, tuple(assignment), tuple(sorted(pieces)))
    spec.validate()
    return spec


# ---------------------------------------------------------------------------
# stable partitions


def stable_partition_check(class_masks: Sequence[int], g: PartitionedGraph) -> bool:
    """True iff every class holds equally many whole parts and <= 1 piece.

    A class's piece may itself be a full part (the family allows W_i = V_q),
    so a class with one extra whole part and no proper piece also counts:
    the check is whether some designation of at most one piece per class
    equalizes the integral counts.
    """
    validate_class_partition(g, class_masks)
    whole = []
    partial = []
    for cm in class_masks:
        w = 0
        p = 0
        for i in range(len(g.part_sizes)):
            x = (cm & g.part_mask(i)).bit_count()
            if x == g.part_sizes[i]:
                w += 1
            elif x > 0:
                p += 1
        if p > 1:
            return False
        whole.append(w)
        partial.append(p)
    m = min(whole)
    for w, p in zip(whole, partial):
        extra = w - m
        if extra > 1 or extra + p > 1:
            return False
    return True


# ---------------------------------------------------------------------------
# minimum-degree audit


def min_degree_audit(g: PartitionedGraph, spec: TemplateSpec,
                     params: AnalysisParams) -> list[dict]:
    """Vertices violating the two-case degree lower bound, with margins.

    Z_i vertices need degree >= (k-a)n - |W_i| - 2t*gamma*n; piece vertices
    need >= (k-1-a)n - 2t*gamma*n.  On an exact template every Z_i vertex
    has degree exactly (k-a)n - |W_i| and every piece vertex (k-1-a)n.
    """
    spec.validate()
    k, n, r = spec.k, spec.n, spec.r
    a = k // r
    slack = params.min_degree_slack
    z_masks = spec.z_masks()
    w_masks = spec.w_masks()
    w_sizes = [m.bit_count() for m in w_masks]
    violations = []
    for i in range(r):
        for v in bits(z_masks[i]):
            required = Fraction((k - a) * n - w_sizes[i]) - slack
            d = g.degree(v)
            if d < required:
                violations.append({"vertex": v, "case": f"Z_{i + 1}",
                                   "degree": d, "required": required,
                                   "margin": Fraction(d) - required})
        for v in bits(w_masks[i]):
            required = Fraction((k - 1 - a) * n) - slack
            d = g.degree(v)
            if d < required:
                violations.append({"vertex": v, "case": "W",
                                   "degree": d, "required": required,
                                   "margin": Fraction(d) - required})
    return violations


# ---------------------------------------------------------------------------
# atypical-vertex classification


@dataclass
class AtypicalDecomposition:
    w_doubleprime: int
    w_prime: list[int]            # per class
    z_doubleprime: int            # union over classes
    z_cross: list[list[int]]      # [i][j] = Z_i^j (diagonal via d(v, U_i))
    u_tilde: list[int]            # refined partition classes
    ambiguous: int                # vertices satisfying several conditions


def classify_atypical(g: PartitionedGraph, spec: TemplateSpec,
                      params: AnalysisParams) -> AtypicalDecomposition:
    """Set-theoretic atypical-vertex classification at threshold epsilon*n.

    W'' collects piece vertices with >= eps*n neighbours in every Z_j; W'_i
    those with < eps*n into Z_i.  Z''_i needs >= eps*n into every other Z_j
    and into U_i; otherwise the vertex lands in the unique Z_i^j whose
    condition it satisfies (diagonal via d(v, U_i) < eps*n), or is flagged
    ambiguous when several conditions hold at once.
    """
    spec.validate()
    r, n = spec.r, spec.n
    eps_n = params.epsilon * n
    z_masks = spec.z_masks()
    w_masks = spec.w_masks()
    u_masks = spec.u_masks()
    w_all = 0
    for m in w_masks:
        w_all |= m
    w_pp = 0
    w_prime = [0] * r
    z_pp = 0
    z_cross = [[0] * r for _ in range(r)]
    ambiguous = 0
    for v in bits(w_all):
        degs = [(g.neighbors(v) & z_masks[j]).bit_count() for j in range(r)]
        small = [j for j in range(r) if degs[j] < eps_n]
        if not small:
            w_pp |= 1 << v
        elif len(small) == 1:
            w_prime[small[0]] |= 1 << v
        else:
            ambiguous |= 1 << v
    for i in range(r):
        for v in bits(z_masks[i]):
            row = g.neighbors(v)
            cross_small = [j for j in range(r) if j != i
                           and (row & z_masks[j]).bit_count() < eps_n]
            own_small = (row & u_masks[i]).bit_count() < eps_n
            if not cross_small and not own_small:
                z_pp |= 1 << v
                continue
            members = cross_small + ([i] if own_small else [])
            if len(members) == 1:
                z_cross[i][members[0]] |= 1 << v
            else:
                ambiguous |= 1 << v
    u_tilde = []
    for i in range(r):
        m = w_prime[i]
        for j in range(r):
            m |= z_cross[j][i]
        u_tilde.append(m)
    return AtypicalDecomposition(w_pp, w_prime, z_pp, z_cross, u_tilde, ambiguous)


# ---------------------------------------------------------------------------
# high-degree core (Proposition-style bound)


@dataclass
class CoreReport:
    core: int                     # the vertex set X
    hypothesis_met: bool
    bound: Fraction
    bound_holds: Optional[bool]   # None when the hypothesis is unmet


def high_degree_core(g: PartitionedGraph, class_masks: Sequence[int],
                     params: AnalysisParams) -> CoreReport:
    """X = vertices with d(v, U_i) >= eps |U_i| for every class; |X| is
    bounded by 2(t-1) eps^(-rt) when the density hypothesis holds and the
    host is K_{r+1}(t)-free (freeness is the caller's precondition to check).
    """
    validate_class_partition(g, class_masks)
    eps = params.epsilon
    gamma = params.gamma
    r = len(class_masks)
    core = 0
    for v in range(g.num_vertices):
        row = g.neighbors(v)
        if all((row & cm).bit_count() >= eps * cm.bit_count() for cm in class_masks):
            core |= 1 << v
    dens_ok = all(g.density(class_masks[i], class_masks[j]) >= 1 - gamma
                  for i in range(r) for j in range(i + 1, r))
    eps_ok = eps * eps > 3 * r * r * params.t * params.t * gamma
    met = dens_ok and eps_ok
    bound = params.c0
    return CoreReport(core, met, bound,
                      (Fraction(core.bit_count()) <= bound) if met else None)


# ---------------------------------------------------------------------------
# structure report


def structure_report(g: PartitionedGraph, spec: TemplateSpec, z_candidate: int,
                     t: int, params: Optional[AnalysisParams] = None) -> dict:
    """Pairwise densities of G[U_i \\ Z, U_j \\ Z], K_{t,t} verdict on class 1,
    K_{1,t} verdicts on the others, and |Z| against C0 when params are given.

    The density cells are raw values: "almost complete" has no explicit
    threshold in the target statement, so no pass/fail verdict is emitted.
    """
    spec.validate()
    r = spec.r
    u_masks = [m & ~z_candidate for m in spec.u_masks()]
    densities = [[None] * r for _ in range(r)]
    for i in range(r):
        for j in range(i + 1, r):
            if u_masks[i] and u_masks[j]:
                d = g.density(u_masks[i], u_masks[j])
                densities[i][j] = densities[j][i] = str(d)
    report: dict = {
        "classes": [m.bit_count() for m in u_masks],
        "z_size": z_candidate.bit_count(),
        "densities": densities,
    }
    if u_masks[0]:
        w = find_biclique(g, t, within=u_masks[0])
        report["class1_ktt_free"] = w is None
        if w is not None:
            report["class1_ktt_witness"] = [list(c) for c in w.classes]
    else:
        report["class1_ktt_free"] = True
    star_verdicts = []
    for i in range(1, r):
        if u_masks[i]:
            w = find_star(g, t, within=u_masks[i])
            star_verdicts.append(w is None)
        else:
            star_verdicts.append(True)
    report["other_classes_k1t_free"] = star_verdicts
    if params is not None:
        report["c0"] = str(params.c0)
        report["z_within_c0"] = Fraction(z_candidate.bit_count()) <= params.c0
    return report
