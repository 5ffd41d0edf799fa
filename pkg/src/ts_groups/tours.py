"""Related sets, revisions, exact and heuristic traveling-salesman
functionals, the credited walk functional, and the Folner traversal
demonstration for abelian groups.

L(S) is the length of a shortest closed path through every element of
S under the oracle metric.  The credited variant L'(S) subtracts, from
the path length, the number of path indices that land in S (the base
point counts twice, once as index 0 and once as index n), so it can be
negative; for a single point the degenerate length-0 path gives -1.
"""

from __future__ import annotations

import heapq
import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .errors import (
    DegenerateXiError,
    InternalInvariantError,
    MalformedInputError,
    PreconditionError,
    ResourceLimitError,
)
from .groups import AbelianOracle, FreeOracle, GroupOracle, ProductOracle
from .words import Word

__all__ = [
    "RelatedSet",
    "ClosedPath",
    "Tour",
    "is_xi_related",
    "revise",
    "tsp_exact",
    "tsp_heuristic",
    "mst_bounds",
    "l_prime",
    "LPrimeResult",
    "SamplerConfig",
    "sample_related_set",
    "ts_lambda_experiment",
    "ExperimentReport",
    "xi_boundary",
    "k_boundary",
    "folner_traversal_demo",
    "FolnerReport",
    "random_element",
]

EXACT_SOLVER_CAP = 15


@dataclass
class RelatedSet:
    """A finite set of group elements, optionally linked by an element
    xi (every member must then have a neighbor differing by xi on the
    right), optionally carrying a revision into disjoint {x, x*xi}
    pairs."""

    oracle: GroupOracle
    xi: Optional[object]
    elements: Tuple[object, ...]
    pairs: Optional[Tuple[Tuple[object, object], ...]] = None

    def __post_init__(self):
        self.elements = tuple(sorted(set(self.elements), key=self.oracle.sort_key))
        if not self.elements:
            raise MalformedInputError("related set must be nonempty")
        if self.pairs is not None:
            if self.xi is None:
                raise MalformedInputError("revision pairs need a link element")
            covered = [x for p in self.pairs for x in p]
            if len(covered) != len(set(covered)):
                raise MalformedInputError("revision pairs must be disjoint")
            members = set(self.elements)
            for x, y in self.pairs:
                if x not in members or y not in members:
                    raise MalformedInputError("revision pair outside the set")
                if y != self.oracle.multiply(x, self.xi):
                    raise MalformedInputError("revision pair is not {x, x*xi}")

    @property
    def size(self) -> int:
        return len(self.elements)

    def neighbor_map(self) -> Dict[object, object]:
        """Pair partner of each paired element."""
        if self.pairs is None:
            raise PreconditionError("set carries no revision")
        out = {}
        for x, y in self.pairs:
            out[x] = y
            out[y] = x
        return out

    def is_revised(self) -> bool:
        return self.pairs is not None and sum(2 for _ in self.pairs) == self.size


def is_xi_related(elements, xi, oracle: GroupOracle):
    """Check the neighbor condition; returns (flag, orphans)."""
    if xi == oracle.identity():
        raise DegenerateXiError("xi must be nontrivial")
    members = set(elements)
    orphans = []
    for x in members:
        if oracle.multiply(x, xi) not in members and oracle.multiply(
            x, oracle.inverse(xi)
        ) not in members:
            orphans.append(x)
    orphans.sort(key=oracle.sort_key)
    return not orphans, orphans


def revise(rset: RelatedSet) -> RelatedSet:
    """Select disjoint pairs {x, x*xi} covering at least 2/3 of the set.

    The xi-orbit graph restricted to the set has maximum degree 2 and,
    in a torsion-free group, no cycles, so greedy pairing along each
    orbit path covers 2*floor(m/2) of every m-vertex path, hence at
    least 2/3 overall.
    """
    if rset.xi is None:
        raise PreconditionError("cannot revise a set without xi")
    ok, orphans = is_xi_related(rset.elements, rset.xi, rset.oracle)
    if not ok:
        raise PreconditionError(f"set is not related: {len(orphans)} orphans")
    oracle = rset.oracle
    members = set(rset.elements)
    succ = {}
    pred = {}
    for x in rset.elements:
        y = oracle.multiply(x, rset.xi)
        if y in members:
            succ[x] = y
            pred[y] = x
    pairs = []
    used = set()
    starts = [x for x in rset.elements if x not in pred]
    for start in starts:
        chain = [start]
        while chain[-1] in succ and succ[chain[-1]] not in used:
            nxt = succ[chain[-1]]
            if nxt in chain:
                break
            chain.append(nxt)
        for i in range(0, len(chain) - 1, 2):
            pairs.append((chain[i], chain[i + 1]))
        used.update(chain)
    remaining = [x for x in rset.elements if x not in used]
    # cycles can only arise for torsion xi; pair them greedily anyway
    while remaining:
        x = remaining[0]
        cyc = [x]
        while succ[cyc[-1]] != x:
            cyc.append(succ[cyc[-1]])
        for i in range(0, len(cyc) - 1, 2):
            pairs.append((cyc[i], cyc[i + 1]))
        remaining = [y for y in remaining if y not in set(cyc)]
    selected = tuple(x for p in pairs for x in p)
    if 3 * len(selected) < 2 * rset.size:
        raise InternalInvariantError(
            f"revision covered {len(selected)} of {rset.size}, below 2/3"
        )
    return RelatedSet(oracle, rset.xi, selected, tuple(pairs))


@dataclass
class ClosedPath:
    """Unit-step closed path in the Cayley graph."""

    oracle: GroupOracle
    points: Tuple[object, ...]

    def __post_init__(self):
        self.points = tuple(self.points)
        if not self.points:
            raise MalformedInputError("closed path needs at least one point")
        if self.points[0] != self.points[-1]:
            raise MalformedInputError("path is not closed")

    @property
    def length(self) -> int:
        return len(self.points) - 1

    def validate(self):
        for u, v in zip(self.points, self.points[1:]):
            if self.oracle.distance(u, v) != 1:
                raise MalformedInputError(
                    f"consecutive points at distance {self.oracle.distance(u, v)}"
                )

    def visit_count(self, members) -> int:
        """Number of indices (0..n inclusive) landing in the given set."""
        members = set(members)
        return sum(1 for p in self.points if p in members)


@dataclass
class Tour:
    """Closed visiting order of a point set under the oracle metric."""

    order: Tuple[object, ...]
    length: int
    kind: str  # exact | heuristic-upper | mst-lower

    def __post_init__(self):
        if self.kind not in ("exact", "heuristic-upper", "mst-lower"):
            raise MalformedInputError(f"unknown tour kind {self.kind!r}")


def _distance_matrix(rset: RelatedSet):
    pts = rset.elements
    o = rset.oracle
    return [[o.distance(a, b) for b in pts] for a in pts]


def tour_of_order(rset: RelatedSet, order, kind) -> Tour:
    o = rset.oracle
    total = sum(
        o.distance(order[i], order[(i + 1) % len(order)]) for i in range(len(order))
    )
    return Tour(tuple(order), total, kind)


def tsp_exact(rset: RelatedSet, cap: int = EXACT_SOLVER_CAP) -> Tour:
    """Optimal closed tour by dynamic programming over subsets."""
    n = rset.size
    if n > cap:
        raise ResourceLimitError(
            f"{n} elements exceed the exact solver cap {cap}; use tsp_heuristic"
        )
    pts = rset.elements
    if n == 1:
        return Tour((pts[0],), 0, "exact")
    D = _distance_matrix(rset)
    INF = float("inf")
    size = 1 << n
    dp = [[INF] * n for _ in range(size)]
    par = [[-1] * n for _ in range(size)]
    dp[1][0] = 0
    for mask in range(1, size):
        if not mask & 1:
            continue
        row = dp[mask]
        for last in range(n):
            c = row[last]
            if c == INF or not (mask >> last) & 1:
                continue
            Dl = D[last]
            for j in range(1, n):
                if (mask >> j) & 1:
                    continue
                m2 = mask | (1 << j)
                c2 = c + Dl[j]
                if c2 < dp[m2][j]:
                    dp[m2][j] = c2
                    par[m2][j] = last
    full = size - 1
    best, best_last = INF, -1
    for last in range(1, n):
        c = dp[full][last] + D[last][0]
        if c < best:
            best, best_last = c, last
    order = []
    mask, last = full, best_last
    while last != -1:
        order.append(pts[last])
        mask, last = mask ^ (1 << last), par[mask][last]
    order.reverse()
    return Tour(tuple(order), int(best), "exact")


def tsp_heuristic(rset: RelatedSet, seed: int = 0) -> Tour:
    """Nearest-neighbor start plus 2-opt improvement; a valid upper
    bound on L(S)."""
    pts = list(rset.elements)
    n = len(pts)
    if n == 1:
        return Tour((pts[0],), 0, "heuristic-upper")
    D = _distance_matrix(rset)
    rng = random.Random(seed)
    start = rng.randrange(n)
    order = [start]
    left = set(range(n)) - {start}
    while left:
        cur = order[-1]
        nxt = min(left, key=lambda j: (D[cur][j], j))
        order.append(nxt)
        left.remove(nxt)
    improved = True
    while improved:
        improved = False
        for i in range(n - 1):
            for j in range(i + 2, n):
                if i == 0 and j == n - 1:
                    continue
                a, b = order[i], order[i + 1]
                c, d = order[j], order[(j + 1) % n]
                if D[a][c] + D[b][d] < D[a][b] + D[c][d]:
                    order[i + 1 : j + 1] = reversed(order[i + 1 : j + 1])
                    improved = True
    return tour_of_order(rset, [pts[i] for i in order], "heuristic-upper")


def _mst_edges(rset: RelatedSet):
    """Prim's algorithm on the complete oracle-metric graph."""
    pts = rset.elements
    n = len(pts)
    D = _distance_matrix(rset)
    in_tree = [False] * n
    best = [float("inf")] * n
    parent = [-1] * n
    best[0] = 0
    edges = []
    for _ in range(n):
        u = min(
            (i for i in range(n) if not in_tree[i]), key=lambda i: (best[i], i)
        )
        in_tree[u] = True
        if parent[u] >= 0:
            edges.append((parent[u], u, D[parent[u]][u]))
        for v in range(n):
            if not in_tree[v] and D[u][v] < best[v]:
                best[v] = D[u][v]
                parent[v] = u
    return edges


def mst_bounds(rset: RelatedSet):
    """(lower, upper, witness): MST weight W with W <= L(S) <= 2W; the
    witness is the doubled-tree closed path of length exactly 2W."""
    pts = rset.elements
    o = rset.oracle
    if len(pts) == 1:
        return 0, 0, ClosedPath(o, (pts[0],))
    edges = _mst_edges(rset)
    weight = sum(w for _, _, w in edges)
    adj: Dict[int, List[int]] = {i: [] for i in range(len(pts))}
    for u, v, _ in edges:
        adj[u].append(v)
        adj[v].append(u)
    points = [pts[0]]

    def dfs(u, par):
        for v in sorted(adj[u]):
            if v == par:
                continue
            points.extend(o.geodesic_points(pts[u], pts[v])[1:])
            dfs(v, u)
            points.extend(o.geodesic_points(pts[v], pts[u])[1:])

    dfs(0, -1)
    witness = ClosedPath(o, tuple(points))
    if witness.length != 2 * weight:
        raise InternalInvariantError("doubled-tree walk length mismatch")
    return weight, 2 * weight, witness


# ---------------------------------------------------------------------------
# The credited walk functional L'.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LPrimeResult:
    value: int
    certified: bool
    method: str


def _free_hull(oracle: FreeOracle, pts):
    """Vertex set of the minimal subtree of the Cayley tree spanning
    pts (union of the paths from every point to the first)."""
    words = [p.letters for p in pts]
    base = words[0]
    hull = set()

    def path_vertices(u, v):
        # meet = longest common prefix
        m = 0
        while m < len(u) and m < len(v) and u[m] == v[m]:
            m += 1
        out = [u[:i] for i in range(len(u), m - 1, -1)]
        out.extend(v[:i] for i in range(m + 1, len(v) + 1))
        return out

    for w in words:
        for vert in path_vertices(w, base):
            hull.add(vert)
    return hull


def _l_prime_free(oracle: FreeOracle, pts) -> int:
    hull = _free_hull(oracle, pts)
    members = {p.letters for p in pts}
    edges = 0
    deg = {w: 0 for w in members}
    for v in hull:
        if len(v) == 0:
            continue
        parent = v[:-1]
        if parent in hull:
            edges += 1
            if v in deg:
                deg[v] += 1
            if parent in deg:
                deg[parent] += 1
    # every walk covering the points doubles each hull edge; landing on
    # a point earns one credit per adjacent traversal pair
    return 2 * edges - sum(deg.values()) - 1


def _l_prime_dijkstra(oracle: GroupOracle, pts, region, cap_states=3_000_000):
    """Minimum of (steps - arrivals-in-S) over closed walks through all
    of pts, restricted to the given region of the Cayley graph."""
    n = len(pts)
    index = {p: i for i, p in enumerate(pts)}
    members = set(pts)
    gens = oracle.generators()
    start = pts[0]
    full = (1 << n) - 1
    dist = {(start, 1): 0}
    heap = [(0, 0, (start, 1))]
    counter = 0
    best = None
    while heap:
        d, _, (g, mask) = heapq.heappop(heap)
        if dist.get((g, mask), None) != d:
            continue
        if g == start and mask == full:
            best = d
            break
        for s in gens:
            h = oracle.multiply(g, s)
            if h not in region:
                continue
            w = 1 - (1 if h in members else 0)
            m2 = mask | (1 << index[h]) if h in members else mask
            key = (h, m2)
            nd = d + w
            if nd < dist.get(key, float("inf")):
                dist[key] = nd
                counter += 1
                if len(dist) > cap_states:
                    raise ResourceLimitError("credited-walk search exceeded state cap")
                heapq.heappush(heap, (nd, counter, key))
    if best is None:
        raise PreconditionError("region disconnected; cannot close the walk")
    return best - 1


def l_prime(rset: RelatedSet, cap: int = EXACT_SOLVER_CAP, hull_radius: Optional[int] = None) -> LPrimeResult:
    """Exact credited walk cost where the geometry allows it.

    Free groups: closed form on the spanning subtree (exact).  Abelian
    groups: Dijkstra over the bounding box (exact; leaving the box
    never helps an L1 walk).  Other oracles: Dijkstra over a ball hull
    of configurable radius, certified only within that budget.
    """
    if rset.size > cap:
        raise ResourceLimitError(f"{rset.size} elements exceed cap {cap}")
    pts = rset.elements
    if rset.size == 1:
        return LPrimeResult(-1, True, "degenerate")
    o = rset.oracle
    if isinstance(o, FreeOracle):
        return LPrimeResult(_l_prime_free(o, pts), True, "tree-formula")
    if isinstance(o, AbelianOracle):
        los = [min(p[i] for p in pts) for i in range(o.dim)]
        his = [max(p[i] for p in pts) for i in range(o.dim)]
        region = set(
            itertools.product(*[range(lo, hi + 1) for lo, hi in zip(los, his)])
        )
        return LPrimeResult(_l_prime_dijkstra(o, pts, region), True, "box-walk")
    radius = hull_radius
    if radius is None:
        radius = max(o.distance(pts[0], p) for p in pts) + 2
    region = set()
    frontier = set(pts)
    region.update(frontier)
    for _ in range(radius):
        nxt = set()
        for g in frontier:
            for s in o.generators():
                h = o.multiply(g, s)
                if h not in region:
                    nxt.add(h)
        region.update(nxt)
        frontier = nxt
        if len(region) > 200_000:
            raise ResourceLimitError("ball hull too large for credited-walk search")
    return LPrimeResult(_l_prime_dijkstra(o, pts, region), False, "hull-walk-budgeted")


# ---------------------------------------------------------------------------
# Sampling and the lambda experiment.
# ---------------------------------------------------------------------------


def random_element(oracle: GroupOracle, rng: random.Random, size: int):
    """Random element with components bounded by size."""
    if isinstance(oracle, FreeOracle):
        letters = []
        n = rng.randint(0, size)
        for _ in range(n):
            options = [a for a in oracle.alphabet.letters() if not letters or a != -letters[-1]]
            letters.append(rng.choice(options))
        return Word(tuple(letters), oracle.rank)
    if isinstance(oracle, AbelianOracle):
        return tuple(rng.randint(-size, size) for _ in range(oracle.dim))
    if isinstance(oracle, ProductOracle):
        return (
            random_element(oracle.left, rng, size),
            random_element(oracle.right, rng, size),
        )
    # mixed-generator product: random short generator walk
    g = oracle.identity()
    for _ in range(rng.randint(0, size)):
        g = oracle.multiply(g, rng.choice(oracle.generators()))
    return g


@dataclass
class SamplerConfig:
    samples: int = 100
    seed: int = 0
    max_size: int = 14
    style: str = "pairs"  # pairs | chains | mixed | box-pairs
    base_size: int = 6
    exact_cap: int = EXACT_SOLVER_CAP
    compute_lprime: bool = False


def sample_related_set(oracle: GroupOracle, xi, config: SamplerConfig, index: int) -> RelatedSet:
    """Seeded revised related set; the sampler is the desk-scale
    substitute for quantifying over all finite sets."""
    rng = random.Random(config.seed * 1_000_003 + index)
    style = config.style
    if style == "mixed":
        style = ("pairs", "chains")[rng.randrange(2)]
    for _attempt in range(200):
        elements: List[object] = []
        pairs: List[Tuple[object, object]] = []
        if style == "box-pairs":
            # a box and its xi-translate; the union is related even when
            # they overlap, but only disjoint translates carry the pair
            # structure
            if not isinstance(oracle, AbelianOracle):
                raise MalformedInputError("box-pairs sampling needs an abelian oracle")
            dims = oracle.dim
            sides = [rng.randint(2, max(2, int(config.max_size ** (1 / dims)))) for _ in range(dims)]
            corner = tuple(rng.randint(-3, 3) for _ in range(dims))
            box = [
                tuple(c + d for c, d in zip(corner, delta))
                for delta in itertools.product(*[range(s) for s in sides])
            ]
            translate = [oracle.multiply(x, xi) for x in box]
            elements = box + translate
            uniq = sorted(set(elements), key=oracle.sort_key)
            if len(uniq) > config.max_size:
                continue
            if set(box) & set(translate):
                rset = RelatedSet(oracle, xi, tuple(uniq))
            else:
                rset = RelatedSet(
                    oracle, xi, tuple(uniq), tuple(zip(box, translate))
                )
            ok, _ = is_xi_related(rset.elements, xi, oracle)
            if ok:
                return rset
            continue
        else:
            budget = rng.randint(2, config.max_size)
            while budget >= 2:
                base = random_element(oracle, rng, config.base_size)
                if style == "chains":
                    n_pairs = rng.randint(1, max(1, budget // 2))
                else:
                    n_pairs = 1
                for i in range(n_pairs):
                    x = base
                    for _ in range(2 * i):
                        x = oracle.multiply(x, xi)
                    y = oracle.multiply(x, xi)
                    pairs.append((x, y))
                    elements.extend((x, y))
                budget -= 2 * n_pairs
        if len(set(elements)) != len(elements):
            continue
        if len(elements) > config.max_size:
            continue
        try:
            rset = RelatedSet(oracle, xi, tuple(elements), tuple(pairs))
        except MalformedInputError:
            continue
        ok, _ = is_xi_related(rset.elements, xi, oracle)
        if ok and rset.is_revised():
            return rset
    raise InternalInvariantError("sampler failed to build a valid revised set")


@dataclass
class ExperimentReport:
    oracle: str
    xi: str
    lam: str
    per_sample: List[dict]
    min_ratio: Optional[str]
    violations: List[dict]
    config: dict

    def to_dict(self):
        return {
            "group": self.oracle,
            "xi": self.xi,
            "lambda": self.lam,
            "per_sample": self.per_sample,
            "min_ratio": self.min_ratio,
            "violations": self.violations,
            "sampler": self.config,
        }


def ts_lambda_experiment(oracle: GroupOracle, xi, lam, config: SamplerConfig) -> ExperimentReport:
    """Sample related sets, solve them exactly, and report the minimum
    of L(S)/|S| against the target lambda, with every violating set."""
    lam = Fraction(str(lam))
    per_sample = []
    violations = []
    min_ratio: Optional[Fraction] = None
    for i in range(config.samples):
        rset = sample_related_set(oracle, xi, config, i)
        tour = tsp_exact(rset, cap=config.exact_cap)
        ratio = Fraction(tour.length, rset.size)
        row = {"size": rset.size, "L": tour.length, "ratio": str(ratio)}
        if config.compute_lprime:
            row["Lprime"] = l_prime(rset, cap=config.exact_cap).value
        per_sample.append(row)
        if min_ratio is None or ratio < min_ratio:
            min_ratio = ratio
        if Fraction(tour.length) < lam * rset.size:
            violations.append(
                {
                    "size": rset.size,
                    "L": tour.length,
                    "elements": [oracle.format_element(g) for g in rset.elements],
                }
            )
    return ExperimentReport(
        oracle=oracle.descriptor,
        xi=oracle.format_element(xi),
        lam=str(lam),
        per_sample=per_sample,
        min_ratio=str(min_ratio) if min_ratio is not None else None,
        violations=violations,
        config={
            "samples": config.samples,
            "seed": config.seed,
            "max_size": config.max_size,
            "style": config.style,
        },
    )


# ---------------------------------------------------------------------------
# Folner traversal demonstration (abelian groups are not TS).
# ---------------------------------------------------------------------------


def xi_boundary(points, xi, oracle: GroupOracle):
    """Members whose xi-translates both leave the set (the boundary
    notion the spanning-tree traversal argument uses)."""
    members = set(points)
    inv = oracle.inverse(xi)
    return sorted(
        (
            x
            for x in members
            if oracle.multiply(x, xi) not in members
            and oracle.multiply(x, inv) not in members
        ),
        key=oracle.sort_key,
    )


def k_boundary(points, k_set, oracle: GroupOracle):
    """Members x such that x*K^-1*K is not contained in the set (the
    Folner-interior complement)."""
    members = set(points)
    diffs = {
        oracle.multiply(oracle.inverse(k1), k2) for k1 in k_set for k2 in k_set
    }
    out = []
    for x in members:
        if any(oracle.multiply(x, d) not in members for d in diffs):
            out.append(x)
    return sorted(out, key=oracle.sort_key)


@dataclass
class FolnerReport:
    box: List[Tuple[int, int]]
    xi: str
    size: int
    boundary_size: int
    interior_size: int
    traversal_length: int
    two_f: int
    chain_ok: bool
    degenerate: bool
    interior_related: bool
    traversal: ClosedPath

    def to_dict(self):
        return {
            "box": [list(b) for b in self.box],
            "xi": self.xi,
            "F": self.size,
            "boundary": self.boundary_size,
            "interior": self.interior_size,
            "traversal_length": self.traversal_length,
            "2F": self.two_f,
            "chain_ok": self.chain_ok,
            "degenerate": self.degenerate,
            "interior_related": self.interior_related,
        }


def folner_traversal_demo(oracle: AbelianOracle, box, xi) -> FolnerReport:
    """Spanning-tree traversal of a box F: a closed path of length
    2(|F|-1) <= 2|F| visiting all of F (hence all of F minus its
    xi-boundary), the concrete witness that lattice boxes travel at
    ratio at most 2.5."""
    if not isinstance(oracle, AbelianOracle):
        raise MalformedInputError("the traversal demo runs on abelian oracles")
    box = [tuple(b) for b in box]
    if len(box) != oracle.dim:
        raise MalformedInputError("box spec must give one (lo, hi) per dimension")
    points = [
        tuple(v) for v in itertools.product(*[range(lo, hi + 1) for lo, hi in box])
    ]
    members = set(points)
    if not members:
        raise PreconditionError("empty box")
    # spanning tree by DFS over grid edges
    root = points[0]
    seen = {root}
    order = []
    stack = [(root, None)]
    tree_children: Dict[tuple, list] = {p: [] for p in points}
    while stack:
        v, par = stack.pop()
        if par is not None:
            tree_children[par].append(v)
        order.append(v)
        for s in oracle.generators():
            w = oracle.multiply(v, s)
            if w in members and w not in seen:
                seen.add(w)
                stack.append((w, v))
    if len(seen) != len(members):
        raise PreconditionError("box subgraph is disconnected")
    walk = [root]

    def tour(v):
        for c in tree_children[v]:
            walk.append(c)
            tour(c)
            walk.append(v)

    import sys

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, len(points) + 100))
    try:
        tour(root)
    finally:
        sys.setrecursionlimit(old)
    traversal = ClosedPath(oracle, tuple(walk))
    boundary = xi_boundary(points, xi, oracle)
    interior = [p for p in points if p not in set(boundary)]
    related = False
    if interior:
        related, _ = is_xi_related(interior, xi, oracle)
    degenerate = not interior
    chain_ok = (
        not degenerate
        and traversal.length <= 2 * len(points)
        and 4 * len(points) <= 5 * len(interior)
    )
    return FolnerReport(
        box=box,
        xi=oracle.format_element(xi),
        size=len(points),
        boundary_size=len(boundary),
        interior_size=len(interior),
        traversal_length=traversal.length,
        two_f=2 * len(points),
        chain_ok=chain_ok,
        degenerate=degenerate,
        interior_related=related,
        traversal=traversal,
    )
