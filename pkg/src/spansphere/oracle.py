"""Exact ground truth for tiny 2-spheres.

All labelled spanning 2-spheres on ``[n]`` (``n <= 8``) are enumerated by
growing a closed surface one triangle at a time.  The lexicographically
smallest facet ``{1, a, b}`` is fixed first; afterwards only facets above
it may be added, and the smallest open edge is always closed next, so
every sphere is produced exactly once.

Isomorphism classes use the classical planar-code idea: a triangulation
of the sphere has an essentially unique embedding, so a breadth-first
code read off the rotation system from each flag (vertex, neighbour,
orientation) and minimised over flags is a complete invariant.  The flags
attaining the minimum are exactly one orbit of the automorphism group.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .costs import WeightOracle
from .errors import HNotSubcomplex, TooLarge, WrongModel
from .simplex import PureComplex, simplex, verify

ENUM_LIMIT = 8
COST_LIMIT = 7
PATCH_LIMIT = 6


# ---------------------------------------------------------------------------
# enumeration


def _link_ok(star, u) -> bool:
    """The link of ``u`` must be disjoint paths, or a single cycle."""
    adj = defaultdict(list)
    for a, b in star[u]:
        adj[a].append(b)
        adj[b].append(a)
    if any(len(x) > 2 for x in adj.values()):
        return False
    # a component with no degree-1 vertex is a cycle; it must be everything
    seen = set()
    comps = 0
    has_cycle = False
    for s in adj:
        if s in seen:
            continue
        comps += 1
        stack = [s]
        seen.add(s)
        ends = 0
        while stack:
            x = stack.pop()
            if len(adj[x]) == 1:
                ends += 1
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if ends == 0:
            has_cycle = True
    return not has_cycle or comps == 1


def _closed(star, u) -> bool:
    deg = defaultdict(int)
    for a, b in star[u]:
        deg[a] += 1
        deg[b] += 1
    return bool(deg) and all(c == 2 for c in deg.values())


def _grow(n: int, first: tuple, out: list) -> None:
    m_max = 2 * n - 4
    facets: list = []
    fset: set = set()
    ecount = defaultdict(int)
    star = defaultdict(list)

    def add(f):
        a, b, c = f
        for e in ((a, b), (a, c), (b, c)):
            ecount[e] += 1
        star[a].append((b, c))
        star[b].append((a, c))
        star[c].append((a, b))
        facets.append(f)
        fset.add(f)

    def remove(f):
        a, b, c = f
        for e in ((a, b), (a, c), (b, c)):
            ecount[e] -= 1
            if not ecount[e]:
                del ecount[e]
        star[a].pop()
        star[b].pop()
        star[c].pop()
        facets.pop()
        fset.discard(f)

    add(first)

    def rec():
        open_edges = [e for e, c in ecount.items() if c == 1]
        if not open_edges:
            if len(facets) == m_max and sum(1 for x in star.values() if x) == n:
                out.append(tuple(sorted(facets)))
            return
        if len(facets) >= m_max:
            return
        u, v = min(open_edges)
        for w in range(1, n + 1):
            if w == u or w == v:
                continue
            f = simplex((u, v, w))
            if f <= first or f in fset:
                continue
            e1 = (min(u, w), max(u, w))
            e2 = (min(v, w), max(v, w))
            if ecount.get(e1, 0) >= 2 or ecount.get(e2, 0) >= 2:
                continue
            if w in star and _closed(star, w):
                continue
            add(f)
            if _link_ok(star, u) and _link_ok(star, v) and _link_ok(star, w):
                rec()
            remove(f)

    rec()


@lru_cache(maxsize=None)
def labeled_spheres(n: int) -> tuple:
    """All labelled spanning 2-spheres on ``[n]`` as sorted facet tuples, in
    sorted (canonical) order."""
    if not 4 <= n <= ENUM_LIMIT:
        raise TooLarge(f"enumeration supports 4 <= n <= {ENUM_LIMIT}, got {n}")
    out: list = []
    for a, b in combinations(range(2, n + 1), 2):
        _grow(n, (1, a, b), out)
    return tuple(sorted(out))


# ---------------------------------------------------------------------------
# canonical forms


def rotation_system(facets) -> dict:
    """``succ[u][v]``: the neighbour after ``v`` around ``u`` in a consistent
    orientation of the triangles."""
    facets = list(facets)
    by_edge = defaultdict(list)
    for i, f in enumerate(facets):
        for e in combinations(f, 2):
            by_edge[e].append(i)
    oriented = {0: facets[0]}
    stack = [0]
    while stack:
        i = stack.pop()
        a, b, c = oriented[i]
        for x, y in ((a, b), (b, c), (c, a)):
            for j in by_edge[(min(x, y), max(x, y))]:
                if j in oriented:
                    continue
                (z,) = set(facets[j]) - {x, y}
                oriented[j] = (y, x, z)  # neighbour traverses the edge backwards
                stack.append(j)
    succ = defaultdict(dict)
    for a, b, c in oriented.values():
        succ[a][b] = c
        succ[b][c] = a
        succ[c][a] = b
    return succ


def _code_from(succ, pred, u, v, forward: bool) -> tuple:
    nxt = succ if forward else pred
    label = {u: 1}
    ref = {u: v}
    order = [u]
    code = []
    i = 0
    while i < len(order):
        x = order[i]
        i += 1
        start = ref[x]
        y = start
        while True:
            if y not in label:
                label[y] = len(label) + 1
                ref[y] = x
                order.append(y)
            code.append(label[y])
            y = nxt[x][y]
            if y == start:
                break
        code.append(0)
    return tuple(code)


def canonical_code(facets) -> tuple[tuple, int]:
    """(minimal flag code, number of flags attaining it = |Aut|)."""
    succ = rotation_system(facets)
    pred = {u: {w: v for v, w in s.items()} for u, s in succ.items()}
    top = max(len(s) for s in succ.values())
    best = None
    count = 0
    for u in sorted(succ):
        if len(succ[u]) != top:
            continue
        for v in succ[u]:
            for fwd in (True, False):
                c = _code_from(succ, pred, u, v, fwd)
                if best is None or c < best:
                    best, count = c, 1
                elif c == best:
                    count += 1
    return best, count


def complex_from_code(code) -> PureComplex:
    """Rebuild the triangulation labelled as in ``code``."""
    rot = []
    cur = []
    for c in code:
        if c == 0:
            rot.append(cur)
            cur = []
        else:
            cur.append(c)
    facets = set()
    for x, ring in enumerate(rot, start=1):
        for i in range(len(ring)):
            facets.add(simplex((x, ring[i], ring[(i + 1) % len(ring)])))
    return PureComplex(2, len(rot), tuple(facets))


@dataclass(frozen=True)
class SphereClass:
    representative: PureComplex
    automorphisms: int
    labeled: int


@dataclass(frozen=True)
class EnumerationResult:
    n: int
    labeled_count: int
    classes: tuple

    @property
    def orbit_sum(self) -> int:
        return sum(math.factorial(self.n) // c.automorphisms for c in self.classes)


@lru_cache(maxsize=None)
def enumerate_2spheres(n: int) -> EnumerationResult:
    spheres = labeled_spheres(n)
    found: dict = {}
    for s in spheres:
        code, aut = canonical_code(s)
        if code in found:
            found[code][2] += 1
        else:
            found[code] = [code, aut, 1]
    classes = tuple(SphereClass(complex_from_code(c), aut, k)
                    for c, aut, k in sorted(found.values()))
    return EnumerationResult(n, len(spheres), classes)


# ---------------------------------------------------------------------------
# exact minima and patches


@lru_cache(maxsize=None)
def _index_table(n: int):
    triples = list(combinations(range(1, n + 1), 3))
    index = {t: i for i, t in enumerate(triples)}
    idx = np.array([[index[f] for f in s] for s in labeled_spheres(n)], dtype=np.int64)
    return np.array(triples, dtype=np.int64), idx


def _check_oracle(o: WeightOracle) -> None:
    if o.model != "facet" or o.d != 2:
        raise WrongModel("exact 2-sphere costs need a facet oracle with d=2")


def sphere_costs(n: int, o: WeightOracle) -> np.ndarray:
    """Cost of every labelled sphere, in :func:`labeled_spheres` order."""
    _check_oracle(o)
    triples, idx = _index_table(n)
    c = o.untracked().costs(triples)
    # fixed left-to-right summation in facet order
    total = np.zeros(len(idx))
    for j in range(idx.shape[1]):
        total += c[idx[:, j]]
    return total


def min_spanning_sphere_exact(n: int, o: WeightOracle) -> tuple[PureComplex, float]:
    if not 4 <= n <= COST_LIMIT:
        raise TooLarge(f"exact minimum supports 4 <= n <= {COST_LIMIT}, got {n}")
    costs = sphere_costs(n, o)
    i = int(np.argmin(costs))
    S = PureComplex(2, n, labeled_spheres(n)[i])
    return S, o.untracked().complex_cost(S)


@dataclass(frozen=True)
class PatchabilityQuery:
    H: PureComplex
    n: int
    rho: int
    patch_cost: float
    witness: PureComplex


def patch_exact(H: PureComplex, n: int, o: WeightOracle) -> PatchabilityQuery:
    """Minimum number of facets and minimum cost to add to ``H`` so that the
    union contains a spanning 2-sphere on ``[n]``."""
    if not 4 <= n <= PATCH_LIMIT:
        raise TooLarge(f"exact patching supports 4 <= n <= {PATCH_LIMIT}, got {n}")
    _check_oracle(o)
    if H.d != 2 or any(f[-1] > n for f in H.facets):
        raise HNotSubcomplex(f"H must be a 2-complex on [{n}]")
    triples, idx = _index_table(n)
    c = o.untracked().costs(triples)
    in_h = np.zeros(len(triples), dtype=bool)
    pos = {tuple(t): i for i, t in enumerate(triples.tolist())}
    for f in H.facets:
        in_h[pos[f]] = True
    missing = ~in_h[idx]
    sizes = missing.sum(axis=1)
    costs = np.where(missing, c[idx], 0.0).sum(axis=1)
    rho = int(sizes.min())
    i = int(np.argmin(costs))
    S = PureComplex(2, n, labeled_spheres(n)[i])
    return PatchabilityQuery(H, n, rho, float(costs[i]), S)


def is_sphere(facets, n: int) -> bool:
    return verify(PureComplex(2, n, tuple(facets))).ok
