"""Patching a 2-sphere after some of its facets were removed.

Given a spanning sphere ``S`` and ``H = S - P``, the patch replaces the
missing facets by cheap barycentric subdivisions:

1. cut out a disc around ``Q``, a set of about ``s`` vertices, bounded by
   a short cycle ``C``, and close the hole by a triangulation ``D`` of
   ``C`` without interior vertices; this gives a sphere ``S'`` on the other
   ``n - |Q|`` vertices whose red facets are ``(P ∩ S') ∪ D``;
2. 4-colour the dual graph of ``S'``, split ``Q`` into quarters and
   greedily subdivide each red colour class with free vertices from its
   quarter; the leftover free vertices subdivide green facets from one
   colour class that touches no red facet.

Subdividing ``xyz`` with ``v`` costs ``X = W_xyv + W_yzv + W_xzv``.
Facets matched within one stage are pairwise non-adjacent, so no facet
cost is shared between two candidate subdivisions of a stage.
"""

from __future__ import annotations

import heapq
import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .costs import WeightOracle
from .errors import (EmptyPatch, HNotSubcomplex, NoSeparatorFound, PatchFailed, TooSmall,
                     WitnessNotSphere, WrongModel)
from .simplex import PureComplex, facet_adjacency, simplex, verify

MIN_S = 8
MAX_ROOTS = 20


# ---------------------------------------------------------------------------
# separator


@dataclass(frozen=True)
class SeparatorResult:
    C: tuple  # cycle, in cyclic order
    Q: frozenset  # vertices strictly inside the disc
    s: int
    disc: frozenset  # facets of S with a vertex in Q
    root: int
    length_ok: bool  # |C| <= 28 sqrt(s)
    window_ok: bool  # s/14 <= q <= s

    @property
    def q(self) -> int:
        return len(self.Q)


def _star_index(facets):
    star = defaultdict(list)
    for f in facets:
        for v in f:
            star[v].append(f)
    return star


def _grow_disc(star, root, target, prefer):
    """Grow a disc from the star of ``root`` by absorbing boundary vertices.

    Returns ``(cycle, interior, disc facets)``.  Absorbing ``v`` adds every
    facet at ``v`` outside the disc; it is allowed only when those facets
    form a fan between the two cycle neighbours of ``v`` whose inner
    vertices are new, so the boundary stays a simple cycle.
    """
    disc = set(star[root])
    interior = {root}
    cycle = _cycle_of(root, star[root])
    on_cycle = set(cycle)
    dist = {root: 0}
    for v in cycle:
        dist[v] = 1
    while len(interior) < target:
        best = None
        L = len(cycle)
        for i, v in enumerate(cycle):
            prev, nxt = cycle[i - 1], cycle[(i + 1) % L]
            out = [f for f in star[v] if f not in disc]
            inner = {x for f in out for x in f} - {v, prev, nxt}
            if inner & on_cycle:
                continue
            if L + len(inner) - 1 < 3:
                continue
            bonus = sum(1 for f in out if f in prefer)
            key = (len(inner) - 1 - 2 * bonus, dist[v], v)
            if best is None or key < best[0]:
                best = (key, i, v, prev, nxt, out, inner)
        if best is None:
            break
        _, i, v, prev, nxt, out, inner = best
        path = _fan_path(v, prev, nxt, out)
        cycle = cycle[:i] + path + cycle[i + 1:]
        on_cycle.discard(v)
        on_cycle.update(path)
        for x in path:
            dist.setdefault(x, dist[v] + 1)
        interior.add(v)
        disc.update(out)
    return tuple(cycle), interior, disc


def _cycle_of(v, facets):
    # link of v in cyclic order
    nb = defaultdict(list)
    for f in facets:
        a, b = (x for x in f if x != v)
        nb[a].append(b)
        nb[b].append(a)
    start = min(nb)
    cyc = [start]
    prev, cur = None, start
    while True:
        a, b = nb[cur]
        nxt = a if a != prev else b
        if nxt == start:
            break
        cyc.append(nxt)
        prev, cur = cur, nxt
    return cyc


def _fan_path(v, prev, nxt, out):
    """Inner vertices of the outside link path of ``v`` from ``prev`` to ``nxt``."""
    nb = defaultdict(list)
    for f in out:
        a, b = (x for x in f if x != v)
        nb[a].append(b)
        nb[b].append(a)
    path = []
    last, cur = prev, prev
    while True:
        step = [x for x in nb[cur] if x != last]
        if not step:
            raise NoSeparatorFound(f"outside star of {v} is not a fan")
        last, cur = cur, step[0]
        if cur == nxt:
            return path
        path.append(cur)


def cycle_separator(S: PureComplex, s: int, root: int | None = None, prefer=(),
                    seed=0) -> SeparatorResult:
    """Simple cycle ``C`` separating about ``s`` vertices ``Q`` from the rest.

    The disc around ``Q`` is grown greedily from ``root`` (or from up to
    20 seeded roots in turn), always absorbing the boundary vertex that
    lengthens ``C`` least.  Facets in ``prefer`` count as shortening
    ``C`` by two each, which steers the disc over them.  Growth stops at
    ``q = s``; a result below ``s/14`` is rejected.
    """
    if s < MIN_S:
        raise TooSmall(f"separator needs s >= {MIN_S}, got {s}")
    if S.n <= 2 * s:
        raise TooSmall(f"separator needs n > 2s, got n={S.n}, s={s}")
    star = _star_index(S.facets)
    prefer = frozenset(prefer)
    if root is not None:
        roots = [root]
    else:
        rng = np.random.default_rng(seed)
        pool = sorted({v for f in prefer for v in f}) or S.vertices()
        roots = [int(x) for x in rng.permutation(pool)[:MAX_ROOTS]]
    lo = s / 14
    for r in roots:
        C, interior, disc = _grow_disc(star, r, s, prefer)
        q = len(interior)
        if lo <= q <= s:
            return SeparatorResult(C, frozenset(interior), s, frozenset(disc), r,
                                   len(C) <= 28 * math.sqrt(s), True)
    raise NoSeparatorFound(f"no separator with {lo:.1f} <= q <= {s} from roots {roots}")


def separates(S: PureComplex, sep: SeparatorResult) -> bool:
    """``C`` is a simple cycle of the skeleton and removing it leaves ``Q``
    and the rest in different components, both nonempty."""
    C = sep.C
    edges = S.edges()
    if len(set(C)) != len(C) or len(C) < 3:
        return False
    for i in range(len(C)):
        a, b = C[i], C[(i + 1) % len(C)]
        if (min(a, b), max(a, b)) not in edges:
            return False
    rest = set(S.vertices()) - set(C) - set(sep.Q)
    if not sep.Q or not rest:
        return False
    adj = defaultdict(set)
    for a, b in edges:
        if a in C or b in C:
            continue
        adj[a].add(b)
        adj[b].add(a)
    seen = set(sep.Q)
    stack = list(sep.Q)
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen == set(sep.Q)


# ---------------------------------------------------------------------------
# hole filling


def retriangulate_cycle(C, forbidden=frozenset()) -> PureComplex:
    """Triangulation of the polygon ``C`` without interior vertices.

    A fan from the least vertex id, unless one of its chords is in
    ``forbidden`` (edges that would be doubled); then the fan from another
    vertex, and as a last resort any triangulation found by interval
    dynamic programming.
    """
    C = [int(v) for v in C]
    L = len(C)
    if L < 3:
        raise ValueError(f"cycle needs at least 3 vertices, got {L}")
    n = max(C)
    forbidden = {tuple(sorted(e)) for e in forbidden}

    def chord_ok(a, b):
        return tuple(sorted((a, b))) not in forbidden

    start = C.index(min(C))
    order = sorted(range(L), key=lambda i: (i != start, C[i]))
    for s0 in order:
        rot = C[s0:] + C[:s0]
        if all(chord_ok(rot[0], rot[i]) for i in range(2, L - 1)):
            return PureComplex(2, n, tuple(simplex((rot[0], rot[i], rot[i + 1]))
                                           for i in range(1, L - 1)))
    tris = _dp_triangulation(C, chord_ok)
    if tris is None:
        raise PatchFailed(f"cycle of length {L} has no triangulation avoiding existing edges")
    return PureComplex(2, n, tuple(simplex(t) for t in tris))


def _dp_triangulation(C, chord_ok):
    L = len(C)

    def edge_ok(i, j):
        return j - i == 1 or (i == 0 and j == L - 1) or chord_ok(C[i], C[j])

    @lru_cache(maxsize=None)
    def solve(i, j):
        if j - i < 2:
            return ()
        for k in range(i + 1, j):
            if edge_ok(i, k) and edge_ok(k, j):
                left, right = solve(i, k), solve(k, j)
                if left is not None and right is not None:
                    return left + right + ((C[i], C[k], C[j]),)
        return None

    return solve(0, L - 1)


# ---------------------------------------------------------------------------
# dual colouring


def dual_four_coloring(S: PureComplex) -> dict:
    """Proper colouring (colours ``0..3``) of facets sharing an edge.

    Bipartite dual graphs get two colours; otherwise DSATUR, which on a
    graph of maximum degree 3 never needs more than four.
    """
    adj = facet_adjacency(S)
    col = _two_colour(adj)
    if col is not None:
        return col
    col = {}
    sat = {f: set() for f in adj}
    # lazy max-heap on (saturation, degree, smallest facet first)
    heap = [(0, -len(adj[f]), f) for f in adj]
    heapq.heapify(heap)
    while heap:
        ns, _, f = heapq.heappop(heap)
        if f in col or -ns != len(sat[f]):
            continue
        c = 0
        while c in sat[f]:
            c += 1
        col[f] = c
        for g in adj[f]:
            if g not in col and c not in sat[g]:
                sat[g].add(c)
                heapq.heappush(heap, (-len(sat[g]), -len(adj[g]), g))
    return col


def _two_colour(adj):
    col = {}
    for s in sorted(adj):
        if s in col:
            continue
        col[s] = 0
        stack = [s]
        while stack:
            f = stack.pop()
            for g in adj[f]:
                if g not in col:
                    col[g] = 1 - col[f]
                    stack.append(g)
                elif col[g] == col[f]:
                    return None
    return col


def is_proper(S: PureComplex, col: dict) -> bool:
    adj = facet_adjacency(S)
    return all(col[f] != col[g] for f in adj for g in adj[f])


# ---------------------------------------------------------------------------
# patch


@dataclass
class PatchPlan:
    S_prime: PureComplex
    red: frozenset
    green: frozenset
    coloring: dict
    separator: SeparatorResult
    D: PureComplex
    matching: list = field(default_factory=list)  # (facet, vertex, X, stage)


@dataclass(frozen=True)
class PatchResult:
    patch: PureComplex  # subdivision facets not already in H
    cost: float
    final: PureComplex
    plan: PatchPlan
    k: int
    stage_costs: tuple  # (stage 1, stage 2)

    @property
    def red_bound_ok(self) -> bool:
        return len(self.plan.red) <= self.k + 28 * math.sqrt(self.plan.separator.s)


def subdivision(f, v) -> list:
    x, y, z = f
    return [simplex((x, y, v)), simplex((y, z, v)), simplex((x, z, v))]


def _check_inputs(H, S, o, s):
    if o.model != "facet" or o.d != 2:
        raise WrongModel("patching needs a facet oracle with d=2")
    v = verify(S)
    if not v.ok or not v.spanning:
        raise WitnessNotSphere(f"witness is not a spanning 2-sphere: {v}")
    if H.d != 2 or not H.facet_set <= S.facet_set:
        raise HNotSubcomplex("H is not a subcomplex of the witness")
    P = S.facet_set - H.facet_set
    if not P:
        raise EmptyPatch("H equals the witness, nothing to patch")
    if S.n <= 2 * s:
        raise TooSmall(f"patching needs n > 2s, got n={S.n}, s={s}")
    return P


def patch_2sphere(H: PureComplex, S: PureComplex, o: WeightOracle, s: int, seed=0,
                  steer: bool = False) -> PatchResult:
    """Greedy patch of ``H`` inside the witness sphere ``S``.

    With ``steer`` the separator disc is grown preferentially over the
    missing facets, which then vanish with ``Q`` instead of being red.
    """
    P = _check_inputs(H, S, o, s)
    rng = np.random.default_rng(seed)
    sep = cycle_separator(S, s, prefer=P if steer else (), seed=rng)
    outside = S.facet_set - sep.disc
    out_edges = {e for f in outside for e in ((f[0], f[1]), (f[0], f[2]), (f[1], f[2]))}
    D = retriangulate_cycle(sep.C, forbidden=out_edges)
    Sp = PureComplex(2, S.n, tuple(sorted(outside | D.facet_set)))
    red = frozenset((P & outside) | D.facet_set)
    green = frozenset(outside - red)
    col = dual_four_coloring(Sp)
    plan = PatchPlan(Sp, red, green, col, sep, D)

    u = o.untracked()

    def X(f, v):
        return math.fsum(u.cost(t) for t in subdivision(f, v))

    # stage 1: red colour class i against its own share of a shuffled Q;
    # each share first covers its class, the surplus is dealt round-robin
    Q = sorted(sep.Q)
    classes = [sorted(f for f in red if col[f] == i) for i in range(4)]
    if len(red) > len(Q):
        raise PatchFailed(f"{len(red)} red facets but only {len(Q)} free vertices")
    order = [Q[i] for i in rng.permutation(len(Q))]
    quarters = []
    pos = 0
    for c in classes:
        quarters.append(order[pos:pos + len(c)])
        pos += len(c)
    for j, v in enumerate(order[pos:]):
        quarters[j % 4].append(v)
    quarters = [sorted(x) for x in quarters]
    used = set()
    stage1 = []
    for i in range(4):
        free = list(quarters[i])
        for f in classes[i]:
            x, v = min((X(f, v), v) for v in free)
            free.remove(v)
            used.add(v)
            plan.matching.append((f, v, x, 1))
            stage1.append(x)

    # stage 2: leftover free vertices into G0
    by_colour = defaultdict(list)
    for f in green:
        by_colour[col[f]].append(f)
    g1 = max(by_colour.values(), key=lambda fs: (len(fs), -min(col[f] for f in fs)))
    red_edges = {e for f in red for e in ((f[0], f[1]), (f[0], f[2]), (f[1], f[2]))}
    g0 = sorted(f for f in g1 if not {(f[0], f[1]), (f[0], f[2]), (f[1], f[2])} & red_edges)
    left = [v for v in Q if v not in used]
    if len(g0) < len(left):
        raise PatchFailed(f"G0 has {len(g0)} facets for {len(left)} leftover vertices")
    avail = list(g0)
    stage2 = []
    for v in left:
        x, f = min((X(f, v), f) for f in avail)
        avail.remove(f)
        plan.matching.append((f, v, x, 2))
        stage2.append(x)

    matched = {f for f, _, _, _ in plan.matching}
    new = [t for f, v, _, _ in plan.matching for t in subdivision(f, v)]
    final = PureComplex(2, S.n, tuple(sorted((Sp.facet_set - matched) | set(new))))
    vf = verify(final)
    if not vf.ok or not vf.spanning:
        raise PatchFailed(f"patched complex is not a spanning sphere: {vf}")
    patch = sorted(set(new) - H.facet_set)
    cost = math.fsum(u.cost(t) for t in patch)
    return PatchResult(PureComplex(2, S.n, tuple(patch)), cost, final, plan, len(P),
                       (math.fsum(stage1), math.fsum(stage2)))


def trivial_patch_cost(H: PureComplex, S: PureComplex, o: WeightOracle) -> float:
    """Cost of putting the missing facets back."""
    u = o.untracked()
    return math.fsum(u.cost(f) for f in S.facet_set - H.facet_set)


def patch_s(k: int, n: int) -> int:
    """``ceil(k^(3/4) n^(1/4))``."""
    return math.ceil(k ** 0.75 * n ** 0.25 - 1e-12)
