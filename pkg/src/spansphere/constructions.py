"""Explicit cheap spanning spheres.

* Pole-cycle spheres: poles ``1..d`` and a cycle ``C`` on ``d+1..n``; the
  facets are ``{poles} - {p} + {x, y}`` for each cycle edge ``xy`` and each
  pole ``p``.  The identity cycle gives the reference sphere ``s_star(n, d)``.
  Choosing ``C`` is a travelling-salesman problem with pair costs
  ``w_xy`` equal to the sum of the ``d`` facet costs charged to ``xy``.
* Tight-path spheres for the edge-cost model: start from the tetrahedron
  ``1234`` and repeatedly subdivide the newest face with the cheapest
  unused vertex of the right residue class mod 4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .costs import GOLDEN, WeightOracle, _mix, _to_unit, cost2
from .errors import InvalidCycle, TooFewVertices, TooSmall, WrongModel
from .simplex import PureComplex
from .tsp import hamilton_heuristic


@dataclass(frozen=True)
class PoleCycleSphere:
    poles: tuple
    cycle: tuple
    complex: PureComplex

    @property
    def d(self) -> int:
        return len(self.poles)

    @property
    def n(self) -> int:
        return self.complex.n

    def cycle_edges(self) -> list[tuple[int, int]]:
        c = self.cycle
        return [tuple(sorted((c[i], c[(i + 1) % len(c)]))) for i in range(len(c))]


def _pole_cycle_facets(poles, cycle):
    L = len(cycle)
    facets = []
    for i in range(L):
        x, y = cycle[i], cycle[(i + 1) % L]
        for p in poles:
            facets.append(tuple(q for q in poles if q != p) + (x, y))
    return facets


def sphere_from_cycle(cycle, d: int, n: int | None = None) -> PoleCycleSphere:
    """The pole-cycle sphere with poles ``1..d`` for a cyclic order of ``d+1..n``."""
    cyc = tuple(int(v) for v in cycle)
    if len(cyc) < 3:
        raise InvalidCycle(f"cycle must have at least 3 vertices, got {len(cyc)}")
    if any(v <= d for v in cyc):
        raise InvalidCycle(f"cycle {cyc} touches pole ids 1..{d}")
    if n is None:
        n = d + len(cyc)
    if sorted(cyc) != list(range(d + 1, n + 1)):
        raise InvalidCycle(f"cycle must be a permutation of {d + 1}..{n}")
    poles = tuple(range(1, d + 1))
    K = PureComplex(d, n, tuple(_pole_cycle_facets(poles, cyc)))
    return PoleCycleSphere(poles, cyc, K)


def s_star(n: int, d: int) -> PoleCycleSphere:
    if n < d + 3:
        raise TooFewVertices(f"s_star needs n >= d + 3, got n={n}, d={d}")
    return sphere_from_cycle(range(d + 1, n + 1), d, n)


@njit(cache=True)
def _pole_table(key, n, d):
    # facets {poles} - {p} + {x, y} are sorted as (poles..., x, y), so the
    # hash state after the poles is shared by every pair
    m = n - d
    golden = np.uint64(GOLDEN)
    prefix = np.empty(d, np.uint64)
    for skip in range(1, d + 1):
        h = key ^ (np.uint64(d + 1) * golden)
        for p in range(1, d + 1):
            if p != skip:
                h = _mix(h ^ (np.uint64(p) + golden))
        prefix[skip - 1] = h
    w = np.zeros((m, m))
    hx = np.empty(d, np.uint64)
    for i in range(m):
        x = np.uint64(d + 1 + i)
        for t in range(d):
            hx[t] = _mix(prefix[t] ^ (x + golden))
        for j in range(i + 1, m):
            y = np.uint64(d + 1 + j)
            s = 0.0
            for t in range(d):
                s += _to_unit(_mix(hx[t] ^ (y + golden)))
            w[i, j] = s
            w[j, i] = s
    return w


def pole_edge_costs(o: WeightOracle, n: int, d: int) -> np.ndarray:
    """Symmetric table ``w`` with ``w[i, j] = w_xy`` for ``x = d+1+i``, ``y = d+1+j``.

    Each entry is the sum of the ``d`` facet costs ``W[{poles} - {p} + {x, y}]``.
    The diagonal is zero.  Queries are not logged.
    """
    if o.model != "facet" or o.d != d:
        raise WrongModel(f"pole edge costs need a facet oracle with d={d}")
    return _pole_table(o.ukey, n, d)


def _facet_cost_sum(o: WeightOracle, facets) -> float:
    return math.fsum(o.untracked().costs(np.array(facets, dtype=np.int64)))


def build_cone_sphere(n: int, d: int, o: WeightOracle, method: str = "greedy2opt"):
    """Cheapest pole-cycle sphere found by the chosen Hamilton heuristic.

    Returns ``(sphere, cost)``; ``cost`` is the exact ``fsum`` of the facet
    costs, which equals the tour length under ``w`` summed facet by facet.
    """
    if n < d + 3:
        raise TooFewVertices(f"need n >= d + 3, got n={n}, d={d}")
    if o.model != "facet" or o.d != d:
        raise WrongModel(f"cone spheres need a facet oracle with d={d}")
    w = pole_edge_costs(o, n, d)
    tour = hamilton_heuristic(w, method)
    sphere = sphere_from_cycle([d + 1 + t for t in tour], d, n)
    return sphere, _facet_cost_sum(o, sphere.complex.facets)


def tour_facet_cost(o: WeightOracle, sphere: PoleCycleSphere) -> float:
    """Cost of ``sphere`` accumulated edge by edge along its cycle."""
    poles = sphere.poles
    facets = []
    for x, y in sphere.cycle_edges():
        facets.extend(tuple(q for q in poles if q != p) + (x, y) for p in poles)
    return _facet_cost_sum(o, facets)


# ---------------------------------------------------------------------------
# tight path (edge-cost model)


@njit(cache=True)
def _tight_path(key, n):
    # classes by residue: class r holds j with j % 4 == r (class 0 is V_4)
    pools = np.zeros((4, n // 4 + 2), np.int64)
    sizes = np.zeros(4, np.int64)
    for j in range(5, n + 1):
        r = j % 4
        pools[r, sizes[r]] = j
        sizes[r] += 1
    word = np.empty(n, np.int64)
    for i in range(4):
        word[i] = i + 1
    z = np.zeros(n)
    # exact number of pair queries: 6 for the tetrahedron, 3 per candidate
    total = 6
    left = sizes.copy()
    for i in range(5, n + 1):
        total += 3 * left[i % 4]
        left[i % 4] -= 1
    log = np.empty((total, 2), np.int64)
    nq = 0
    # tetrahedron 1234
    for b in range(2, 5):
        s = 0.0
        for a in range(1, b):
            s += cost2(key, a, b)
            log[nq, 0] = a
            log[nq, 1] = b
            nq += 1
        z[b - 1] = s
    for i in range(5, n + 1):
        r = i % 4
        a1 = word[i - 4]
        a2 = word[i - 3]
        a3 = word[i - 2]
        best = np.inf
        bidx = -1
        bu = -1
        for t in range(sizes[r]):
            u = pools[r, t]
            s = 0.0
            for a in (a1, a2, a3):
                if a < u:
                    s += cost2(key, a, u)
                    log[nq, 0] = a
                    log[nq, 1] = u
                else:
                    s += cost2(key, u, a)
                    log[nq, 0] = u
                    log[nq, 1] = a
                nq += 1
            if s < best or (s == best and u < bu):
                best = s
                bidx = t
                bu = u
        word[i - 1] = bu
        z[i - 1] = best
        sizes[r] -= 1
        pools[r, bidx] = pools[r, sizes[r]]
    return word, z, log[:nq]


def tight_path_facets(word) -> list[tuple]:
    """Facets of the sphere encoded by ``word`` (tetrahedron then stacked faces)."""
    v = [int(x) for x in word]
    faces = {tuple(sorted(f)) for f in
             ((v[0], v[1], v[2]), (v[0], v[1], v[3]), (v[0], v[2], v[3]), (v[1], v[2], v[3]))}
    for i in range(4, len(v)):
        a, b, c, u = v[i - 3], v[i - 2], v[i - 1], v[i]
        faces.remove(tuple(sorted((a, b, c))))
        faces.update({tuple(sorted((a, b, u))), tuple(sorted((a, c, u))), tuple(sorted((b, c, u)))})
    return sorted(faces)


@dataclass(frozen=True)
class TightPath:
    complex: PureComplex
    word: tuple
    step_costs: np.ndarray  # Z_1..Z_n
    cost: float


def tight_path_sphere(n: int, o: WeightOracle) -> TightPath:
    """Greedy stacked sphere for the edge model; every queried pair is logged."""
    if n < 8:
        raise TooSmall(f"tight path needs n >= 8, got {n}")
    if o.model != "edge" or o.d != 2:
        raise WrongModel("tight path needs an edge oracle with d=2")
    word, z, log = _tight_path(o.ukey, n)
    if o.log is not None:
        o.log.record(log)
    K = PureComplex(2, n, tuple(tight_path_facets(word)))
    return TightPath(K, tuple(int(x) for x in word), z, math.fsum(z))


def tight_path_blocks(step_costs, n: int | None = None):
    """Block sums of the step costs.

    ``k`` is the smallest multiple of 4 with ``k*k >= n``; block ``j``
    collects steps ``s`` with ``j*k <= n - s < (j+1)*k``.  Returns
    ``(k, sums, thresholds)`` where ``thresholds[j] = 25 k (j k / 4)^(-1/3)``
    for ``j >= 1`` and ``thresholds[0] = k``.
    """
    z = np.asarray(step_costs, dtype=float)
    n = len(z) if n is None else n
    k = 4
    while k * k < n:
        k += 4
    s = np.arange(1, n + 1)
    j = (n - s) // k
    sums = np.bincount(j, weights=z, minlength=k + 1)
    thr = np.empty_like(sums)
    thr[0] = k
    jj = np.arange(1, len(sums))
    thr[1:] = 25 * k * (jj * k / 4.0) ** (-1.0 / 3.0)
    return k, sums, thr
