"""Locally constructible (LC) complexes.

Two moves grow a pure ``D``-complex one step at a time:

* ``Attach(ridge, v)`` glues a new simplex ``ridge + {v}`` along a boundary
  ridge, ``v`` being a fresh vertex;
* ``Identify(a, b)`` glues two boundary ridges that share ``D - 1``
  vertices.  The two unshared vertices are merged (the smaller id
  survives).  Any other pair of boundary ridges that the merge makes equal
  is glued along with it.

A trace is an initial simplex plus a list of moves.  Replaying it either
closes the complex up (empty boundary: the complex itself is an LC sphere)
or leaves an LC ball whose boundary is the certified sphere.  Cone spheres
use the second form: the fan disc over a cycle is LC, and coning every move
of its trace gives an LC ball whose boundary is the pole-cycle sphere.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import (InvalidCycle, InvalidFacetCount, LcMoveError, RidgeNotOnBoundary,
                     RidgesNotAdjacent, SamplingFailed, WouldDegenerate)
from .simplex import (Outcome, PureComplex, SphereVerdict, boundary_complex, simplex,
                      verify)


@dataclass(frozen=True)
class Attach:
    ridge: tuple
    vertex: int

    def __post_init__(self):
        object.__setattr__(self, "ridge", simplex(self.ridge))
        object.__setattr__(self, "vertex", int(self.vertex))

    def coned(self, z: int) -> "Attach":
        return Attach(self.ridge + (z,), self.vertex)


@dataclass(frozen=True)
class Identify:
    a: tuple
    b: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", simplex(self.a))
        object.__setattr__(self, "b", simplex(self.b))

    def coned(self, z: int) -> "Identify":
        return Identify(self.a + (z,), self.b + (z,))


LcMove = Attach | Identify


class LcState:
    """Mutable growing complex with its boundary ridges.

    ``ridges`` counts, for every ridge, the facets containing it; the
    boundary is the set of ridges with count 1.  ``merged`` maps every
    vertex id that disappeared in an identification to its survivor.
    """

    def __init__(self, init):
        init = simplex(init)
        self.D = len(init) - 1
        if self.D < 1:
            raise WouldDegenerate("an LC complex needs simplices of dimension >= 1")
        self.facets: set = {init}
        self.ridges: Counter = Counter(combinations(init, self.D))
        self.star: dict = defaultdict(set)
        for v in init:
            self.star[v].add(init)
        self.merged: dict = {}
        self.implicit = 0

    def copy(self) -> "LcState":
        out = LcState.__new__(LcState)
        out.D = self.D
        out.facets = set(self.facets)
        out.ridges = Counter(self.ridges)
        out.star = defaultdict(set, {v: set(s) for v, s in self.star.items()})
        out.merged = dict(self.merged)
        out.implicit = self.implicit
        return out

    def find(self, v: int) -> int:
        while v in self.merged:
            v = self.merged[v]
        return v

    @property
    def boundary(self) -> set:
        return {r for r, c in self.ridges.items() if c == 1}

    def is_closed(self) -> bool:
        return all(c != 1 for c in self.ridges.values())

    def complex(self, n: int | None = None) -> PureComplex:
        used = max((max(f) for f in self.facets), default=0)
        return PureComplex(self.D, used if n is None else n, tuple(self.facets))

    # -- moves

    def _check_boundary(self, r) -> None:
        if len(r) != self.D:
            raise RidgeNotOnBoundary(f"{r} is not a ridge of a {self.D}-complex")
        if self.ridges.get(r, 0) != 1:
            raise RidgeNotOnBoundary(f"ridge {r} is not on the boundary")

    def attach(self, ridge, v: int) -> None:
        r = simplex(ridge)
        self._check_boundary(r)
        if self.star.get(v):
            raise WouldDegenerate(f"attached vertex {v} is already in use")
        f = simplex(r + (v,))
        self.facets.add(f)
        self.ridges.update(combinations(f, self.D))
        for u in f:
            self.star[u].add(f)

    def identify(self, a, b) -> int:
        """Glue ridges ``a`` and ``b``; returns the number of ridge pairs glued."""
        a, b = simplex(a), simplex(b)
        self._check_boundary(a)
        self._check_boundary(b)
        if a == b:
            raise RidgesNotAdjacent("cannot identify a ridge with itself")
        x = set(a) - set(b)
        y = set(b) - set(a)
        if len(x) != 1:
            raise RidgesNotAdjacent(f"ridges {a} and {b} do not share a (d-2)-face")
        (x,), (y,) = x, y
        keep, gone = min(x, y), max(x, y)
        moving = sorted(self.star.get(gone, ()))
        for f in moving:
            if keep in f:
                raise WouldDegenerate(f"facet {f} would contain merged vertex {keep} twice")
        new = [simplex(keep if u == gone else u for u in f) for f in moving]
        if len(set(new)) != len(new) or any(g in self.facets for g in new):
            raise WouldDegenerate("merge would duplicate a facet")
        delta = Counter()
        for f, g in zip(moving, new):
            delta.subtract(combinations(f, self.D))
            delta.update(combinations(g, self.D))
        before = sum(1 for r in delta if self.ridges.get(r, 0) == 1)
        for r, c in delta.items():
            if self.ridges.get(r, 0) + c > 2:
                raise WouldDegenerate(f"ridge {r} would lie in more than two facets")
        # commit
        for f, g in zip(moving, new):
            self.facets.discard(f)
            self.facets.add(g)
            for u in f:
                self.star[u].discard(f)
            for u in g:
                self.star[u].add(g)
        for r, c in delta.items():
            k = self.ridges.get(r, 0) + c
            if k:
                self.ridges[r] = k
            else:
                self.ridges.pop(r, None)
        self.star.pop(gone, None)
        self.merged[gone] = keep
        after = sum(1 for r in delta if self.ridges.get(r, 0) == 1)
        glued = max(1, (before - after) // 2)
        self.implicit += glued - 1
        return glued

    def apply(self, move) -> int:
        if isinstance(move, Attach):
            self.attach(move.ridge, move.vertex)
            return 0
        return self.identify(move.a, move.b)


def lc_apply(s: LcState, m) -> LcState:
    """Return a new state with ``m`` applied; ``s`` is left untouched."""
    out = s.copy()
    out.apply(m)
    return out


# ---------------------------------------------------------------------------
# traces


@dataclass(frozen=True)
class LcTrace:
    """``d`` is the dimension of the trace simplices."""

    d: int
    init: tuple
    moves: tuple
    n: int | None = None

    def replay(self) -> LcState:
        s = LcState(self.init)
        if s.D != self.d:
            raise WouldDegenerate(f"initial simplex {self.init} is not {self.d}-dimensional")
        for m in self.moves:
            s.apply(m)
        return s

    def final_complex(self) -> PureComplex:
        return self.replay().complex(self.n)


def certified_sphere(trace: LcTrace) -> PureComplex:
    """The sphere a trace certifies: the closed complex itself, or the
    boundary of the LC ball it builds."""
    s = trace.replay()
    K = s.complex()
    S = K if s.is_closed() else boundary_complex(K)
    S = S.compact()
    if trace.n is not None and trace.n >= S.n:
        S = PureComplex(S.d, trace.n, S.facets)
    return S


def _closed_pseudomanifold(K: PureComplex) -> str | None:
    if not K.facets:
        return "empty"
    counts = Counter(r for f in K.facets for r in combinations(f, K.d))
    for r, c in counts.items():
        if c != 2:
            return f"ridge {r} lies in {c} facets"
    return None


def certify(trace: LcTrace, n: int | None = None) -> SphereVerdict:
    """Replay ``trace`` and report ``CertifiedLC`` if it yields an LC sphere."""
    try:
        S = certified_sphere(trace)
    except Exception as exc:  # noqa: BLE001 - any replay failure voids the certificate
        return SphereVerdict(Outcome.NOT_SPHERE, f"replay failed: {exc}", False)
    n = S.n if n is None else n
    used = {v for f in S.facets for v in f}
    spanning = len(used) == n and max(used, default=0) <= n
    why = _closed_pseudomanifold(S)
    if why is None and S.d in (2, 3):
        v = verify(S)
        why = None if v.ok else v.reason
    if why:
        return SphereVerdict(Outcome.NOT_SPHERE, why, spanning)
    return SphereVerdict(Outcome.CERTIFIED_LC, None, spanning)


def _fmt(vs) -> str:
    return " ".join(str(v) for v in vs)


def dumps_trace(t: LcTrace) -> str:
    lines = [f"lc d={t.d}", f"init {_fmt(t.init)}"]
    for m in t.moves:
        if isinstance(m, Attach):
            lines.append(f"attach {_fmt(m.ridge)}|{m.vertex}")
        else:
            lines.append(f"identify {_fmt(m.a)}|{_fmt(m.b)}")
    return "\n".join(lines) + "\n"


def loads_trace(text: str) -> LcTrace:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("lc d="):
        raise ValueError("trace must start with 'lc d=<int>'")
    d = int(lines[0].split("=", 1)[1])
    if len(lines) < 2 or not lines[1].startswith("init "):
        raise ValueError("second trace line must be 'init <vertices>'")
    init = tuple(int(v) for v in lines[1][5:].split())
    moves = []
    for ln in lines[2:]:
        kind, _, rest = ln.partition(" ")
        left, sep, right = rest.partition("|")
        if not sep:
            raise ValueError(f"malformed move line {ln!r}")
        lv = [int(v) for v in left.split()]
        rv = [int(v) for v in right.split()]
        if kind == "attach":
            if len(rv) != 1:
                raise ValueError(f"attach takes one new vertex: {ln!r}")
            moves.append(Attach(tuple(lv), rv[0]))
        elif kind == "identify":
            moves.append(Identify(tuple(lv), tuple(rv)))
        else:
            raise ValueError(f"unknown move {kind!r}")
    return LcTrace(d, init, tuple(moves))


# ---------------------------------------------------------------------------
# cone spheres


def cone_trace(trace: LcTrace, z: int) -> LcTrace:
    """Cone every step of ``trace`` with apex ``z``."""
    return LcTrace(trace.d + 1, simplex(trace.init + (z,)),
                   tuple(m.coned(z) for m in trace.moves), trace.n)


def fan_trace(cycle, apex: int, fresh: int) -> LcTrace:
    """LC trace of the disc ``apex * cycle``: a chain of attachments and one
    closing identification through the temporary vertex ``fresh``."""
    c = [int(v) for v in cycle]
    moves = [Attach((apex, c[i - 1]), c[i]) for i in range(2, len(c))]
    moves.append(Attach((apex, c[-1]), fresh))
    moves.append(Identify((apex, fresh), (apex, c[0])))
    return LcTrace(2, simplex((apex, c[0], c[1])), tuple(moves))


def lc_trace_for_cone_sphere(cycle, d: int) -> LcTrace:
    """Trace of the LC ball ``Cone^d(cycle)`` on poles ``1..d``; its boundary
    is the pole-cycle sphere of ``cycle``."""
    c = [int(v) for v in cycle]
    if len(c) < 3:
        raise InvalidCycle(f"cycle must have at least 3 vertices, got {len(c)}")
    if any(v <= d for v in c) or len(set(c)) != len(c):
        raise InvalidCycle(f"cycle {c} must be distinct ids above the poles 1..{d}")
    n = max(max(c), d)
    t = fan_trace(c, d, n + 1)
    for z in range(d - 1, 0, -1):
        t = cone_trace(t, z)
    return LcTrace(t.d, t.init, t.moves, n)


# ---------------------------------------------------------------------------
# random LC 2-spheres


def _dyck_by_cycle_lemma(k: int, rng) -> np.ndarray:
    """Uniform word of ``k`` up-steps (+1) and ``k + 1`` down-steps whose only
    negative prefix is the full word (a Lukasiewicz word for binary trees)."""
    steps = np.array([1] * k + [-1] * (k + 1))
    rng.shuffle(steps)
    prefix = np.cumsum(steps)
    start = int(np.argmin(prefix)) + 1
    return np.roll(steps, -start)


def random_polygon_triangulation(m: int, rng) -> list[tuple[int, int, int]]:
    """Uniform triangulation of the polygon ``0..m+1`` into ``m`` triangles."""
    word = _dyck_by_cycle_lemma(m, rng)
    # preorder binary tree: +1 internal node, -1 leaf; find left-subtree sizes
    children = []
    stack = []
    nodes = []  # (is_internal)
    for s in word:
        idx = len(nodes)
        nodes.append(s == 1)
        children.append([])
        if stack:
            parent = stack[-1]
            children[parent].append(idx)
            if len(children[parent]) == 2:
                stack.pop()
        if s == 1:
            stack.append(idx)
    leaves = [0] * len(nodes)
    for i in range(len(nodes) - 1, -1, -1):
        leaves[i] = 1 if not nodes[i] else leaves[children[i][0]] + leaves[children[i][1]]
    triangles = []
    work = [(0, 0, m + 1)]
    while work:
        node, i, j = work.pop()
        if not nodes[node]:
            continue
        left, right = children[node]
        k = i + leaves[left]
        triangles.append((i, k, j))
        work.append((left, i, k))
        work.append((right, k, j))
    return triangles


def random_noncrossing_matching(k: int, rng) -> list[tuple[int, int]]:
    """Uniform non-crossing perfect matching of ``0..2k-1``."""
    word = _dyck_by_cycle_lemma(k, rng)[:-1]
    pairs = []
    stack = []
    for i, s in enumerate(word):
        if s == 1:
            stack.append(i)
        else:
            pairs.append((stack.pop(), i))
    return sorted(pairs)


def _glue(m: int, matching) -> tuple[list, int]:
    """Vertex classes of the polygon ``0..m+1`` after gluing edge ``i``
    (from ``i`` to ``i+1``) to its partner with reversed orientation."""
    parent = list(range(m + 2))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    L = m + 2
    for i, j in matching:
        for a, b in ((i, (j + 1) % L), ((i + 1) % L, j)):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    roots = [find(v) for v in range(L)]
    return roots, len(set(roots))


def _tree_state(tri):
    """Attach the triangles of a polygon triangulation one by one (BFS order
    over the dual tree)."""
    by_edge = defaultdict(list)
    for i, t in enumerate(tri):
        for e in combinations(t, 2):
            by_edge[e].append(i)
    order, parent_edge, queue = [0], {0: None}, [0]
    for i in queue:
        for e in combinations(tri[i], 2):
            for j in by_edge[e]:
                if j not in parent_edge:
                    parent_edge[j] = e
                    order.append(j)
                    queue.append(j)
    state = LcState(tri[0])
    moves = []
    for j in order[1:]:
        e = parent_edge[j]
        (v,) = set(tri[j]) - set(e)
        mv = Attach(e, v)
        state.apply(mv)
        moves.append(mv)
    return state, moves


def _lc_replay_matching(triangles, matching, m: int):
    """Relabel so that class minima become ``1..n`` and replay the matching
    as LC moves.  Raises an :class:`LcMoveError` on degeneracy."""
    L = m + 2
    roots, n = _glue(m, matching)
    rep_rank = {r: i + 1 for i, r in enumerate(sorted(set(roots)))}
    label = [0] * L
    extra = n
    seen = set()
    for v in range(L):
        r = roots[v]
        if r not in seen:
            seen.add(r)
            label[v] = rep_rank[r]
        else:
            extra += 1
            label[v] = extra
    tri = [simplex(label[v] for v in t) for t in triangles]
    state, moves = _tree_state(tri)
    partner = {}
    for i, j in matching:
        partner[i] = j
        partner[j] = i
    stack = []
    for e in range(L):
        if stack and partner[e] == stack[-1]:
            i = stack.pop()
            ea = simplex(state.find(label[v]) for v in (i, (i + 1) % L))
            eb = simplex(state.find(label[v]) for v in (e, (e + 1) % L))
            if ea == eb and state.ridges.get(ea, 0) == 2:
                continue  # already glued as a side effect of an earlier merge
            mv = Identify(ea, eb)
            state.apply(mv)
            moves.append(mv)
        else:
            stack.append(e)
    return state, LcTrace(2, tri[0], tuple(moves), n), n


UNIFORM_LIMIT = 10


def sample_lc_2sphere(m: int, seed, retries: int | None = None, method: str = "auto"):
    """Random LC 2-sphere with ``m`` facets, returned with its trace.

    ``method="uniform"`` glues a uniform polygon triangulation along a
    uniform non-crossing matching and rejects degenerate outcomes (default
    budget 1000 attempts: only about 3% of gluings are simplicial at m=8,
    and essentially none beyond m=20).  ``method="sequential"`` keeps the
    uniform triangulated polygon but glues random pairs of adjacent
    boundary edges one at a time, skipping gluings that would break
    simpliciality (budget 100 restarts).  ``"auto"`` uses the first for
    ``m <= 10``.  Neither is uniform over spheres.
    """
    if m % 2 or m < 4:
        raise InvalidFacetCount(f"facet count must be even and >= 4, got {m}")
    if method not in ("auto", "uniform", "sequential"):
        raise ValueError(f"unknown method {method!r}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if method == "auto":
        method = "uniform" if m <= UNIFORM_LIMIT else "sequential"
    if retries is None:
        retries = 1000 if method == "uniform" else 100
    for _ in range(retries):
        triangles = random_polygon_triangulation(m, rng)
        try:
            if method == "uniform":
                matching = random_noncrossing_matching((m + 2) // 2, rng)
                state, trace, n = _lc_replay_matching(triangles, matching, m)
            else:
                state, trace = _sequential_fold(triangles, m, rng)
        except LcMoveError:
            continue
        if not state.is_closed():
            continue
        K = state.complex().compact()
        if verify(K).outcome is Outcome.SPHERE2 and K.n == m // 2 + 2:
            return K, trace
    raise SamplingFailed(f"no simplicial sphere with {m} facets after {retries} attempts")


def _sequential_fold(triangles, m: int, rng):
    """Glue random pairs of boundary edges that share a vertex until the
    disc closes up, skipping pairs whose gluing would be degenerate."""
    tri = [simplex(v + 1 for v in t) for t in triangles]
    state, moves = _tree_state(tri)
    while not state.is_closed():
        at = defaultdict(list)
        bd = sorted(state.boundary)
        for e in bd:
            for v in e:
                at[v].append(e)
        done = False
        for idx in rng.permutation(len(bd)):
            e = bd[idx]
            cands = [f for v in e for f in at[v] if f != e]
            for k in rng.permutation(len(cands)):
                f = cands[k]
                try:
                    state.identify(e, f)  # validates before mutating
                except LcMoveError:
                    continue
                moves.append(Identify(e, f))
                done = True
                break
            if done:
                break
        if not done:
            raise WouldDegenerate("no admissible gluing left")
    return state, LcTrace(2, tri[0], tuple(moves))
