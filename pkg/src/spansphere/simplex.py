"""Canonical simplices, pure complexes and sphere verification.

A simplex is a strictly increasing tuple of positive vertex ids.  A
:class:`PureComplex` is an immutable set of such tuples, all of the same
size ``d + 1``, stored in sorted order so that equality, hashing and
iteration are deterministic.
"""

from __future__ import annotations

import enum
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .errors import ConeVertexClash, InvalidComplex, UnsupportedDimension

Simplex = tuple  # tuple[int, ...], strictly increasing


def simplex(vertices: Iterable[int]) -> Simplex:
    """Return the canonical (sorted) form of a vertex collection."""
    s = tuple(sorted(int(v) for v in vertices))
    for a, b in zip(s, s[1:]):
        if a == b:
            raise InvalidComplex(f"repeated vertex {a} in simplex {s}")
    if s and s[0] < 1:
        raise InvalidComplex(f"vertex ids must be positive, got {s}")
    return s


@dataclass(frozen=True)
class PureComplex:
    """A pure ``d``-dimensional complex on the vertex range ``1..n``.

    ``facets`` may be given as any iterable of vertex collections; it is
    canonicalised to a sorted tuple of sorted tuples.
    """

    d: int
    n: int
    facets: tuple = field(default=())

    def __post_init__(self):
        canon = sorted(simplex(f) for f in self.facets)
        for f in canon:
            if len(f) != self.d + 1:
                raise InvalidComplex(f"facet {f} does not have {self.d + 1} vertices")
            if f[-1] > self.n:
                raise InvalidComplex(f"facet {f} uses a vertex above n={self.n}")
        for a, b in zip(canon, canon[1:]):
            if a == b:
                raise InvalidComplex(f"duplicate facet {a}")
        object.__setattr__(self, "facets", tuple(canon))

    @classmethod
    def from_facets(cls, facets: Iterable[Iterable[int]], d: int | None = None,
                    n: int | None = None) -> "PureComplex":
        fs = [simplex(f) for f in facets]
        if d is None:
            if not fs:
                raise InvalidComplex("cannot infer the dimension of an empty complex")
            d = len(fs[0]) - 1
        if n is None:
            n = max((f[-1] for f in fs), default=0)
        return cls(d, n, tuple(fs))

    def __len__(self) -> int:
        return len(self.facets)

    def __iter__(self):
        return iter(self.facets)

    def __contains__(self, item) -> bool:
        return simplex(item) in self.facet_set

    @property
    def facet_set(self) -> frozenset:
        fs = self.__dict__.get("_facet_set")
        if fs is None:
            fs = frozenset(self.facets)
            object.__setattr__(self, "_facet_set", fs)
        return fs

    @property
    def m(self) -> int:
        return len(self.facets)

    def vertices(self) -> list[int]:
        return sorted({v for f in self.facets for v in f})

    def faces(self, k: int) -> set:
        """All ``k``-dimensional faces of the downward closure."""
        if k > self.d or k < 0:
            return set()
        return {c for f in self.facets for c in combinations(f, k + 1)}

    def edges(self) -> set:
        return self.faces(1)

    def with_facets(self, facets: Iterable[Iterable[int]], n: int | None = None) -> "PureComplex":
        return PureComplex(self.d, self.n if n is None else n, tuple(facets))

    def union(self, other: "PureComplex") -> "PureComplex":
        if other.d != self.d:
            raise InvalidComplex("cannot unite complexes of different dimension")
        return PureComplex(self.d, max(self.n, other.n), tuple(self.facet_set | other.facet_set))

    def difference(self, other: "PureComplex") -> "PureComplex":
        return PureComplex(self.d, self.n, tuple(self.facet_set - other.facet_set))

    def relabel(self, mapping, n: int | None = None) -> "PureComplex":
        """Apply a vertex map (dict or callable); ``n`` defaults to the max image."""
        f = mapping if callable(mapping) else mapping.__getitem__
        facets = [tuple(f(v) for v in s) for s in self.facets]
        if n is None:
            n = max((max(s) for s in facets), default=self.n)
        return PureComplex(self.d, n, tuple(facets))

    def compact(self) -> "PureComplex":
        """Relabel the used vertices densely to ``1..n'`` preserving order."""
        mapping = {v: i + 1 for i, v in enumerate(self.vertices())}
        return self.relabel(mapping, n=len(mapping))


# ---------------------------------------------------------------------------
# text format


def dumps(K: PureComplex) -> str:
    lines = [f"d={K.d} n={K.n}"]
    lines.extend(" ".join(str(v) for v in f) for f in K.facets)
    return "\n".join(lines) + "\n"


def loads(text: str) -> PureComplex:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise InvalidComplex("empty complex file")
    header = dict(tok.split("=", 1) for tok in lines[0].split())
    try:
        d, n = int(header["d"]), int(header["n"])
    except (KeyError, ValueError) as exc:
        raise InvalidComplex(f"bad header line {lines[0]!r}") from exc
    facets = [tuple(int(t) for t in ln.split()) for ln in lines[1:]]
    return PureComplex(d, n, tuple(facets))


def read_complex(path) -> PureComplex:
    with open(path) as fh:
        return loads(fh.read())


def write_complex(path, K: PureComplex) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(K))


# ---------------------------------------------------------------------------
# operators


def boundary_complex(K: PureComplex) -> PureComplex:
    """(d-1)-faces lying in an odd number of facets."""
    if K.d < 1:
        raise InvalidComplex("boundary needs d >= 1")
    counts = Counter(r for f in K.facets for r in combinations(f, K.d))
    return PureComplex(K.d - 1, K.n, tuple(r for r, c in counts.items() if c % 2 == 1))


def link(K: PureComplex, sigma: Iterable[int]) -> PureComplex:
    s = simplex(sigma)
    if len(s) - 1 >= K.d:
        raise InvalidComplex(f"link needs a face of dimension < {K.d}, got {s}")
    ss = set(s)
    out = [tuple(v for v in f if v not in ss) for f in K.facets if ss.issubset(f)]
    return PureComplex(K.d - len(s), K.n, tuple(out))


def cone(K: PureComplex, z: int) -> PureComplex:
    z = int(z)
    if any(z in f for f in K.facets):
        raise ConeVertexClash(f"cone vertex {z} already used by the complex")
    return PureComplex(K.d + 1, max(K.n, z), tuple(f + (z,) for f in K.facets))


def euler_characteristic(K: PureComplex) -> int:
    faces: set = set()
    for f in K.facets:
        for k in range(1, len(f) + 1):
            faces.update(combinations(f, k))
    chi = 0
    for face in faces:
        chi += 1 if len(face) % 2 == 1 else -1
    return chi


def facet_adjacency(K: PureComplex) -> dict:
    """Map each facet to the facets sharing a (d-1)-face with it."""
    by_ridge = defaultdict(list)
    for f in K.facets:
        for r in combinations(f, K.d):
            by_ridge[r].append(f)
    adj = {f: set() for f in K.facets}
    for fs in by_ridge.values():
        for a, b in combinations(fs, 2):
            adj[a].add(b)
            adj[b].add(a)
    return adj


def _connected(nodes, neighbours) -> bool:
    nodes = list(nodes)
    if not nodes:
        return True
    seen = {nodes[0]}
    stack = [nodes[0]]
    while stack:
        x = stack.pop()
        for y in neighbours(x):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(nodes)


# ---------------------------------------------------------------------------
# verification


class Outcome(str, enum.Enum):
    SPHERE2 = "Sphere2"
    CLOSED_MANIFOLD3 = "ClosedManifold3"
    CERTIFIED_LC = "CertifiedLC"
    NOT_SPHERE = "NotSphere"


@dataclass(frozen=True)
class SphereVerdict:
    outcome: Outcome
    reason: str | None = None
    spanning: bool = False

    def __post_init__(self):
        if self.outcome is Outcome.NOT_SPHERE and not self.reason:
            raise ValueError("a NotSphere verdict needs a reason")

    @property
    def ok(self) -> bool:
        return self.outcome is not Outcome.NOT_SPHERE

    def __str__(self) -> str:
        s = f"{self.outcome.value} spanning={str(self.spanning).lower()}"
        return s + (f" reason={self.reason}" if self.reason else "")


def _not_sphere(reason: str, spanning: bool) -> SphereVerdict:
    return SphereVerdict(Outcome.NOT_SPHERE, reason, spanning)


def _cycle_check(edges: Sequence[tuple]) -> str | None:
    """None if ``edges`` form one simple cycle of length >= 3, else a reason."""
    if len(edges) < 3:
        return f"link has {len(edges)} edges"
    adj = defaultdict(list)
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    for v, nb in adj.items():
        if len(nb) != 2:
            return f"link vertex {v} has degree {len(nb)}"
    if not _connected(adj, adj.__getitem__):
        return "link is not a single cycle"
    return None


def _surface_reason(facets: Sequence[tuple]) -> str | None:
    """Reason the triangle list is not a 2-sphere, or None."""
    edge_count = Counter()
    star = defaultdict(list)
    for f in facets:
        a, b, c = f
        edge_count[(a, b)] += 1
        edge_count[(a, c)] += 1
        edge_count[(b, c)] += 1
        star[a].append((b, c))
        star[b].append((a, c))
        star[c].append((a, b))
    for e, c in edge_count.items():
        if c != 2:
            return f"edge {e} lies in {c} facets"
    for v in sorted(star):
        why = _cycle_check(star[v])
        if why:
            return f"vertex {v}: {why}"
    # facet adjacency via shared edges
    by_edge = defaultdict(list)
    for i, f in enumerate(facets):
        a, b, c = f
        for e in ((a, b), (a, c), (b, c)):
            by_edge[e].append(i)
    nbrs = defaultdict(list)
    for i, j in by_edge.values():
        nbrs[i].append(j)
        nbrs[j].append(i)
    if not _connected(range(len(facets)), nbrs.__getitem__):
        return "facet adjacency graph is disconnected"
    chi = len(star) - len(edge_count) + len(facets)
    if chi != 2:
        return f"euler characteristic {chi} != 2"
    return None


def _verify3(K: PureComplex) -> str | None:
    tri_count = Counter(r for f in K.facets for r in combinations(f, 3))
    for t, c in tri_count.items():
        if c != 2:
            return f"triangle {t} lies in {c} facets"
    star = defaultdict(list)
    for f in K.facets:
        for i, v in enumerate(f):
            star[v].append(f[:i] + f[i + 1:])
    for v in sorted(star):
        why = _surface_reason(star[v])
        if why:
            return f"link of vertex {v}: {why}"
    adj = facet_adjacency(K)
    if not _connected(adj, adj.__getitem__):
        return "facet adjacency graph is disconnected"
    chi = euler_characteristic(K)
    if chi != 0:
        return f"euler characteristic {chi} != 0"
    return None


def verify(K: PureComplex, certificate=None) -> SphereVerdict:
    """Check that ``K`` triangulates a sphere (d=2) or a closed 3-manifold (d=3).

    For ``d == 3`` the positive outcome is ``ClosedManifold3``; deciding
    whether a 3-manifold is the 3-sphere is not attempted.  Passing an
    :class:`~spansphere.lc.LcTrace` as ``certificate`` replays it and, if it
    reproduces ``K``, yields ``CertifiedLC`` (any ``d``).
    """
    used = {v for f in K.facets for v in f}
    spanning = len(used) == K.n and K.n > 0
    if certificate is not None:
        from .lc import certify

        verdict = certify(certificate, n=K.n)
        if not verdict.ok:
            return _not_sphere(f"certificate rejected: {verdict.reason}", spanning)
        from .lc import certified_sphere

        if certified_sphere(certificate).facet_set != K.facet_set:
            return _not_sphere("certificate does not reproduce the complex", spanning)
        return SphereVerdict(Outcome.CERTIFIED_LC, None, spanning)
    if K.d not in (2, 3):
        raise UnsupportedDimension(f"verification is implemented for d in {{2, 3}}, got {K.d}")
    if not K.facets or len(used) < K.d + 2:
        return _not_sphere("TooSmall", spanning)
    if K.d == 2:
        why = _surface_reason(K.facets)
        if why:
            return _not_sphere(why, spanning)
        return SphereVerdict(Outcome.SPHERE2, None, spanning)
    why = _verify3(K)
    if why:
        return _not_sphere(why, spanning)
    return SphereVerdict(Outcome.CLOSED_MANIFOLD3, None, spanning)


# ---------------------------------------------------------------------------
# small named complexes used across the package


def tetra_boundary(vertices: Sequence[int] = (1, 2, 3, 4), n: int | None = None) -> PureComplex:
    vs = simplex(vertices)
    return PureComplex(2, n or vs[-1], tuple(combinations(vs, 3)))


def octahedron() -> PureComplex:
    # antipodal pairs (1,2), (3,4), (5,6)
    facets = [(a, b, c) for a in (1, 2) for b in (3, 4) for c in (5, 6)]
    return PureComplex(2, 6, tuple(facets))
