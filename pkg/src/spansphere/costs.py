"""Seeded i.i.d. uniform costs on simplices.

Costs come from a keyed counter-based hash (splitmix64 finalizer) of the
canonical vertex tuple, so no cost table is ever materialised and the cost
of a simplex depends only on ``(seed, simplex)``.  Values are
``(h >> 11) * 2**-53`` and lie in ``[0, 1)``.
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from numba import njit

from .errors import WrongModel
from .simplex import PureComplex, simplex

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV53 = 1.0 / (1 << 53)

_U_GOLDEN = np.uint64(GOLDEN)
_U_M1 = np.uint64(_M1)
_U_M2 = np.uint64(_M2)
_U30, _U27, _U31, _U11 = np.uint64(30), np.uint64(27), np.uint64(31), np.uint64(11)


# -- pure python reference of the mixer; used for seeds and as a golden check

def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def oracle_key(master: int, stream: int) -> int:
    return mix64(mix64(master ^ GOLDEN) ^ mix64((stream + GOLDEN) & MASK64))


def derive_seed(master: int, purpose: str, index: int) -> int:
    """Per-trial seed ``PRF(master, purpose, index)`` as a 64-bit integer."""
    tag = int.from_bytes(hashlib.blake2b(purpose.encode(), digest_size=8).digest(), "little")
    return mix64(mix64(master ^ tag) ^ mix64((index * GOLDEN + 1) & MASK64))


def py_uniform(key: int, vertices: Iterable[int]) -> float:
    """Reference implementation of :func:`uniform_of` in plain integers."""
    vs = tuple(vertices)
    h = key ^ ((len(vs) * GOLDEN) & MASK64)
    for v in vs:
        h = mix64(h ^ ((v + GOLDEN) & MASK64))
    return (h >> 11) * _INV53


# -- numba kernels

@njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> _U30)) * _U_M1
    z = (z ^ (z >> _U27)) * _U_M2
    return z ^ (z >> _U31)


@njit(cache=True, inline="always")
def _to_unit(h):
    return np.float64(h >> _U11) * _INV53


@njit(cache=True)
def uniform_of(key, verts):
    """Cost of the sorted vertex array ``verts`` under ``key``."""
    h = key ^ (np.uint64(verts.shape[0]) * _U_GOLDEN)
    for i in range(verts.shape[0]):
        h = _mix(h ^ (np.uint64(verts[i]) + _U_GOLDEN))
    return _to_unit(h)


@njit(cache=True, inline="always")
def cost2(key, a, b):
    """Cost of the pair ``a < b``."""
    h = key ^ (np.uint64(2) * _U_GOLDEN)
    h = _mix(h ^ (np.uint64(a) + _U_GOLDEN))
    h = _mix(h ^ (np.uint64(b) + _U_GOLDEN))
    return _to_unit(h)


@njit(cache=True, inline="always")
def cost3(key, a, b, c):
    """Cost of the triple ``a < b < c``."""
    h = key ^ (np.uint64(3) * _U_GOLDEN)
    h = _mix(h ^ (np.uint64(a) + _U_GOLDEN))
    h = _mix(h ^ (np.uint64(b) + _U_GOLDEN))
    h = _mix(h ^ (np.uint64(c) + _U_GOLDEN))
    return _to_unit(h)


@njit(cache=True, inline="always")
def cost3_unsorted(key, a, b, c):
    if a > b:
        a, b = b, a
    if b > c:
        b, c = c, b
    if a > b:
        a, b = b, a
    return cost3(key, a, b, c)


@njit(cache=True)
def uniform_rows(key, rows):
    out = np.empty(rows.shape[0])
    for i in range(rows.shape[0]):
        out[i] = uniform_of(key, rows[i])
    return out


# -- public types

@dataclass(frozen=True)
class Seed:
    master: int
    stream: int = 0

    def __post_init__(self):
        for name in ("master", "stream"):
            v = getattr(self, name)
            if not 0 <= int(v) <= MASK64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {v}")

    @property
    def key(self) -> int:
        return oracle_key(int(self.master), int(self.stream))


class QueryLog:
    """Multiset of queried simplices.

    Queries are buffered as integer arrays and only counted on demand, which
    keeps logging cheap for the millions of pair queries of a tight path.
    """

    def __init__(self):
        self._chunks: list[np.ndarray] = []

    def record(self, rows) -> None:
        rows = np.asarray(rows, dtype=np.int64)
        if rows.ndim == 1:
            rows = rows[None, :]
        if rows.size:
            self._chunks.append(np.sort(rows, axis=1))

    def merge(self, other: "QueryLog") -> "QueryLog":
        out = QueryLog()
        out._chunks = self._chunks + other._chunks
        return out

    @property
    def total(self) -> int:
        return sum(len(c) for c in self._chunks)

    def _unique_counts(self):
        by_arity: dict[int, list] = {}
        for c in self._chunks:
            by_arity.setdefault(c.shape[1], []).append(c)
        out = []
        for arity, chunks in by_arity.items():
            rows = np.concatenate(chunks)
            if arity <= 3 and rows.max() < (1 << 21):
                packed = np.zeros(len(rows), dtype=np.int64)
                for j in range(arity):
                    packed = (packed << 21) | rows[:, j]
                keys, idx, cnt = np.unique(packed, return_index=True, return_counts=True)
                out.append((rows[idx], cnt))
            else:
                uniq, cnt = np.unique(rows, axis=0, return_counts=True)
                out.append((uniq, cnt))
        return out

    def counts(self) -> Counter:
        c = Counter()
        for rows, cnt in self._unique_counts():
            for r, k in zip(rows, cnt):
                c[tuple(int(v) for v in r)] += int(k)
        return c

    def max_count(self) -> int:
        return max((int(cnt.max()) for _, cnt in self._unique_counts()), default=0)

    def __len__(self) -> int:
        return sum(len(rows) for rows, _ in self._unique_counts())


@dataclass
class WeightOracle:
    """Costs for the facet model (``model="facet"``, arity ``d+1``) or the
    edge model (``model="edge"``, arity 2, charged on the 1-skeleton of a
    ``d``-complex)."""

    seed: Seed
    d: int = 2
    model: str = "facet"
    log: QueryLog | None = None
    key: int = field(init=False)

    def __post_init__(self):
        if self.model not in ("facet", "edge"):
            raise WrongModel(f"unknown cost model {self.model!r}")
        if isinstance(self.seed, int):
            self.seed = Seed(self.seed)
        self.key = self.seed.key
        self._ukey = np.uint64(self.key)

    @classmethod
    def facet(cls, seed, d: int = 2, logging: bool = False) -> "WeightOracle":
        return cls(_as_seed(seed), d, "facet", QueryLog() if logging else None)

    @classmethod
    def edge(cls, seed, d: int = 2, logging: bool = False) -> "WeightOracle":
        return cls(_as_seed(seed), d, "edge", QueryLog() if logging else None)

    @property
    def arity(self) -> int:
        return self.d + 1 if self.model == "facet" else 2

    @property
    def ukey(self) -> np.uint64:
        return self._ukey

    def untracked(self) -> "WeightOracle":
        """Same costs, no logging."""
        return WeightOracle(self.seed, self.d, self.model, None)

    def cost(self, sigma) -> float:
        s = simplex(sigma)
        if len(s) != self.arity:
            raise WrongModel(f"{self.model} model with d={self.d} prices {self.arity}-sets, got {s}")
        if self.log is not None:
            self.log.record(s)
        return float(uniform_of(self._ukey, np.asarray(s, dtype=np.int64)))

    def costs(self, rows) -> np.ndarray:
        """Vectorised :meth:`cost` for an ``(k, arity)`` array of simplices."""
        rows = np.sort(np.asarray(rows, dtype=np.int64), axis=1)
        if rows.ndim != 2 or (rows.shape[0] and rows.shape[1] != self.arity):
            raise WrongModel(f"expected rows of {self.arity} vertices")
        if self.log is not None:
            self.log.record(rows)
        if rows.shape[0] == 0:
            return np.zeros(0)
        return uniform_rows(self._ukey, rows)

    def complex_cost(self, K: PureComplex) -> float:
        if K.d != self.d:
            raise WrongModel(f"oracle is for d={self.d}, complex has d={K.d}")
        if self.model == "facet":
            rows = np.array(K.facets, dtype=np.int64).reshape(-1, self.d + 1)
        else:
            rows = np.array(sorted(K.edges()), dtype=np.int64).reshape(-1, 2)
        return math.fsum(self.costs(rows))


def _as_seed(seed) -> Seed:
    return seed if isinstance(seed, Seed) else Seed(int(seed))


def simplex_cost(o: WeightOracle, sigma) -> float:
    return o.cost(sigma)


def complex_cost(o: WeightOracle, K: PureComplex) -> float:
    return o.complex_cost(K)
