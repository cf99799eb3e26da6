"""Metropolis chain on labelled 2-sphere triangulations.

The stationary law at fixed costs ``w`` is proportional to
``exp(-beta * W_S)``.  A step picks one of the ``3n - 6`` edges uniformly
and proposes the diagonal flip ``uvx, uvy -> uxy, vxy``; unflippable
picks count as rejected steps.  ``beta = inf`` accepts only strictly
improving flips, which is a descent heuristic rather than a sampler.

The state lives in an oriented "apex" table: ``apex[a, b] = c`` when the
triangle to the left of the directed edge ``a -> b`` is ``(a, b, c)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .costs import WeightOracle, cost3_unsorted, derive_seed
from .errors import NotAnEdge, SpanSphereError, TooSmall, WrongModel
from .oracle import rotation_system
from .simplex import PureComplex, simplex, verify
from .constructions import s_star

VERIFY_EVERY = 1000
RECOMPUTE_EVERY = 10_000


def acceptance_probability(beta: float, delta: float) -> float:
    """Metropolis acceptance ``min(1, exp(-beta * delta))``."""
    if beta == 0:
        return 1.0
    if math.isinf(beta):
        return 1.0 if delta < 0 else 0.0
    if delta <= 0:
        return 1.0
    return math.exp(-beta * delta)


def diagonal_flip(S: PureComplex, edge):
    """Flip ``edge``; returns the new complex, or ``None`` when the flip is
    rejected (the opposite vertices coincide or are already adjacent)."""
    u, v = simplex(edge)
    opp = [f for f in S.facets if u in f and v in f]
    if len(opp) != 2:
        raise NotAnEdge(f"{(u, v)} is not an interior edge of the complex")
    (x,) = set(opp[0]) - {u, v}
    (y,) = set(opp[1]) - {u, v}
    if x == y or (min(x, y), max(x, y)) in S.edges():
        return None
    facets = set(S.facets) - set(opp)
    facets |= {simplex((u, x, y)), simplex((v, x, y))}
    return S.with_facets(facets)


# ---------------------------------------------------------------------------
# array state


@dataclass
class ChainState:
    n: int
    apex: np.ndarray
    edges: np.ndarray
    cost: float
    beta: float
    step: int = 0
    accepted: int = 0

    def facets(self) -> list:
        return _facets_of(self.apex, self.n)

    def complex(self) -> PureComplex:
        return PureComplex(2, self.n, tuple(self.facets()))


def _facets_of(apex, n):
    a, b = np.nonzero(apex >= 0)
    c = apex[a, b]
    tri = np.sort(np.stack([a, b, c], axis=1), axis=1)
    return sorted({tuple(int(x) for x in t) for t in tri})


def state_from_complex(S: PureComplex, o: WeightOracle, beta: float) -> ChainState:
    succ = rotation_system(S.facets)
    apex = np.full((S.n + 1, S.n + 1), -1, dtype=np.int64)
    for a, nb in succ.items():
        for b, c in nb.items():
            # succ[a][b] = c means triangle (a, b, c) is positively oriented
            apex[a, b] = c
    edges = np.array(sorted(S.edges()), dtype=np.int64)
    return ChainState(S.n, apex, edges, o.complex_cost(S), beta)


@njit(cache=True)
def _chain(apex, edges, key, beta, picks, uniforms, cost, out_cost, out_acc):
    inf = beta == np.inf
    accepted = 0
    for t in range(picks.shape[0]):
        k = picks[t]
        u = edges[k, 0]
        v = edges[k, 1]
        x = apex[u, v]
        y = apex[v, u]
        ok = x != y and apex[x, y] < 0
        if ok:
            dw = (cost3_unsorted(key, x, u, y) + cost3_unsorted(key, y, v, x)
                  - cost3_unsorted(key, u, v, x) - cost3_unsorted(key, v, u, y))
            if beta == 0.0:
                ok = True
            elif inf:
                ok = dw < 0.0
            elif dw <= 0.0:
                ok = True
            else:
                ok = uniforms[t] < np.exp(-beta * dw)
            if ok:
                apex[u, v] = -1
                apex[v, u] = -1
                apex[x, u] = y
                apex[u, y] = x
                apex[y, x] = u
                apex[y, v] = x
                apex[v, x] = y
                apex[x, y] = v
                if x < y:
                    edges[k, 0] = x
                    edges[k, 1] = y
                else:
                    edges[k, 0] = y
                    edges[k, 1] = x
                cost += dw
                accepted += 1
        out_cost[t] = cost
        out_acc[t] = ok
    return cost, accepted


@dataclass
class ChainResult:
    final: PureComplex
    costs: np.ndarray  # cost after each step (or every ``thin`` steps)
    accepted: np.ndarray
    acceptance_rate: float
    samples: list = field(default_factory=list)
    descent: bool = False


def run_chain(n: int, beta: float, o: WeightOracle, steps: int, seed, thin: int = 1,
              keep_samples: bool = False, debug: bool = False, start: PureComplex | None = None
              ) -> ChainResult:
    """Run ``steps`` Metropolis steps from ``s_star(n, 2)``.

    ``costs``/``accepted`` are reported every ``thin`` steps (cost after the
    step, whether that step was accepted); with ``keep_samples`` the facet
    tuples at those steps are kept too.  ``debug`` verifies the sphere after
    every accepted flip instead of every 1000 steps.
    """
    if n < 5:
        raise TooSmall(f"the flip chain needs n >= 5, got {n}")
    if o.model != "facet" or o.d != 2:
        raise WrongModel("the flip chain needs a facet oracle with d=2")
    if beta < 0 or math.isnan(beta):
        raise ValueError(f"beta must be >= 0, got {beta}")
    thin = max(1, int(thin))
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    S0 = s_star(n, 2).complex if start is None else start
    st = state_from_complex(S0, o, float(beta))
    E = st.edges.shape[0]
    if debug:
        chunk = 1
    elif keep_samples:
        chunk = thin
    else:
        chunk = VERIFY_EVERY
    costs = []
    accs = []
    samples = []
    done = 0
    since_verify = 0
    since_recompute = 0
    buf_c = np.empty(chunk)
    buf_a = np.empty(chunk, dtype=np.bool_)
    while done < steps:
        k = min(chunk, steps - done)
        picks = rng.integers(0, E, size=k)
        us = rng.random(size=k)
        st.cost, acc = _chain(st.apex, st.edges, o.ukey, float(beta), picks, us, st.cost,
                              buf_c[:k], buf_a[:k])
        st.accepted += acc
        # thinned outputs: steps whose 1-based index is a multiple of thin
        first = (-done - 1) % thin
        for j in range(first, k, thin):
            costs.append(buf_c[j])
            accs.append(bool(buf_a[j]))
        if keep_samples and (done + k) % thin == 0:
            samples.append(tuple(st.facets()))
        done += k
        st.step = done
        since_verify += acc
        since_recompute += k
        if since_verify and (debug or since_recompute % VERIFY_EVERY < k or done == steps):
            _check(st)
            since_verify = 0
        if since_recompute >= RECOMPUTE_EVERY or done == steps:
            since_recompute = 0
            exact = o.untracked().complex_cost(st.complex())
            if abs(exact - st.cost) > 1e-9:
                raise SpanSphereError(f"cost drift {st.cost - exact:.3e} at step {done}")
            st.cost = exact
    st.step = done
    return ChainResult(st.complex(), np.array(costs), np.array(accs, dtype=bool),
                       st.accepted / max(steps, 1), samples, math.isinf(beta))


def _check(st: ChainState) -> None:
    K = st.complex()
    v = verify(K)
    if not v.ok or not v.spanning or K.m != 2 * st.n - 4:
        raise SpanSphereError(f"chain left the sphere space at step {st.step}: {v}")


# ---------------------------------------------------------------------------
# statistics


@dataclass(frozen=True)
class BetaStats:
    beta: float
    mean: float
    stderr: float
    trials: int


def chain_time_average(n, beta, o, steps, seed, burn: float = 0.5) -> float:
    r = run_chain(n, beta, o, steps, seed)
    b = int(len(r.costs) * burn)
    return float(np.mean(r.costs[b:]))


def boltzmann_cost_stats(n: int, betas, trials: int, steps: int, seed: int = 0,
                         burn: float = 0.5) -> list[BetaStats]:
    """Per ``beta``: mean over trials of the post-burn-in time-averaged cost.

    Trial ``t`` draws a fresh weighting ``w`` that is shared by all values
    of ``beta``, so differences between ``beta`` values are paired.
    """
    if trials <= 0:
        return []
    per = {b: [] for b in betas}
    for t in range(trials):
        o = WeightOracle.facet(derive_seed(seed, "boltzmann-w", t), 2)
        chain_seed = derive_seed(seed, "boltzmann-chain", t)
        for b in betas:
            per[b].append(chain_time_average(n, b, o, steps, chain_seed, burn))
    out = []
    for b in betas:
        x = np.array(per[b])
        se = float(x.std(ddof=1) / math.sqrt(len(x))) if len(x) > 1 else float("nan")
        out.append(BetaStats(float(b), float(x.mean()), se, len(x)))
    return out


def paired_differences(n: int, betas, trials: int, steps: int, seed: int = 0,
                       burn: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    """Per-trial averages as a ``(trials, len(betas))`` array plus the betas."""
    rows = []
    for t in range(trials):
        o = WeightOracle.facet(derive_seed(seed, "boltzmann-w", t), 2)
        chain_seed = derive_seed(seed, "boltzmann-chain", t)
        rows.append([chain_time_average(n, b, o, steps, chain_seed, burn) for b in betas])
    return np.array(rows), np.asarray(betas, dtype=float)


def degree_counts(S: PureComplex) -> np.ndarray:
    deg = np.zeros(S.n + 1, dtype=np.int64)
    for a, b in S.edges():
        deg[a] += 1
        deg[b] += 1
    return deg[1:]
