import itertools
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from spansphere.boltzmann import (acceptance_probability, boltzmann_cost_stats, diagonal_flip,
                                  run_chain, state_from_complex)
from spansphere.costs import WeightOracle, derive_seed
from spansphere.errors import NotAnEdge, TooSmall, WrongModel
from spansphere.lc import sample_lc_2sphere
from spansphere.oracle import labeled_spheres
from spansphere.simplex import PureComplex, tetra_boundary, verify
from spansphere.tsp import hamilton_heuristic, tour_length

BIPYRAMID = PureComplex(2, 5, ((1, 3, 4), (1, 4, 5), (1, 3, 5), (2, 3, 4), (2, 4, 5), (2, 3, 5)))


def _flip_pair(S, edge):
    u, v = edge
    opp = [f for f in S.facets if u in f and v in f]
    (x,) = set(opp[0]) - {u, v}
    (y,) = set(opp[1]) - {u, v}
    return x, y


def test_bipyramid_flip():
    T = diagonal_flip(BIPYRAMID, (3, 4))
    assert T.facet_set == {(1, 2, 3), (1, 2, 4), (1, 4, 5), (2, 4, 5), (1, 3, 5), (2, 3, 5)}
    assert verify(T).ok


def test_flip_involution_example():
    T = diagonal_flip(BIPYRAMID, (3, 4))
    assert diagonal_flip(T, (1, 2)).facet_set == BIPYRAMID.facet_set


def test_tetra_flips_rejected():
    K = tetra_boundary()
    assert all(diagonal_flip(K, e) is None for e in itertools.combinations(range(1, 5), 2))


def test_not_an_edge():
    with pytest.raises(NotAnEdge):
        diagonal_flip(BIPYRAMID, (1, 2))


def test_chain_preconditions():
    o = WeightOracle.facet(0, 2)
    with pytest.raises(TooSmall):
        run_chain(4, 0.0, o, 10, 0)
    with pytest.raises(WrongModel):
        run_chain(8, 0.0, WeightOracle.edge(0, 2), 10, 0)


def test_acceptance_probability():
    assert acceptance_probability(0.0, 5.0) == 1.0
    assert acceptance_probability(2.0, -1.0) == 1.0
    assert acceptance_probability(2.0, 0.5) == pytest.approx(math.exp(-1.0))
    assert acceptance_probability(math.inf, -1e-9) == 1.0
    assert acceptance_probability(math.inf, 0.0) == 0.0


@settings(max_examples=40)
@given(st.integers(0, 2**32), st.sampled_from([0.0, 0.5, 3.0, 20.0]))
def test_reverse_flip_acceptance(seed, beta):
    # detailed balance on logged pairs: forward at exp(-b dW), reverse at min(1, exp(b dW))
    S, _ = sample_lc_2sphere(12, seed)
    o = WeightOracle.facet(seed, 2).untracked()
    rng = np.random.default_rng(seed)
    edges = sorted(S.edges())
    for k in rng.permutation(len(edges))[:10]:
        e = edges[k]
        T = diagonal_flip(S, e)
        if T is None:
            continue
        dw = o.complex_cost(T) - o.complex_cost(S)
        x, y = _flip_pair(S, e)
        back = diagonal_flip(T, (x, y))
        assert back.facet_set == S.facet_set
        rdw = o.complex_cost(back) - o.complex_cost(T)
        assert rdw == pytest.approx(-dw, abs=1e-12)
        fwd, rev = acceptance_probability(beta, dw), acceptance_probability(beta, rdw)
        assert rev == pytest.approx(min(1.0, math.exp(beta * dw)))
        assert fwd * math.exp(-beta * o.complex_cost(S)) == pytest.approx(
            rev * math.exp(-beta * o.complex_cost(T)))


@settings(max_examples=30)
@given(st.integers(0, 2**32))
def test_flip_preserves_sphere(seed):
    S, _ = sample_lc_2sphere(16, seed)
    rng = np.random.default_rng(seed)
    for _ in range(20):
        edges = sorted(S.edges())
        T = diagonal_flip(S, edges[rng.integers(len(edges))])
        if T is not None:
            v = verify(T)
            assert v.ok and v.spanning and T.m == S.m and len(T.edges()) == len(S.edges())
            S = T


def test_apex_table_matches_facets():
    S, _ = sample_lc_2sphere(20, 5)
    st_ = state_from_complex(S, WeightOracle.facet(5, 2), 1.0)
    assert tuple(st_.facets()) == S.facets
    assert st_.edges.shape == (3 * S.n - 6, 2)


def test_chain_debug_mode_and_cost_trace():
    o = WeightOracle.facet(11, 2)
    r = run_chain(10, 1.0, o, 3000, 11, debug=True)
    assert len(r.costs) == 3000
    assert r.costs[-1] == pytest.approx(o.untracked().complex_cost(r.final), abs=1e-9)
    assert r.acceptance_rate == pytest.approx(r.accepted.mean())
    assert not r.descent


def test_chain_is_reproducible():
    o = WeightOracle.facet(3, 2)
    a = run_chain(12, 2.0, o, 5000, 7)
    b = run_chain(12, 2.0, o, 5000, 7)
    assert a.final.facets == b.final.facets and np.array_equal(a.costs, b.costs)


def test_thinning():
    r = run_chain(8, 0.0, WeightOracle.facet(0, 2), 1000, 0, thin=100, keep_samples=True)
    assert len(r.costs) == 10 and len(r.samples) == 10
    assert PureComplex(2, 8, r.samples[-1]).facet_set == r.final.facet_set


def test_descent_never_increases():
    r = run_chain(16, math.inf, WeightOracle.facet(2, 2), 20_000, 2)
    assert r.descent and np.all(np.diff(r.costs) <= 1e-12)


def test_uniform_on_six_vertices():
    support = {f: i for i, f in enumerate(labeled_spheres(6))}
    r = run_chain(6, 0.0, WeightOracle.facet(1, 2), 300_000, 4, thin=100, keep_samples=True)
    c = Counter(support[s] for s in r.samples)
    obs = [c.get(i, 0) for i in range(len(support))]
    assert stats.chisquare(obs).pvalue > 0.01


def test_cost_stats_empty():
    assert boltzmann_cost_stats(8, [0.0, 1.0], 0, 100) == []


def test_cost_stats_beta_zero():
    (b0,) = boltzmann_cost_stats(10, [0.0], 8, 20_000, seed=1)
    assert b0.trials == 8
    assert abs(b0.mean - 8) < 3 * b0.stderr + 0.05


def _greedy_cone_cost(o, n, p, q):
    rest = [v for v in range(1, n + 1) if v not in (p, q)]
    w = np.zeros((len(rest), len(rest)))
    for i, j in itertools.combinations(range(len(rest)), 2):
        x, y = rest[i], rest[j]
        w[i, j] = w[j, i] = o.cost(tuple(sorted((p, x, y)))) + o.cost(tuple(sorted((q, x, y))))
    return tour_length(w, hamilton_heuristic(w, "greedy"))


@pytest.mark.xfail(strict=True, reason="the chain at beta=50 stalls in local minima about "
                                       "15-35% above the best greedy cone sphere")
def test_large_beta_near_greedy():
    ratios = []
    for t in range(5):
        o = WeightOracle.facet(derive_seed(0, "large-beta", t), 2).untracked()
        rng = np.random.default_rng(t)
        pairs = [rng.choice(np.arange(1, 17), 2, replace=False) for _ in range(20)]
        best = min(_greedy_cone_cost(o, 16, int(a), int(b)) for a, b in pairs)
        mean = run_chain(16, 50.0, o, 100_000, t).costs[50_000:].mean()
        ratios.append(mean / best)
    print("ratios", np.round(ratios, 3))
    assert np.mean(ratios) <= 1.10
