"""Acceptance suite: one test per criterion, each printing a single
PASS/FAIL line.  The scaling criterion takes about a quarter of an hour
on a single core."""

import math
import os
import time
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from spansphere import bounds
from spansphere.boltzmann import boltzmann_cost_stats, diagonal_flip, run_chain
from spansphere.constructions import build_cone_sphere, s_star, sphere_from_cycle, \
    tight_path_sphere
from spansphere.costs import WeightOracle, derive_seed
from spansphere.errors import PatchFailed
from spansphere.experiments import (exp_concentration, exp_degree_histogram, exp_scaling,
                                    fit_scaling, scaling_purpose, write_rows)
from spansphere.lc import lc_trace_for_cone_sphere, sample_lc_2sphere
from spansphere.oracle import enumerate_2spheres, labeled_spheres, sphere_costs
from spansphere.patcher import patch_2sphere, patch_s, separates, trivial_patch_cost
from spansphere.simplex import Outcome, PureComplex, euler_characteristic, link, verify

METHODS = ("greedy", "greedy2opt", "lk", "exact")


@pytest.fixture
def report(capsys):
    def emit(num, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} {detail}")
        return ok
    return emit


def test_1_exact_enumeration(report):
    t0 = time.perf_counter()
    r = {n: enumerate_2spheres(n) for n in (4, 5, 6, 7)}
    ok = (r[4].labeled_count == 1
          and r[5].labeled_count == 10
          and [c.automorphisms for c in r[5].classes] == [12]
          and all(r[n].labeled_count == r[n].orbit_sum for n in (6, 7)))
    dt = time.perf_counter() - t0
    ok = ok and dt < 60
    counts = {n: r[n].labeled_count for n in r}
    assert report(1, ok, f"counts={counts} orbit sums={[r[n].orbit_sum for n in (6, 7)]} "
                         f"time={dt:.1f}s")


def test_2_oracle_dominance(report):
    bad = 0
    trials = 0
    for n in (5, 6, 7):
        for t in range(1000):
            o = WeightOracle.facet(derive_seed(0, f"dominance/n{n}", t), 2)
            m = float(sphere_costs(n, o).min())
            for method in METHODS:
                _, c = build_cone_sphere(n, 2, o, method)
                bad += m > c + 1e-12
                trials += 1
    assert report(2, bad == 0, f"{trials - bad}/{trials} constructions at or above the minimum")


def _structure_violation(K: PureComplex) -> str | None:
    n = K.n
    if K.m != 2 * n - 4:
        return "facet count"
    if len(K.edges()) != 3 * n - 6:
        return "edge count"
    if euler_characteristic(K) != 2:
        return "euler characteristic"
    for v in range(1, n + 1):
        L = link(K, (v,))
        deg = Counter(x for e in L.facets for x in e)
        if not deg or set(deg.values()) != {2} or len(L.facets) != len(deg):
            return f"link of {v}"
        # one cycle, not several
        adj = {}
        for a, b in L.facets:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        start = next(iter(adj))
        seen, prev, cur = {start}, None, start
        while True:
            nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
            if nxt == start:
                break
            seen.add(nxt)
            prev, cur = cur, nxt
        if len(seen) != len(adj):
            return f"link of {v} is disconnected"
    v = verify(K)
    if not (v.ok and v.spanning):
        return f"verify: {v.reason}"
    return None


def _fuzzed_spheres(rng):
    # constructions
    for i in range(3000):
        n = int(rng.integers(5, 40))
        kind = i % 4
        if kind == 0:
            yield s_star(n, 2).complex
        elif kind == 1:
            cyc = [int(x) + 3 for x in rng.permutation(n - 2)]
            yield sphere_from_cycle(cyc, 2).complex
        elif kind == 2:
            o = WeightOracle.facet(int(rng.integers(2**63)), 2)
            yield build_cone_sphere(n, 2, o, METHODS[i % 3])[0].complex
        else:
            yield tight_path_sphere(max(n, 8), WeightOracle.edge(int(rng.integers(2**63)), 2)).complex
    # LC sampler
    for i in range(3000):
        m = 2 * int(rng.integers(4, 30))
        yield sample_lc_2sphere(m, int(rng.integers(2**63)))[0]
    # flip chains
    for i in range(40):
        n = int(rng.integers(6, 30))
        beta = [0.0, 1.0, 4.0, math.inf][i % 4]
        r = run_chain(n, beta, WeightOracle.facet(i, 2), 100 * 37, int(rng.integers(2**63)),
                      thin=37, keep_samples=True)
        for facets in r.samples:
            yield PureComplex(2, n, facets)


def test_3_structural_invariants(report):
    rng = np.random.default_rng(2024)
    total, bad = 0, []
    for K in _fuzzed_spheres(rng):
        total += 1
        why = _structure_violation(K)
        if why:
            bad.append(why)
    ok = total == 10_000 and not bad
    assert report(3, ok, f"{total} spheres, {len(bad)} violations {bad[:3]}")


def test_4_s_star_family(report):
    t0 = time.perf_counter()
    bad = []
    checked = 0
    for d in (2, 3, 4, 5):
        for n in range(d + 3, 61):
            S = s_star(n, d)
            K = S.complex
            if K.m != d * (n - d):
                bad.append((d, n, "facets"))
            verdicts = []
            if d in (2, 3):
                verdicts.append(verify(K))
            if d >= 3:
                verdicts.append(verify(K, lc_trace_for_cone_sphere(S.cycle, d)))
            want = {2: [Outcome.SPHERE2], 3: [Outcome.CLOSED_MANIFOLD3, Outcome.CERTIFIED_LC]}
            outcomes = [v.outcome for v in verdicts]
            if outcomes != want.get(d, [Outcome.CERTIFIED_LC]) or not all(v.spanning for v in verdicts):
                bad.append((d, n, outcomes))
            checked += 1
    dt = time.perf_counter() - t0
    ok = not bad and dt < 120
    assert report(4, ok, f"{checked} complexes, {len(bad)} failures, time={dt:.1f}s")


def test_5_facet_scaling(report):
    grid = [128, 256, 512, 1024, 2048, 4096, 8192]
    t0 = time.perf_counter()
    fit, _ = exp_scaling(2, "facet", grid, 200, method="lk", seed=0,
                         threads=os.cpu_count() or 1)
    dt = time.perf_counter() - t0
    ratio = fit.medians[grid.index(4096)] / math.sqrt(4096)
    ok = 0.40 <= fit.slope <= 0.60 and 0.35 <= ratio <= 2.0
    assert report(5, ok, f"slope={fit.slope:.4f}+-{fit.slope_se:.4f} "
                         f"median/sqrt(n) at 4096={ratio:.4f} time={dt:.0f}s")


def test_6_edge_model_tight_path(report):
    grid = [500, 1000, 2000, 4000]
    medians, over, max_count = {}, 0, 0
    for n in grid:
        costs = []
        for t in range(50):
            o = WeightOracle.edge(derive_seed(0, scaling_purpose(2, "edge", n), t), 2,
                                  logging=True)
            tp = tight_path_sphere(n, o)
            v = verify(tp.complex)
            assert v.ok and v.spanning
            costs.append(tp.cost)
            over += tp.cost > 60 * n ** (2 / 3)
            max_count = max(max_count, o.log.max_count())
        medians[n] = float(np.median(costs))
    slope = fit_scaling(grid, [medians[n] for n in grid])[0]
    low = min(medians[n] / n ** (2 / 3) for n in (1000, 4000))
    ok = over == 0 and 0.60 <= slope <= 0.73 and low >= 0.65 and max_count == 1
    assert report(6, ok, f"over-bound={over} slope={slope:.4f} "
                         f"min median/n^(2/3)={low:.4f} max query count={max_count}")


def test_7_bounds(report):
    c = bounds.named_constants()
    a, g = c["alpha"], c["gamma"]
    tail = bounds.uniform_sum_tail(1, 3).exact
    m0 = bounds.first_moment_threshold(bounds.BoundsParams(3, 100)).m0
    ex = bounds.named_constants(Fraction(8, 21), d=3)
    up, low = ex["exponent_lower"], ex["exponent_upper"]
    ok = (abs(a - 0.3939) <= 1e-3 and g == Fraction(256, 27) and tail == Fraction(1, 6)
          and m0 == 290 and up == Fraction(13, 21) and low == Fraction(2, 3))
    assert report(7, ok, f"alpha={a:.6f} gamma={g} tail={tail} m0={m0} exponents={up},{low}")


def test_8_boltzmann_chain(report):
    t0 = time.perf_counter()
    support = {f: i for i, f in enumerate(labeled_spheres(6))}
    r = run_chain(6, 0.0, WeightOracle.facet(derive_seed(0, "uniformity", 0), 2), 10**6,
                  derive_seed(0, "uniformity", 1), thin=100, keep_samples=True)
    c = Counter(support[s] for s in r.samples)
    p = stats.chisquare([c.get(i, 0) for i in range(len(support))]).pvalue

    betas = [0.0, 1.0, 2.0, 4.0, 8.0]
    table = boltzmann_cost_stats(16, betas, 20, 50_000, seed=0)
    b0 = table[0]
    near_m2 = abs(b0.mean - 14) <= 2 * b0.stderr
    monotone = all(b.mean <= a.mean + 2 * math.hypot(a.stderr, b.stderr)
                   for a, b in zip(table, table[1:]))

    # flip fuzz with the reverse flip applied and undone at every step
    rng = np.random.default_rng(8)
    flips, violations, restored = 0, 0, 0
    S = s_star(12, 2).complex
    while flips < 10**5:
        if flips % 5000 == 0:
            n = int(rng.integers(6, 20))
            S, _ = sample_lc_2sphere(2 * n - 4, int(rng.integers(2**63)))
        edges = sorted(S.edges())
        u, v = edges[rng.integers(len(edges))]
        T = diagonal_flip(S, (u, v))
        if T is None:
            continue
        flips += 1
        new = T.edges() - S.edges()
        (x, y), = new
        restored += diagonal_flip(T, (x, y)).facet_set == S.facet_set
        vt = verify(T)
        violations += not (vt.ok and vt.spanning and T.m == S.m)
        S = T
    dt = time.perf_counter() - t0
    ok = (p > 0.01 and near_m2 and monotone and violations == 0 and restored == flips
          and dt < 600)
    means = " ".join(f"{b.beta:g}:{b.mean:.3f}+-{b.stderr:.3f}" for b in table)
    assert report(8, ok, f"chi2 p={p:.3f} means {means} flips={flips} "
                         f"violations={violations} restored={restored} time={dt:.0f}s")


def test_9_patcher(report):
    n, k = 200, 20
    s = patch_s(k, n)
    ok_runs, sep_ok, greedy, trivial = 0, 0, [], []
    for seed in range(100):
        K, _ = sample_lc_2sphere(2 * n - 4, derive_seed(0, "patch-acceptance", seed))
        rng = np.random.default_rng(seed)
        facets = sorted(K.facets)
        P = {facets[i] for i in rng.choice(len(facets), k, replace=False)}
        H = K.with_facets(K.facet_set - P)
        o = WeightOracle.facet(derive_seed(0, "patch-acceptance-w", seed), 2)
        try:
            r = patch_2sphere(H, K, o, s, seed=seed)
        except PatchFailed:
            continue
        v = verify(r.final)
        if not (v.ok and v.spanning):
            continue
        ok_runs += 1
        sep = r.plan.separator
        sep_ok += separates(K, sep) and s / 14 <= sep.q <= s
        greedy.append(r.cost)
        trivial.append(trivial_patch_cost(H, K, o))
    mg, mt = float(np.median(greedy)), float(np.median(trivial))
    ok = ok_runs >= 95 and sep_ok == ok_runs and mg <= mt
    assert report(9, ok, f"s={s} successes={ok_runs}/100 separator ok={sep_ok}/{ok_runs} "
                         f"median greedy={mg:.3f} median trivial={mt:.3f}")


def _strip_runtime(text):
    return [ln.rsplit(",", 1)[0] for ln in text.splitlines()]


def test_10_determinism(report, tmp_path):
    from spansphere.cli import main

    def run_all():
        out = []
        for d, model, grid in ((2, "facet", [16, 32, 64]), (3, "facet", [10, 20, 40]),
                               (2, "edge", [64, 128, 256])):
            _, recs = exp_scaling(d, model, grid, 20, seed=77)
            out.append(_strip_runtime(write_rows(recs)))
        out.append(write_rows(exp_concentration(2, "facet", [6, 7, 16], 10, seed=77)))
        for sampler in ("lc", "boltzmann"):
            h = exp_degree_histogram(sampler, 12, 50, seed=77, beta=2.0)
            out.append(write_rows(h.rows()))
        return out

    first, second = run_all(), run_all()
    cli = []
    for threads in ("1", "2", "1"):
        p = tmp_path / f"scaling{len(cli)}.csv"
        main(["exp", "scaling", "--grid", "16 32 64", "--trials", "20", "--seed", "77",
              "--threads", threads, "--out", str(p)])
        cli.append(_strip_runtime(p.read_text()))
    ok = first == second and cli[0] == cli[1] == cli[2] and cli[0] == first[0]
    assert report(10, ok, f"{len(first)} library outputs and 3 CLI runs byte-identical={ok}")
