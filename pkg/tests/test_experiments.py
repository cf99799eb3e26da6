import json
import math

import numpy as np
import pytest

from spansphere.costs import derive_seed
from spansphere.errors import InvalidGrid
from spansphere.experiments import (exp_concentration, exp_degree_histogram, exp_scaling,
                                    fit_scaling, fmt, scaling_purpose, total_variation,
                                    write_rows)


def _csv_without_runtime(records):
    rows = write_rows(records).splitlines()
    return [",".join(r.split(",")[:-1]) for r in rows]


def test_fmt():
    assert fmt(1 / 3) == "0.333333333"
    assert fmt(12345.678912345) == "12345.6789"
    assert fmt(None) == "" and fmt(float("nan")) == ""
    assert fmt(7) == "7"


def test_fit_recovers_power_law():
    grid = [100, 200, 400, 800, 1600]
    slope, icpt, se, _, dropped = fit_scaling(grid, [3 * n ** 0.5 for n in grid])
    assert slope == pytest.approx(0.5) and math.exp(icpt) == pytest.approx(3)
    assert dropped == 1 and se == pytest.approx(0, abs=1e-9)
    assert fit_scaling([10, 20], [1, 2])[4] == 0


def test_scaling_is_deterministic():
    fa, ra = exp_scaling(2, "facet", [16, 32, 64], 20, seed=9)
    fb, rb = exp_scaling(2, "facet", [16, 32, 64], 20, seed=9, threads=2)
    assert _csv_without_runtime(ra) == _csv_without_runtime(rb)
    assert fa.slope == fb.slope and fa.medians == fb.medians
    assert [(r.n, r.trial) for r in ra] == [(n, t) for n in (16, 32, 64) for t in range(20)]
    assert _csv_without_runtime(exp_scaling(2, "facet", [16, 32, 64], 20, seed=10)[1]) != \
        _csv_without_runtime(ra)


def test_scaling_rows():
    fit, recs = exp_scaling(3, "facet", [12, 24], 20, seed=1)
    assert all(r.facet_count == 3 * (r.n - 3) for r in recs)
    assert recs[0].seed == derive_seed(1, scaling_purpose(3, "facet", 12), 0)
    text = write_rows(recs)
    assert text.splitlines()[0] == "d,model,n,trial,seed,method,cost,facet_count,runtime_ms"
    data = json.loads(write_rows(recs, fmt_="json"))
    assert len(data) == 40 and data[0]["cost"] == float(fmt(recs[0].cost))


def test_edge_scaling():
    fit, recs = exp_scaling(2, "edge", [64, 128, 256], 20, seed=2)
    assert {r.method for r in recs} == {"tightpath"}
    assert 0.4 < fit.slope < 0.9


def test_seeds_unique():
    seeds = {derive_seed(0, scaling_purpose(2, "facet", n), t)
             for n in (128, 256, 512) for t in range(1000)}
    assert len(seeds) == 3000


@pytest.mark.parametrize("grid,trials", [([], 20), ([64, 32], 20), ([32, 32], 20), ([32], 19)])
def test_scaling_rejects_bad_input(grid, trials):
    with pytest.raises(InvalidGrid):
        exp_scaling(2, "facet", grid, trials)


def test_concentration_rows():
    rows = exp_concentration(2, "facet", [6, 7, 12], 10, seed=3)
    assert [r.source for r in rows] == ["exact", "exact", "greedy2opt"]
    assert all(r.stdev > 0 and r.ratio == pytest.approx(r.stdev / r.median) for r in rows)
    (single,) = exp_concentration(2, "facet", [6], 1)
    assert math.isnan(single.stdev)
    assert write_rows([single]).splitlines()[1].split(",")[4] == ""


def test_degree_histogram_lc():
    h = exp_degree_histogram("lc", 20, 400, seed=0)
    assert h.samples == 400
    for c in h.per_sample:
        assert sum(k * v for k, v in c.items()) == 2 * (3 * 20 - 6)
        assert min(c) >= 3 and sum(c.values()) == 20
    a = h.frequencies(h.per_sample[:200])
    b = h.frequencies(h.per_sample[200:])
    assert total_variation(a, b) < 0.05


def test_degree_histogram_boltzmann():
    h = exp_degree_histogram("boltzmann", 10, 50, seed=1, beta=1.0)
    assert h.samples == 50
    assert sum(h.counts.values()) == 500
    assert sum(k * v for k, v in h.counts.items()) == 50 * 2 * 24


def test_degree_histogram_errors():
    with pytest.raises(InvalidGrid):
        exp_degree_histogram("lc", 5, 10)
    with pytest.raises(InvalidGrid):
        exp_degree_histogram("other", 10, 10)


def test_total_variation():
    assert total_variation({3: 0.5, 4: 0.5}, {3: 0.5, 4: 0.5}) == 0
    assert total_variation({3: 1.0}, {4: 1.0}) == 1
    assert np.isclose(total_variation({3: 0.25, 4: 0.75}, {3: 0.5, 4: 0.5}), 0.25)
