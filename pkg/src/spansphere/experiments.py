"""Monte Carlo harness: scaling, concentration and degree statistics.

Every trial draws its own seed ``derive_seed(master, purpose, index)``;
rows come back in ``(n, trial)`` order whatever the number of workers,
so a fixed master seed reproduces the CSV byte for byte apart from the
``runtime_ms`` column.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np
from scipy import stats

from .boltzmann import degree_counts, run_chain
from .constructions import build_cone_sphere, tight_path_sphere
from .costs import WeightOracle, derive_seed
from .errors import InvalidGrid, SpanSphereError
from .lc import lc_trace_for_cone_sphere, sample_lc_2sphere
from .oracle import COST_LIMIT, sphere_costs
from .simplex import PureComplex, verify

MIN_SCALING_TRIALS = 20


def fmt(x) -> str:
    """Decimals with 9 significant digits; ``None``/NaN become blank."""
    if x is None:
        return ""
    if isinstance(x, float):
        return "" if math.isnan(x) else f"{x:.9g}"
    return str(x)


@dataclass(frozen=True)
class ExperimentRecord:
    d: int
    model: str
    n: int
    trial: int
    seed: int
    method: str
    cost: float
    facet_count: int
    runtime_ms: float


def write_rows(rows, out=None, fmt_: str = "csv", columns=None) -> str:
    """Serialise dataclass rows (or dicts) as CSV with a header, or JSON."""
    dicts = [asdict(r) if hasattr(r, "__dataclass_fields__") else dict(r) for r in rows]
    if columns is None:
        if rows and hasattr(rows[0], "__dataclass_fields__"):
            columns = [f.name for f in fields(rows[0])]
        else:
            columns = list(dicts[0]) if dicts else []
    if fmt_ == "json":
        text = json.dumps([{c: _json_value(r[c]) for c in columns} for r in dicts], indent=1) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in dicts:
            w.writerow([fmt(r[c]) for c in columns])
        text = buf.getvalue()
    if out is not None:
        with open(out, "w") as fh:
            fh.write(text)
    return text


def _json_value(x):
    if isinstance(x, float):
        return None if math.isnan(x) else float(fmt(x))
    return x


def _check_unique(seeds) -> None:
    if len(set(seeds)) != len(seeds):
        raise SpanSphereError("derived trial seeds collide")


def _map(fn, items, threads: int):
    if threads > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * threads))))
    return [fn(x) for x in items]


# ---------------------------------------------------------------------------
# scaling


def scaling_purpose(d: int, model: str, n: int) -> str:
    return f"scaling/{model}/d{d}/n{n}"


def run_trial(job) -> ExperimentRecord:
    """One construction, verified before it is costed."""
    d, model, n, trial, seed, method = job
    t0 = time.perf_counter()
    if model == "edge":
        o = WeightOracle.edge(seed, d)
        tp = tight_path_sphere(n, o)
        K, cost, used = tp.complex, tp.cost, "tightpath"
        v = verify(K)
    else:
        o = WeightOracle.facet(seed, d)
        sphere, cost = build_cone_sphere(n, d, o, method)
        K, used = sphere.complex, method
        cert = None if d == 2 else lc_trace_for_cone_sphere(sphere.cycle, d)
        v = verify(K, cert)
    if not v.ok or not v.spanning:
        raise SpanSphereError(f"construction failed verification at n={n}, trial={trial}: {v}")
    ms = (time.perf_counter() - t0) * 1000
    return ExperimentRecord(d, model, n, trial, seed, used, float(cost), K.m, ms)


@dataclass(frozen=True)
class ScalingFit:
    grid: tuple
    medians: tuple
    iqr: tuple
    slope: float
    intercept: float
    slope_se: float
    intercept_se: float
    dropped: int  # number of leading grid points excluded from the fit


def fit_scaling(grid, medians, drop_smallest: bool = True) -> tuple:
    """Least squares on ``(ln n, ln median)``; drops the smallest ``n``
    when at least three points remain."""
    x = np.log(np.asarray(grid, dtype=float))
    y = np.log(np.asarray(medians, dtype=float))
    k = 1 if drop_smallest and len(x) >= 3 else 0
    r = stats.linregress(x[k:], y[k:])
    return float(r.slope), float(r.intercept), float(r.stderr), float(r.intercept_stderr), k


def _check_grid(grid) -> list:
    g = [int(n) for n in grid]
    if not g or any(b <= a for a, b in zip(g, g[1:])):
        raise InvalidGrid(f"grid must be non-empty and strictly ascending, got {g}")
    return g


def exp_scaling(d: int, model: str, grid, trials: int, method: str = "greedy2opt",
                seed: int = 0, threads: int = 1, min_trials: int = MIN_SCALING_TRIALS):
    """Run ``trials`` constructions per grid point; returns ``(fit, records)``."""
    grid = _check_grid(grid)
    if trials < min_trials:
        raise InvalidGrid(f"scaling needs at least {min_trials} trials, got {trials}")
    if model not in ("facet", "edge"):
        raise InvalidGrid(f"model must be facet or edge, got {model!r}")
    jobs = [(d, model, n, t, derive_seed(seed, scaling_purpose(d, model, n), t), method)
            for n in grid for t in range(trials)]
    _check_unique([j[4] for j in jobs])
    records = _map(run_trial, jobs, threads)
    meds, iqrs = [], []
    for n in grid:
        c = np.array([r.cost for r in records if r.n == n])
        q1, q2, q3 = np.percentile(c, [25, 50, 75])
        meds.append(float(q2))
        iqrs.append(float(q3 - q1))
    slope, icpt, se, ise, k = fit_scaling(grid, meds)
    return ScalingFit(tuple(grid), tuple(meds), tuple(iqrs), slope, icpt, se, ise, k), records


def fit_rows(fit: ScalingFit) -> list[dict]:
    return [{"n": n, "median": m, "iqr": q, "slope": fit.slope, "intercept": fit.intercept,
             "slope_se": fit.slope_se, "intercept_se": fit.intercept_se}
            for n, m, q in zip(fit.grid, fit.medians, fit.iqr)]


# ---------------------------------------------------------------------------
# concentration


@dataclass(frozen=True)
class ConcentrationRow:
    n: int
    source: str  # "exact" or the construction method
    trials: int
    median: float
    stdev: float
    ratio: float


def _conc_value(job) -> float:
    d, model, n, seed, method = job
    if d == 2 and model == "facet" and n <= COST_LIMIT:
        return float(sphere_costs(n, WeightOracle.facet(seed, 2)).min())
    return run_trial((d, model, n, 0, seed, method)).cost


def exp_concentration(d: int, model: str, grid, trials: int, seed: int = 0,
                      method: str = "greedy2opt", threads: int = 1) -> list[ConcentrationRow]:
    """Median and standard deviation of the minimum (exact, for d=2 facet
    costs with ``n <= 7``) or of the construction cost (otherwise)."""
    grid = _check_grid(grid)
    if trials < 1:
        raise InvalidGrid(f"trials must be positive, got {trials}")
    out = []
    for n in grid:
        jobs = [(d, model, n, derive_seed(seed, f"conc/{model}/d{d}/n{n}", t), method)
                for t in range(trials)]
        _check_unique([j[3] for j in jobs])
        vals = np.array(_map(_conc_value, jobs, threads))
        med = float(np.median(vals))
        sd = float(vals.std(ddof=1)) if trials > 1 else float("nan")
        exact = d == 2 and model == "facet" and n <= COST_LIMIT
        src = "exact" if exact else ("tightpath" if model == "edge" else method)
        out.append(ConcentrationRow(n, src, trials, med, sd, sd / med if med else float("nan")))
    return out


# ---------------------------------------------------------------------------
# degrees


@dataclass(frozen=True)
class DegreeHistogram:
    sampler: str
    n: int
    samples: int
    counts: dict  # degree -> pooled count
    per_sample: list  # degree Counter of each sample

    def rows(self) -> list[dict]:
        return [{"degree": k, "count": v} for k, v in sorted(self.counts.items())]

    def frequencies(self, part=None) -> dict:
        cs = self.per_sample if part is None else part
        tot = Counter()
        for c in cs:
            tot.update(c)
        s = sum(tot.values())
        return {k: v / s for k, v in tot.items()}


def total_variation(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def exp_degree_histogram(sampler: str, n: int, samples: int, seed: int = 0,
                         beta: float = 0.0, thin: int | None = None) -> DegreeHistogram:
    """Pooled vertex degrees of ``samples`` spheres on ``n`` vertices.

    ``sampler="lc"`` draws independent LC spheres; ``"boltzmann"`` thins a
    single flip chain at inverse temperature ``beta`` (every ``thin``
    steps, default ``10 n``, after a burn-in of ten thinning intervals).
    """
    if n < 6:
        raise InvalidGrid(f"degree histograms need n >= 6, got {n}")
    per = []
    if sampler == "lc":
        seeds = [derive_seed(seed, f"degrees/lc/n{n}", i) for i in range(samples)]
        _check_unique(seeds)
        for sd in seeds:
            K, _ = sample_lc_2sphere(2 * n - 4, sd)
            per.append(_degrees_checked(K))
    elif sampler == "boltzmann":
        thin = thin or 10 * n
        o = WeightOracle.facet(derive_seed(seed, "degrees/boltzmann-w", 0), 2)
        burn = 10 * thin
        r = run_chain(n, beta, o, burn + samples * thin, derive_seed(seed, "degrees/boltzmann", 0),
                      thin=thin, keep_samples=True)
        for facets in r.samples[10:]:
            per.append(_degrees_checked(PureComplex(2, n, facets)))
    else:
        raise InvalidGrid(f"sampler must be lc or boltzmann, got {sampler!r}")
    counts = Counter()
    for c in per:
        counts.update(c)
    return DegreeHistogram(sampler, n, len(per), dict(counts), per)


def _degrees_checked(K) -> Counter:
    v = verify(K)
    if not v.ok or not v.spanning:
        raise SpanSphereError(f"sampled complex is not a spanning sphere: {v}")
    return Counter(int(x) for x in degree_counts(K))
