"""Command line entry point.

Options given on the command line override those read from ``--config``
(a flat ``key=value`` file using the long option names), which override
the built-in defaults.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction

from . import bounds as bounds_mod
from .boltzmann import run_chain
from .constructions import build_cone_sphere, tight_path_sphere
from .costs import WeightOracle
from .errors import SpanSphereError
from .experiments import (exp_concentration, exp_degree_histogram, exp_scaling, fit_rows, fmt,
                          write_rows)
from .lc import loads_trace
from .oracle import enumerate_2spheres, min_spanning_sphere_exact, patch_exact
from .patcher import patch_2sphere
from .simplex import dumps, read_complex, verify, write_complex


def _beta(text: str) -> float:
    return math.inf if text.strip().lower() in ("inf", "infinity") else float(text)


def _grid(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]



GLOBAL = {
    "seed": (int, 0, "master seed (u64)"),
    "threads": (int, 1, "worker processes"),
    "out": (str, None, "output file"),
    "format": (str, "csv", "csv or json"),
}

COMMANDS = {
    "verify": {
        "complex": (str, None, "complex file"),
        "certificate": (str, None, "LC trace file"),
    },
    "construct": {
        "d": (int, 2, "dimension"),
        "n": (int, 16, "vertices"),
        "model": (str, "facet", "facet or edge"),
        "method": (str, "greedy2opt", "greedy|greedy2opt|lk|exact|tightpath"),
    },
    "oracle enumerate": {"n": (int, 6, "vertices")},
    "oracle min": {"n": (int, 6, "vertices")},
    "oracle patch": {"n": (int, 6, "vertices"), "complex": (str, None, "complex file H")},
    "bounds": {
        "d": (int, 3, "dimension"),
        "n": (int, 100, "vertices"),
        "beta": (str, None, "entropy exponent, rational"),
        "b": (float, 1.0, "upper constant"),
        "delta": (float, 0.5, "slack"),
    },
    "patch": {
        "complex": (str, None, "complex file H"),
        "witness": (str, None, "witness sphere file S"),
        "s": (int, None, "separator size scale"),
    },
    "boltzmann": {
        "n": (int, 16, "vertices"),
        "beta": (_beta, 0.0, "inverse temperature, or inf"),
        "steps": (int, 10_000, "chain steps"),
        "thin": (int, 1, "trace every this many steps"),
        "trace": (str, None, "trace CSV (step, cost, accepted)"),
    },
    "exp scaling": {
        "d": (int, 2, "dimension"),
        "model": (str, "facet", "facet or edge"),
        "grid": (_grid, "128 256 512 1024", "ascending n values"),
        "trials": (int, 20, "trials per n"),
        "method": (str, "greedy2opt", "construction method"),
    },
    "exp conc": {
        "d": (int, 2, "dimension"),
        "model": (str, "facet", "facet or edge"),
        "grid": (_grid, "5 6 7", "ascending n values"),
        "trials": (int, 100, "trials per n"),
        "method": (str, "greedy2opt", "construction method"),
    },
    "exp degrees": {
        "sampler": (str, "lc", "lc or boltzmann"),
        "n": (int, 20, "vertices"),
        "samples": (int, 1000, "samples"),
        "beta": (_beta, 0.0, "inverse temperature for boltzmann"),
        "thin": (int, None, "chain thinning (default 10n)"),
    },
}


def _add(p: argparse.ArgumentParser, opts: dict) -> None:
    for name, (_, _, help_) in opts.items():
        p.add_argument(f"--{name}", default=argparse.SUPPRESS, help=help_)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spansphere",
                                description="Minimum-cost spanning spheres: constructions, "
                                            "oracles, bounds, patching and flip chains.")
    p.add_argument("--config", default=argparse.SUPPRESS, help="key=value file")
    _add(p, GLOBAL)
    sub = p.add_subparsers(dest="command", required=True)
    groups = {}
    for cmd, opts in COMMANDS.items():
        parts = cmd.split()
        if len(parts) == 1:
            leaf = sub.add_parser(parts[0])
        else:
            if parts[0] not in groups:
                g = sub.add_parser(parts[0])
                groups[parts[0]] = g.add_subparsers(dest="action", required=True)
            leaf = groups[parts[0]].add_parser(parts[1])
        leaf.add_argument("--config", default=argparse.SUPPRESS, help="key=value file")
        _add(leaf, GLOBAL)
        _add(leaf, opts)
        leaf.set_defaults(_cmd=cmd)
    return p


def read_config(path) -> dict:
    cfg = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SpanSphereError(f"config line without '=': {line!r}")
            k, v = line.split("=", 1)
            cfg[k.strip().lstrip("-").replace("_", "-")] = v.strip()
    return cfg


def resolve(argv=None) -> tuple[str, dict]:
    """Parse ``argv`` and merge defaults, config file and flags."""
    ns = vars(build_parser().parse_args(argv))
    cmd = ns.pop("_cmd")
    ns.pop("command", None)
    ns.pop("action", None)
    table = {**GLOBAL, **COMMANDS[cmd]}
    cfg = read_config(ns.pop("config")) if "config" in ns else {}
    unknown = set(cfg) - set(table)
    if unknown:
        raise SpanSphereError(f"unknown config keys for {cmd}: {sorted(unknown)}")
    out = {}
    for name, (typ, default, _) in table.items():
        key = name.replace("-", "_")
        if key in ns:
            raw = ns[key]
        elif name in cfg:
            raw = cfg[name]
        else:
            out[key] = typ(default) if isinstance(default, str) and typ is not str else default
            continue
        out[key] = typ(raw)
    return cmd, out


def _need(a: dict, *names) -> None:
    missing = [n for n in names if a.get(n) is None]
    if missing:
        raise SpanSphereError("missing option(s): " + ", ".join("--" + m for m in missing))


def _emit(rows, a: dict, columns=None) -> None:
    text = write_rows(rows, a["out"], a["format"], columns)
    if a["out"] is None:
        sys.stdout.write(text)


def cmd_verify(a) -> int:
    _need(a, "complex")
    K = read_complex(a["complex"])
    cert = None
    if a["certificate"]:
        with open(a["certificate"]) as fh:
            cert = loads_trace(fh.read())
    v = verify(K, cert)
    print(f"outcome={v.outcome.value} spanning={v.spanning} reason={v.reason or ''}")
    return 0 if v.ok else 1


def cmd_construct(a) -> int:
    d, n, model, method = a["d"], a["n"], a["model"], a["method"]
    if model == "edge" or method == "tightpath":
        if model != "edge" or method != "tightpath":
            raise SpanSphereError("tightpath is the edge-model construction")
        tp = tight_path_sphere(n, WeightOracle.edge(a["seed"], d))
        K, cost = tp.complex, tp.cost
    else:
        sphere, cost = build_cone_sphere(n, d, WeightOracle.facet(a["seed"], d), method)
        K = sphere.complex
    if a["out"]:
        write_complex(a["out"], K)
    print(f"cost={fmt(cost)} facets={K.m}")
    return 0


def cmd_oracle(a, action) -> int:
    n = a["n"]
    if action == "enumerate":
        r = enumerate_2spheres(n)
        print(f"count={r.labeled_count}")
        for c in r.classes:
            print(f"class aut={c.automorphisms} labeled={c.labeled}")
    elif action == "min":
        S, cost = min_spanning_sphere_exact(n, WeightOracle.facet(a["seed"], 2))
        if a["out"]:
            write_complex(a["out"], S)
        print(f"min={fmt(cost)}")
    else:
        _need(a, "complex")
        q = patch_exact(read_complex(a["complex"]), n, WeightOracle.facet(a["seed"], 2))
        print(f"rho={q.rho} patch={fmt(q.patch_cost)}")
    return 0


def cmd_bounds(a) -> int:
    beta = Fraction(a["beta"]) if a["beta"] is not None else None
    rep = bounds_mod.report(a["d"], a["n"], beta, a["b"], a["delta"])
    for k, v in rep.items():
        print(f"{k}={fmt(v)}")
    return 0


def cmd_patch(a) -> int:
    _need(a, "complex", "witness", "s")
    H, S = read_complex(a["complex"]), read_complex(a["witness"])
    r = patch_2sphere(H, S, WeightOracle.facet(a["seed"], 2), a["s"], seed=a["seed"])
    v = verify(r.final)
    print(f"patchcost={fmt(r.cost)} k={r.k} ok={v.ok and v.spanning}")
    if a["out"]:
        write_complex(a["out"], r.final)
    else:
        sys.stdout.write(dumps(r.final))
    return 0


def cmd_boltzmann(a) -> int:
    o = WeightOracle.facet(a["seed"], 2)
    r = run_chain(a["n"], a["beta"], o, a["steps"], a["seed"], thin=a["thin"])
    mode = "descent" if r.descent else "sampler"
    print(f"mode={mode} cost={fmt(float(r.costs[-1]) if len(r.costs) else o.complex_cost(r.final))}"
          f" acceptance={fmt(r.acceptance_rate)}")
    if a["trace"]:
        thin = max(1, a["thin"])
        rows = [{"step": (i + 1) * thin, "cost": float(c), "accepted": int(x)}
                for i, (c, x) in enumerate(zip(r.costs, r.accepted))]
        write_rows(rows, a["trace"], "csv", ["step", "cost", "accepted"])
    if a["out"]:
        write_complex(a["out"], r.final)
    return 0


def cmd_exp(a, action) -> int:
    if action == "scaling":
        fit, records = exp_scaling(a["d"], a["model"], a["grid"], a["trials"], a["method"],
                                   a["seed"], a["threads"])
        _emit(records, a)
        print(f"# slope={fmt(fit.slope)} se={fmt(fit.slope_se)} intercept={fmt(fit.intercept)}",
              file=sys.stderr)
        for row in fit_rows(fit):
            print("# " + " ".join(f"{k}={fmt(v)}" for k, v in row.items()), file=sys.stderr)
    elif action == "conc":
        rows = exp_concentration(a["d"], a["model"], a["grid"], a["trials"], a["seed"],
                                 a["method"], a["threads"])
        _emit(rows, a)
    else:
        h = exp_degree_histogram(a["sampler"], a["n"], a["samples"], a["seed"], a["beta"],
                                 a["thin"])
        _emit(h.rows(), a, ["degree", "count"])
    return 0


def main(argv=None) -> int:
    try:
        cmd, a = resolve(argv)
        head, _, action = cmd.partition(" ")
        if head == "verify":
            rc = cmd_verify(a)
        elif head == "construct":
            rc = cmd_construct(a)
        elif head == "oracle":
            rc = cmd_oracle(a, action)
        elif head == "bounds":
            rc = cmd_bounds(a)
        elif head == "patch":
            rc = cmd_patch(a)
        elif head == "boltzmann":
            rc = cmd_boltzmann(a)
        else:
            rc = cmd_exp(a, action)
        return rc
    except SpanSphereError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
