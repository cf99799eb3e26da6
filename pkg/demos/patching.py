"""Repairing a sphere with missing triangles.

Take a random sphere, delete k of its triangles, and ask for new
triangles that complete the rest to a spanning sphere again.  The
patcher cuts out a disc bounded by a short cycle, retriangulates it
without its interior vertices, and plugs each freed vertex into a
triangle by subdivision.

    python3 demos/patching.py
"""

import numpy as np

from spansphere.costs import WeightOracle
from spansphere.lc import sample_lc_2sphere
from spansphere.patcher import patch_2sphere, patch_s, trivial_patch_cost
from spansphere.simplex import verify

n, k = 200, 20
S, _ = sample_lc_2sphere(2 * n - 4, 3)
rng = np.random.default_rng(3)
facets = sorted(S.facets)
P = {facets[i] for i in rng.choice(len(facets), k, replace=False)}
H = S.with_facets(S.facet_set - P)
o = WeightOracle.facet(3, 2)

s = patch_s(k, n)
r = patch_2sphere(H, S, o, s, seed=3)
sep = r.plan.separator
print(f"separator: |C|={len(sep.C)} freed vertices q={sep.q} (s={s})")
print(f"red facets: {len(r.plan.red)}, colours used: {sorted(set(r.plan.coloring.values()))}")
print(f"stage costs: {r.stage_costs[0]:.3f} + {r.stage_costs[1]:.3f}")
print(f"patch: {r.patch.m} new triangles, cost {r.cost:.3f}")
print(f"putting the deleted triangles back would cost {trivial_patch_cost(H, S, o):.3f}")
v = verify(r.final)
print(f"final complex: {v.outcome.value}, spanning={v.spanning}")
