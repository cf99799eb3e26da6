"""How cheap can a spanning 2-sphere be?

Every triangle of the complete 2-complex on [n] gets an independent
uniform cost.  We compare the exact minimum (small n) with the cone
construction over a Hamilton cycle, then watch the cone cost grow like
sqrt(n).

    python3 demos/cheap_spheres.py
"""

import math

import numpy as np

from spansphere.constructions import build_cone_sphere
from spansphere.costs import WeightOracle, derive_seed
from spansphere.oracle import enumerate_2spheres, sphere_costs
from spansphere.simplex import verify

# Small n: enumerate everything.
for n in (5, 6, 7):
    r = enumerate_2spheres(n)
    print(f"n={n}: {r.labeled_count} labelled spheres in {len(r.classes)} classes")

# No construction beats the exact minimum.
o = WeightOracle.facet(derive_seed(1, "demo", 0), 2)
best = sphere_costs(7, o).min()
for method in ("greedy", "greedy2opt", "lk", "exact"):
    _, c = build_cone_sphere(7, 2, o, method)
    print(f"n=7 {method:>10}: {c:.4f}  (exact minimum {best:.4f})")

# Large n: the cone over a good tour costs about 1.9 sqrt(n).
for n in (256, 1024, 4096):
    costs = []
    for t in range(5):
        sphere, c = build_cone_sphere(n, 2, WeightOracle.facet(derive_seed(1, "demo", t), 2), "lk")
        assert verify(sphere.complex).spanning
        costs.append(c)
    print(f"n={n:5d}: median cost / sqrt(n) = {np.median(costs) / math.sqrt(n):.3f}")
