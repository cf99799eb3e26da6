"""Edge costs and the greedy tight path.

When costs sit on edges instead of triangles, a sphere with 3n-6 edges
can be built greedily along a "tight path": each new vertex is the
cheapest fresh one joined to the last three.  Every pair is looked at
once, which is what makes the greedy choices independent.

    python3 demos/tight_path.py
"""

from spansphere.constructions import tight_path_sphere
from spansphere.costs import WeightOracle

for n in (250, 1000, 4000):
    o = WeightOracle.edge(n, 2, logging=True)
    tp = tight_path_sphere(n, o)
    print(f"n={n:5d} cost={tp.cost:9.3f} cost/n^(2/3)={tp.cost / n ** (2 / 3):.3f} "
          f"queries={o.log.total} max repeats={o.log.max_count()}")

print("first word letters:", tp.word[:12])
