"""From uniform triangulations to cheap ones.

A Metropolis chain of diagonal flips targets exp(-beta * cost).  At
beta=0 it samples labelled spheres uniformly, so the mean cost is n-2;
raising beta pulls the chain toward cheap spheres.

    python3 demos/flip_chain.py
"""

import math

from spansphere.boltzmann import boltzmann_cost_stats, run_chain
from spansphere.costs import WeightOracle

n = 16
for row in boltzmann_cost_stats(n, [0.0, 1.0, 2.0, 4.0, 8.0], trials=6, steps=40_000):
    print(f"beta={row.beta:4g}  mean cost {row.mean:7.3f} +- {row.stderr:.3f}")

r = run_chain(n, math.inf, WeightOracle.facet(0, 2), 20_000, 0)
print(f"descent (beta=inf) ends at {r.costs[-1]:.3f}, acceptance {r.acceptance_rate:.3f}")
