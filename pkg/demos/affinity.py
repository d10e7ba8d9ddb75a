"""
Bridge affinity: closed form and brute force
============================================

The affinity between two regions is the mean squared margin of their points
on the segment joining the centroids.  It also equals the inertia gap
between "two balls" and "a bridge", which we compute here directly.
"""

import time

import numpy as np

from bridgecluster.bridge import bridge_inertia_gap, raw_affinity, raw_affinity_naive
from bridgecluster.data import make_impossible
from bridgecluster.quantize import kmeans

# a toy 1-D example: regions {-0.1, 0.1} and {0.9, 1.1}
x = np.array([[-0.1], [0.1], [0.9], [1.1]])
q = kmeans(x, 2, rng=0)
print("closed form:", raw_affinity(x, q)[0, 1])
print("inertia gap:", bridge_inertia_gap(x, q, 0, 1))

# the batched computation against a double loop on a realistic size
x = make_impossible(rng=0).x
q = kmeans(x, 250, rng=0, restarts=1)
t = time.perf_counter()
fast = raw_affinity(x, q)
t_fast = time.perf_counter() - t
t = time.perf_counter()
slow = raw_affinity_naive(x, q)
t_slow = time.perf_counter() - t
print(f"max difference {np.abs(fast - slow).max():.1e}, speedup {t_slow / t_fast:.0f}x")
