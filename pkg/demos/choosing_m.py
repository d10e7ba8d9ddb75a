"""
Choosing the number of regions
==============================

The WCSS of the quantisation drops quickly until regions stop straddling
cluster boundaries, then flattens.  ``suggest_m`` reports the whole curve
and the first candidate past the elbow.
"""

from bridgecluster import make_moons, suggest_m
from bridgecluster.evaluation import m_sweep

ds = make_moons(1000, noise=0.05, rng=0)
choice, curve = suggest_m(ds.x, 2, [4, 8, 12, 16, 24, 32], rng=0)
for m, w in curve:
    print(f"m={m:3d}  wcss={w:9.3f}")
print("suggested m:", choice)

# what the choice buys in accuracy (mean over three seeds)
for m, a, n in m_sweep(ds, 2, [2, 4, 8, choice, 24], reps=3):
    print(f"m={m:3d}  ARI={a:.3f}  NMI={n:.3f}")
