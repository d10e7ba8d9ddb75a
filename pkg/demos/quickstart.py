"""
Clustering two moons
====================

Bridge-affinity clustering against plain k-means++ on the interleaving half circles.
"""

import numpy as np

from bridgecluster import SBConfig, ari, fit, make_moons
from bridgecluster.model import kmeans_baseline

ds = make_moons(1000, noise=0.05, rng=0)

# 12 Voronoi regions, 2 final clusters
model = fit(ds.x, SBConfig(n_clusters=2, n_regions=12, seed=0))
print("bridge clustering ARI:", round(ari(ds.y, model.point_labels), 3))
print("gamma:", round(model.gamma, 3), " wcss:", round(model.wcss, 3))

# same seed pipeline, but with m = K the method is k-means++
print("k-means++ ARI:", round(ari(ds.y, kmeans_baseline(ds.x, 2, seed=0)), 3))

# the model labels unseen points by their nearest centroid
grid = np.array([[0.0, 1.0], [1.0, -0.5]])
print("predicted:", model.predict(grid))
