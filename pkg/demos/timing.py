"""
Fit time grows linearly
=======================

Mean fit time on 10-dimensional Gaussian blobs, sweeping n at m = 10.
"""

from bridgecluster.evaluation import time_fit

table = time_fit([1000, 2000, 4000, 8000], sweep="n", reps=3, fixed_m=10)
print(table.to_csv())
print(f"slope {table.slope:.4f} ms/point, R2 {table.r2:.3f}")
