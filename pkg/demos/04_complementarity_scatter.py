"""Complementarity sums of random states, binned by purity.

Uses the same rows the ``scatter`` command writes.  Neither sum ever gets
near its bound (2 for teleportation, 3 for dense coding).
"""

import numpy as np

from entbroadcast import scatter_dataset

rows = scatter_dataset(5000, seed=42, cloner="local")
pur = np.array([r["purity"] for r in rows])
tf = np.array([r["sum_tf"] for r in rows])
dc = np.array([r["sum_dc"] for r in rows])

edges = np.linspace(0.25, 1.0, 7)
print(" purity bin       n   max TF sum  max DC sum")
for lo, hi in zip(edges, edges[1:]):
    m = (pur >= lo) & (pur < hi + 1e-12)
    if m.any():
        print(f" [{lo:.3f}, {hi:.3f})  {m.sum():4d}   {tf[m].max():.4f}      {dc[m].max():.4f}")
print("broadcast in", sum(r["broadcast_ok"] for r in rows), "of", len(rows))
