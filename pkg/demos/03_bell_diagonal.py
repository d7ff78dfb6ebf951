"""Bell-diagonal inputs: closed-form predicates against the PPT test.

Draws valid (c1, c2, c3) triples, clones them both ways and checks that the
inequality form of the broadcasting condition agrees with a direct partial
transpose of the cloned pair.
"""

import numpy as np

from entbroadcast import (
    bell_diagonal,
    bell_local_inseparable,
    bell_nonlocal_inseparable,
    clone,
    ppt_verdict,
    sweep_row,
)
from entbroadcast.states import bell_weights

rng = np.random.default_rng(3)
c = rng.uniform(-1, 1, (20000, 3))
c = c[bell_weights(*c.T).min(axis=0) >= 0][:2000]

for name, pred in (("local", bell_local_inseparable), ("nonlocal", bell_nonlocal_inseparable)):
    agree = hits = 0
    for t in c:
        numeric = ppt_verdict(clone(bell_diagonal(c=t), name, 2).desired_pair).inseparable
        agree += pred(*t) == numeric
        hits += numeric
    print(f"{name}: {agree}/{len(c)} agree, {hits} triples leave the cross pair entangled")

# one row of the local window: c1 = c2 = -7/8, sweep c3
print(sweep_row("belldiag", {"c1": -0.875, "c2": -0.875}, "c3", "local", 2).range)
