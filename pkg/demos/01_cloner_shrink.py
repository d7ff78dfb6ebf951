"""How much of a two-qubit state survives each cloner.

Clones a random state with the local 1->2 machine and with the nonlocal
1->N machine for N = 2..5, then prints the ratio of output to input Bloch
data.  The local machine keeps 2/3 of the local vectors but only 4/9 of the
correlations; the nonlocal one shrinks everything by the same factor.
"""

from entbroadcast import local_clone, nonlocal_clone, sample_random_state
from entbroadcast.cloners import copy_shrink

s = sample_random_state(seed=11)
print("input purity", round(s.purity, 4))

eta_x, eta_t = local_clone(s).shrink
print(f"local   1->2   eta_x={eta_x:.6f}  eta_T={eta_t:.6f}")

for n in (2, 3, 4, 5):
    eta_x, eta_t = nonlocal_clone(s, n).shrink
    print(f"nonlocal 1->{n}  eta_x={eta_x:.6f}  eta_T={eta_t:.6f}  closed form {copy_shrink(n):.6f}")
