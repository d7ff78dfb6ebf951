"""Broadcasting windows and complementarity sums for Werner-like states.

For a few values of alpha^2 we sweep p, print where both cross pairs stay
entangled while the same-side pairs are separable, and report the largest
dTF + FB and dDC + FB inside that window under both fidelity conventions.
"""

from entbroadcast import sweep_row, werner_local_range, werner_nonlocal_range

for cloner in ("local", "nonlocal"):
    print(f"--- {cloner} cloning, 2 copies")
    for a2 in (0.2, 0.4, 0.5):
        row = sweep_row("werner", {"alpha2": a2}, "p", cloner, 2)
        closed = werner_local_range(a2) if cloner == "local" else werner_nonlocal_range(alpha2=a2)
        sums = "  ".join(
            f"{conv}: TF {row.stat(f'sum_tf/{conv}'):.3f} DC {row.stat(f'sum_dc/{conv}/unclamped'):.3f}"
            for conv in ("root", "squared")
        )
        print(f"alpha2={a2}  p in {row.range}  (closed form {closed})  {sums}")

# more copies squeeze the window until nothing is left
print("--- nonlocal, alpha2 = 0.2")
for n in (2, 3, 4, 5):
    print(n, "copies:", sweep_row("werner", {"alpha2": 0.2}, "p", "nonlocal", n).range)
