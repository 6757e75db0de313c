"""Writes the homology table CSV of the standard system straight from the
block pattern: gamma_0 is g0 alone; gamma_i_j is g0 + g_i + ... + g_(j-1)."""
import sys

n = int(sys.argv[1])
cols = [("gamma_0", None)]
cols += [(f"gamma_{i}_{i + 1}", (i, i + 1)) for i in range(1, n)]
cols += [(f"gamma_1_{n}", (1, n))]
cols += [(f"gamma_{i}_{j}", (i, j)) for i in range(1, n + 1) for j in range(i + 2, n + 1) if (i, j) != (1, n)]
print("row," + ",".join(c for c, _ in cols))
for t in range(n + 1):
    entries = []
    for _, ij in cols:
        on = t == 0 or (ij is not None and ij[0] <= t < ij[1])
        entries.append("1" if on else "0")
    print(f"g{t}," + ",".join(entries))
