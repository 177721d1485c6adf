#!/usr/bin/env python3
"""In two dimensions the range can be full even when the walk crawls.

On Z the range speed equals the walk speed.  On Z^2 that equivalence breaks:
a square spiral visits a brand-new vertex on every single step (r_n = n + 1,
the largest possible range) while its distance from the origin grows only
like sqrt(n), so ||x_n|| / n -> 0.  One direction survives in any dimension:
the running maximum displacement still forces range, M_n / m + 1 <= r_n.
"""

import numpy as np

from rangewalk import check_maximal_range, gen_spiral2d, track_range

STEPS = 100_000

stream = gen_spiral2d(STEPS)
path = stream.path_array(STEPS)

print("square spiral on Z^2, first 10 vertices:")
print(" ", [tuple(v) for v in path[:10].tolist()])

cps, r = track_range(gen_spiral2d(STEPS), STEPS)
print(f"\n{'n':>8} {'r_n':>8} {'r_n/n':>9} {'||x_n||/n':>10}")
for n, rn in zip(cps.tolist()[-5:], r.tolist()[-5:]):
    norm = float(np.sqrt(np.dot(path[n], path[n])))
    print(f"{n:8d} {rn:8d} {rn / n:9.5f} {norm / n:10.6f}")

assert (r == cps + 1).all(), "spiral must claim a new vertex every step"
print(f"\nr_n = n + 1 at every checkpoint: the spiral never repeats a vertex.")

bad = check_maximal_range(gen_spiral2d(STEPS), 1, STEPS)
print(f"maximal-range lower bound M_n/m + 1 <= r_n: {'holds' if bad is None else f'fails at {bad}'}")
print("\nso in d >= 2 a full range tells you nothing about speed -- the")
print("range/speed equivalence is a strictly one-dimensional fact.")
