"""Walk through the randomized transform: mixing, orthonormality, inversion.

The transform is the workhorse of the whole codec: a random sign flip per
coordinate followed by a fast Walsh-Hadamard butterfly. It spreads any
input's mass evenly across coordinates (so a worst-case spike becomes a
bounded +-1 profile) while preserving lengths exactly.
"""

import time

import numpy as np

from hadaquant import apply_hd, apply_hd_inverse, fwht_normalized, sample_signs
from hadaquant.oracle import dense_hadamard

rng = np.random.default_rng(0)

print("== a spike spreads evenly ==")
spike = np.zeros(8)
spike[0] = 1.0
print("input :", spike)
print("output:", np.round(fwht_normalized(spike), 4), "(all mass shared)")

print("\n== the fast path matches the explicit matrix ==")
v = rng.standard_normal(16)
err = np.abs(fwht_normalized(v) - dense_hadamard(16) @ v).max()
print(f"max deviation from the dense product at d=16: {err:.2e}")

print("\n== random signs + transform: still an exact isometry ==")
d = 4096
x = rng.standard_normal(d)
diag = sample_signs(seed=7, stream_id=0, d=d)
y = apply_hd(x, diag)
print(f"| ||y|| - ||x|| | = {abs(np.linalg.norm(y) - np.linalg.norm(x)):.2e}")
back = apply_hd_inverse(y, diag)
print(f"round-trip max coordinate error: {np.abs(back - x).max():.2e}")

print("\n== cost grows as d log d ==")
for k in (10, 12, 14):
    d = 1 << k
    z = rng.standard_normal(d)
    t0 = time.perf_counter()
    for _ in range(200):
        fwht_normalized(z)
    dt = (time.perf_counter() - t0) / 200
    print(f"d = {d:6d}: {dt * 1e6:8.1f} us per transform")
