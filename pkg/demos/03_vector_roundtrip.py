"""Quantize whole vectors and watch the distortion track (pi sqrt3/2) / 4^bits.

Each encode derives fresh randomness from (seed, vec_counter), so codes are
self-describing: the decoder needs only the tokens stored in the code.
"""

import numpy as np

from hadaquant import QuantConfig, vector_dequant, vector_quant

rng = np.random.default_rng(2)
dim = 1024
x = rng.standard_normal(dim)
x /= np.linalg.norm(x)

constant = np.pi * np.sqrt(3) / 2
trials = 400

print(f"unit vector, d = {dim}, {trials} fresh encodes per row")
print(f"{'bits':>4} {'4^b * mean distortion':>22} {'target':>8}")
for bits in range(2, 9):
    cfg = QuantConfig(dim=dim, bits=bits)
    total = 0.0
    for trial in range(trials):
        code = vector_quant(x, cfg, seed=42, vec_counter=trial)
        err = x - vector_dequant(code, cfg)
        total += float(err @ err)
    print(f"{bits:>4} {4.0**bits * total / trials:>22.4f} {constant:>8.4f}")

print("\nnorms are carried at full precision; scale just rides along:")
big = 1337.5 * x
cfg = QuantConfig(dim=dim, bits=6)
code = vector_quant(big, cfg, seed=0, vec_counter=0)
decoded = vector_dequant(code, cfg)
print(f"stored norm = {code.norm:.1f}, relative error "
      f"{np.linalg.norm(big - decoded) / np.linalg.norm(big):.2e}")
