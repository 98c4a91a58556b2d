"""Residual codec: geometric scale index, doubling levels, randomized signs.

The residual scale ||r||/sqrt(d) is rounded up to a power of two above a
floor of 1/(d * num_levels); a scale index of 0 flags a negligible residual
and skips coordinate coding entirely. Each transformed coordinate then
records the smallest doubling level covering its magnitude plus one sign
bit whose bias makes the decoded coordinate conditionally unbiased.
"""

import math
from dataclasses import dataclass

import numpy as np

from .transform import (
    STREAM_RESIDUAL_SIGNS,
    STREAM_SIGN_BITS,
    apply_hd,
    apply_hd_inverse,
    sample_signs,
    stream_rng,
)

MAX_SCALE_IDX = 255  # one header byte; unreachable for any desk-scale (d, bits)
MAX_LEVEL = 64

# Deterministic per-coordinate storage bound: sum(level_i + 1) never exceeds
# this multiple of d whenever ||r|| <= 2.
LEVEL_SUM_COEFF = 2.0 + 1.0 / (2.0 * math.log(2.0))


def min_scale(padded_dim: int, num_levels: int) -> float:
    """Smallest encodable residual scale; anything below rounds to zero."""
    return 1.0 / (padded_dim * num_levels)


def _ceil_log2(x: float) -> int:
    # ceil(log2 x) by exponent extraction; exact, no floating log.
    m, e = math.frexp(x)
    return e - 1 if m == 0.5 else e


def scalar_quant(s: float, padded_dim: int, num_levels: int) -> int:
    """Scale index for s >= 0: zero below the floor, else a doubling exponent."""
    s = float(s)
    if not s >= 0.0:
        raise ValueError(f"scale must be >= 0, got {s}")
    tau = min_scale(padded_dim, num_levels)
    if s < tau:
        return 0
    idx = _ceil_log2(s / tau) + 1
    if idx > MAX_SCALE_IDX:
        raise RuntimeError(f"scale index {idx} exceeds the one-byte cap")
    return idx


def scalar_dequant(scale_idx: int, padded_dim: int, num_levels: int) -> float:
    """Quantized scale: 0, or the floor times 2**(scale_idx - 1).

    For s >= the floor the round trip satisfies s <= scalar_dequant(...) < 2 s.
    """
    if scale_idx < 0:
        raise ValueError(f"scale index must be >= 0, got {scale_idx}")
    if scale_idx == 0:
        return 0.0
    return math.ldexp(min_scale(padded_dim, num_levels), scale_idx - 1)


@dataclass(frozen=True)
class ResidualCode:
    """Scale index, per-coordinate doubling levels and signs, derivation tokens."""

    scale_idx: int
    levels: np.ndarray  # (d,) int64, all zero when scale_idx == 0
    signs: np.ndarray  # (d,) int8 in {-1,+1}; zero placeholders when scale_idx == 0
    seed: int
    vec_counter: int


def derive_residual_signs(seed: int, vec_counter: int, padded_dim: int):
    return sample_signs(seed, (vec_counter, STREAM_RESIDUAL_SIGNS), padded_dim)


def _doubling_levels(v_abs: np.ndarray, sigma: float) -> np.ndarray:
    # Smallest level with v_abs <= sigma * 2**level. sigma is an exact power
    # of two, so the comparisons below are exact; the log2 first guess is
    # repaired wherever rounding put it off by one.
    with np.errstate(divide="ignore"):
        guess = np.log2(v_abs / sigma)
    lev = np.where(v_abs > 0.0, np.ceil(guess), 0.0)
    lev = np.clip(lev, 0, MAX_LEVEL).astype(np.int64)
    for _ in range(4):
        low = v_abs > np.ldexp(sigma, lev)
        if not low.any():
            break
        lev[low] += 1
    for _ in range(4):
        high = (lev > 0) & (v_abs <= np.ldexp(sigma, lev - 1))
        if not high.any():
            break
        lev[high] -= 1
    if (v_abs > np.ldexp(sigma, lev)).any() or ((lev > 0) & (v_abs <= np.ldexp(sigma, lev - 1))).any():
        raise RuntimeError("level search failed to converge")
    if lev.max(initial=0) > MAX_LEVEL:
        raise RuntimeError(f"doubling level exceeds cap {MAX_LEVEL}")
    return lev


def residual_quant(
    r,
    num_levels: int,
    seed: int,
    vec_counter: int,
    sign_rng: np.random.Generator | None = None,
) -> ResidualCode:
    """Encode a residual with ||r|| <= 2 (power-of-two length).

    Sign bits come from a dedicated stream keyed by (seed, vec_counter) so
    encoding is reproducible yet independent of the sign diagonal; pass an
    explicit generator to draw fresh bits while keeping the diagonal fixed.
    """
    r = np.asarray(r, dtype=np.float64)
    if not np.all(np.isfinite(r)):
        raise ValueError("residual has NaN or infinite coordinates")
    d = r.shape[0]
    norm = float(np.linalg.norm(r))
    if norm > 2.0 * (1.0 + 1e-9):
        raise ValueError(f"residual norm {norm} exceeds the unit-ball bound of 2")
    scale_idx = scalar_quant(norm / math.sqrt(d), d, num_levels)
    if scale_idx == 0:
        return ResidualCode(
            0, np.zeros(d, dtype=np.int64), np.zeros(d, dtype=np.int8), int(seed), int(vec_counter)
        )
    sigma = scalar_dequant(scale_idx, d, num_levels)
    diag = derive_residual_signs(seed, vec_counter, d)
    v = apply_hd(r, diag)
    levels = _doubling_levels(np.abs(v), sigma)
    radius = np.ldexp(sigma, levels)
    p_plus = 0.5 * (1.0 + v / radius)
    rng = sign_rng if sign_rng is not None else stream_rng(seed, (vec_counter, STREAM_SIGN_BITS))
    signs = np.where(rng.random(d) < p_plus, 1, -1).astype(np.int8)
    return ResidualCode(scale_idx, levels, signs, int(seed), int(vec_counter))


def residual_dequant(code: ResidualCode, num_levels: int) -> np.ndarray:
    """Decode a residual code; conditionally unbiased given (diagonal, r)."""
    levels = np.asarray(code.levels)
    signs = np.asarray(code.signs)
    if levels.shape != signs.shape or levels.ndim != 1:
        raise ValueError(f"malformed code: levels {levels.shape} vs signs {signs.shape}")
    d = levels.shape[0]
    if code.scale_idx == 0:
        return np.zeros(d)
    if not np.all(np.abs(signs) == 1):
        raise ValueError("sign entries must be -1 or +1 when the scale index is nonzero")
    sigma = scalar_dequant(code.scale_idx, d, num_levels)
    q = np.ldexp(sigma, levels) * signs
    diag = derive_residual_signs(code.seed, code.vec_counter, d)
    return apply_hd_inverse(q, diag)
