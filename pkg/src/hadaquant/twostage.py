"""Two-stage codec for inner-product estimation.

Stage 1 applies the base dithered quantizer to a unit vector; the decoded
point is projected onto the unit ball, which caps the residual norm at 2.
Stage 2 encodes that residual with the sign-bit codec under an independent
sign diagonal. Decoding adds the two reconstructions; the residual stage
decorrelates the total error from any fixed query direction.
"""

import math
from dataclasses import dataclass

import numpy as np

from .codebook import build_codebook
from .residual import (
    ResidualCode,
    derive_residual_signs,
    residual_dequant,
    residual_quant,
    scalar_dequant,
)
from .transform import apply_hd
from .vquant import (
    QuantConfig,
    VectorCode,
    _decode_padded_unit,
    derive_base_signs,
    derive_dither,
    vector_quant,
)


@dataclass(frozen=True)
class TwoStageCode:
    """Base code + residual code + the config snapshot they were made under."""

    base: VectorCode
    residual: ResidualCode
    config: QuantConfig


def project_unit_ball(v) -> np.ndarray:
    """Identity inside the unit ball, radial projection outside."""
    v = np.asarray(v, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    if norm <= 1.0:
        return v.copy()
    return v / norm


def quantize_two_stage(
    x,
    config: QuantConfig,
    seed: int,
    vec_counter: int,
    sign_rng: np.random.Generator | None = None,
) -> TwoStageCode:
    """Encode a unit vector; both stages key their randomness off (seed, vec_counter)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != config.dim:
        raise ValueError(f"expected a vector of length {config.dim}, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("input vector has NaN or infinite coordinates")
    norm = float(np.linalg.norm(x))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"two-stage input must be a unit vector, got norm {norm}")
    base = vector_quant(x, config, seed, vec_counter)
    # The decoder recomputes the identical projected point, so the residual
    # is defined against exactly what the decoder will see.
    approx = project_unit_ball(_decode_padded_unit(base, config))
    padded = np.zeros(config.padded_dim)
    padded[: config.dim] = x
    resid = padded - approx
    residual = residual_quant(resid, config.num_levels, seed, vec_counter, sign_rng=sign_rng)
    return TwoStageCode(base, residual, config)


def dequantize_two_stage(code: TwoStageCode) -> np.ndarray:
    """Decode: projected base reconstruction plus residual, truncated to dim."""
    config = code.config
    approx = project_unit_ball(_decode_padded_unit(code.base, config))
    rhat = residual_dequant(code.residual, config.num_levels)
    if rhat.shape != approx.shape:
        raise ValueError(f"residual length {rhat.shape} does not match {approx.shape}")
    return (approx + rhat)[: config.dim]


def estimate_inner_product(code: TwoStageCode, y, fused: bool = False) -> float:
    """Inner product of y with the decoded vector.

    The fused path evaluates both stages in the transform domain without
    materializing the decoded vector; it agrees with the plain path to
    floating-point rounding (~1e-10 relative).
    """
    y = np.asarray(y, dtype=np.float64)
    config = code.config
    if y.ndim != 1 or y.shape[0] != config.dim:
        raise ValueError(f"expected a vector of length {config.dim}, got shape {y.shape}")
    if not fused:
        return float(y @ dequantize_two_stage(code))

    padded = np.zeros(config.padded_dim)
    padded[: config.dim] = y
    d = config.padded_dim
    base = code.base
    cb = build_codebook(config.mode, config.num_levels, derive_dither(base.seed, base.vec_counter))
    ytab = cb.recon[base.indices] / math.sqrt(d)
    scale = min(1.0, 1.0 / float(np.linalg.norm(ytab)))
    total = scale * float(apply_hd(padded, derive_base_signs(base.seed, base.vec_counter, d)) @ ytab)
    resid = code.residual
    if resid.scale_idx > 0:
        sigma = scalar_dequant(resid.scale_idx, d, config.num_levels)
        q = np.ldexp(sigma, np.asarray(resid.levels)) * np.asarray(resid.signs)
        total += float(
            apply_hd(padded, derive_residual_signs(resid.seed, resid.vec_counter, d)) @ q
        )
    return total
