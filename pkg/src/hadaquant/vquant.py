"""Whole-vector quantization: norm extraction, padding, transform, bucketing.

A vector is stored as its full-precision norm plus per-coordinate bucket
indices of the transformed unit direction. Fresh randomness (sign diagonal
and dither offset) is derived deterministically from (seed, vec_counter),
so the decoder needs only those two tokens.
"""

import math
from dataclasses import dataclass

import numpy as np

from .codebook import MODES, UNBIASED, build_codebook, quantize_scalar
from .transform import (
    STREAM_BASE_SIGNS,
    STREAM_DITHER,
    apply_hd,
    apply_hd_inverse,
    sample_signs,
    stream_rng,
)


@dataclass(frozen=True)
class QuantConfig:
    """Dimensions, bit width and mode shared by encoder and decoder."""

    dim: int
    bits: int
    mode: str = UNBIASED

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if not 1 <= self.bits <= 16:
            raise ValueError(f"bits must lie in [1, 16], got {self.bits}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def padded_dim(self) -> int:
        """Smallest power of two >= dim."""
        return 1 << (self.dim - 1).bit_length()

    @property
    def num_levels(self) -> int:
        return 1 << self.bits


@dataclass(frozen=True)
class VectorCode:
    """Encoded vector: bucket indices, stored norm, and derivation tokens."""

    indices: np.ndarray  # (padded_dim,) uint16
    norm: float
    seed: int
    vec_counter: int


def derive_base_signs(seed: int, vec_counter: int, padded_dim: int):
    return sample_signs(seed, (vec_counter, STREAM_BASE_SIGNS), padded_dim)


def derive_dither(seed: int, vec_counter: int) -> float:
    return float(stream_rng(seed, (vec_counter, STREAM_DITHER)).random())


def _pad(x: np.ndarray, padded_dim: int) -> np.ndarray:
    if x.shape[0] == padded_dim:
        return x
    out = np.zeros(padded_dim)
    out[: x.shape[0]] = x
    return out


def vector_quant(x, config: QuantConfig, seed: int, vec_counter: int) -> VectorCode:
    """Encode x: pad, transform with a fresh sign diagonal, bucket every coordinate."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != config.dim:
        raise ValueError(f"expected a vector of length {config.dim}, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("input vector has NaN or infinite coordinates")
    norm = float(np.linalg.norm(x))
    if norm == 0.0:
        indices = np.zeros(config.padded_dim, dtype=np.uint16)
        return VectorCode(indices, 0.0, int(seed), int(vec_counter))
    diag = derive_base_signs(seed, vec_counter, config.padded_dim)
    cb = build_codebook(config.mode, config.num_levels, derive_dither(seed, vec_counter))
    z = math.sqrt(config.padded_dim) * apply_hd(_pad(x / norm, config.padded_dim), diag)
    indices = quantize_scalar(z, cb).astype(np.uint16)
    return VectorCode(indices, norm, int(seed), int(vec_counter))


def _decode_padded_unit(code: VectorCode, config: QuantConfig) -> np.ndarray:
    # Reconstruction of the unit direction in padded space (no norm scaling,
    # no truncation); shared by the plain decoder and the two-stage codec.
    diag = derive_base_signs(code.seed, code.vec_counter, config.padded_dim)
    cb = build_codebook(config.mode, config.num_levels, derive_dither(code.seed, code.vec_counter))
    y = cb.recon[code.indices] / math.sqrt(config.padded_dim)
    return apply_hd_inverse(y, diag)


def vector_dequant(code: VectorCode, config: QuantConfig) -> np.ndarray:
    """Decode a VectorCode back to a length-dim vector."""
    indices = np.asarray(code.indices)
    if indices.shape != (config.padded_dim,):
        raise ValueError(
            f"index length {indices.shape} does not match padded dim {config.padded_dim}"
        )
    if indices.size and int(indices.max()) >= config.num_levels:
        raise ValueError(f"bucket index >= {config.num_levels}")
    if code.norm == 0.0:
        return np.zeros(config.dim)
    return code.norm * _decode_padded_unit(code, config)[: config.dim]
