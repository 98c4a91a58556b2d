"""Normalized fast Walsh-Hadamard transform and random sign diagonals.

The transform realized here is the Sylvester (tensor-power) construction,
so the matrix is symmetric and the forward and inverse butterflies are the
same up to the sign diagonal. Normalization is applied as a single scale
pass after the butterflies, which keeps the butterfly stages exact in
binary floating point for integer inputs.
"""

from dataclasses import dataclass, field

import numpy as np

_MASK64 = (1 << 64) - 1

# Stage tags for the independent randomness streams derived from one seed.
# The vector quantizer keys its streams by (vec_counter, tag) so that the
# base sign diagonal, the dither offset, the residual sign diagonal and the
# residual sign bits are mutually independent but individually reproducible.
STREAM_BASE_SIGNS = 1
STREAM_DITHER = 2
STREAM_RESIDUAL_SIGNS = 3
STREAM_SIGN_BITS = 4


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def _mix64(x: int) -> int:
    # SplitMix64 finalizer; bijective on 64-bit words.
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def _as_stream_tuple(stream_id) -> tuple:
    if isinstance(stream_id, tuple):
        return tuple(int(t) for t in stream_id)
    return (int(stream_id),)


def stream_rng(seed: int, stream_id) -> np.random.Generator:
    """Counter-based generator for the stream keyed by (seed, stream_id).

    ``stream_id`` may be an integer or a tuple of integers. Distinct ids
    under the same seed give statistically independent Philox streams;
    the same (seed, stream_id) always reproduces the same stream.
    """
    key_lo = _mix64(int(seed))
    for token in _as_stream_tuple(stream_id):
        key_lo = _mix64(key_lo ^ _mix64(token))
    key_hi = _mix64(key_lo ^ 0x9E3779B97F4A7C15)
    return np.random.Generator(np.random.Philox(key=[key_lo, key_hi]))


@dataclass(frozen=True)
class SignDiagonal:
    """A +-1 diagonal plus the tokens it was derived from."""

    signs: np.ndarray
    seed: int = 0
    stream_id: tuple = field(default=())

    def __post_init__(self):
        signs = np.asarray(self.signs, dtype=np.float64)
        if not is_power_of_two(signs.shape[0] if signs.ndim == 1 else 0):
            raise ValueError(
                f"sign diagonal length must be a power of two, got shape {signs.shape}"
            )
        if not np.all(np.abs(signs) == 1.0):
            raise ValueError("sign diagonal entries must be exactly -1 or +1")
        object.__setattr__(self, "signs", signs)

    def __len__(self) -> int:
        return self.signs.shape[0]


def sample_signs(seed: int, stream_id, d: int) -> SignDiagonal:
    """Draw d independent random signs, reproducibly keyed by (seed, stream_id)."""
    if not is_power_of_two(d):
        raise ValueError(f"dimension must be a power of two, got {d}")
    rng = stream_rng(seed, stream_id)
    signs = 2.0 * rng.integers(0, 2, size=d).astype(np.float64) - 1.0
    return SignDiagonal(signs=signs, seed=int(seed), stream_id=_as_stream_tuple(stream_id))


def _fwht_inplace(v: np.ndarray) -> np.ndarray:
    # Unnormalized in-place butterflies followed by one d**-0.5 scale pass.
    d = v.shape[0]
    h = 1
    while h < d:
        pairs = v.reshape(-1, 2, h)
        a = pairs[:, 0, :]
        b = pairs[:, 1, :]
        diff = a - b
        a += b
        b[...] = diff
        h *= 2
    v *= d ** -0.5
    return v


def fwht_normalized(v) -> np.ndarray:
    """Multiply by the normalized Sylvester-Hadamard matrix in O(d log d).

    The input length must be a power of two. The result has the same
    Euclidean norm as the input up to floating-point rounding.
    """
    v = np.array(v, dtype=np.float64)
    if v.ndim != 1 or not is_power_of_two(v.shape[0]):
        raise ValueError(
            f"fwht_normalized needs a 1-d vector with power-of-two length, got shape {v.shape}"
        )
    return _fwht_inplace(v)


def apply_hd(x, diag: SignDiagonal) -> np.ndarray:
    """Randomly flip signs then mix: returns H (D x) for the sign diagonal D."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != diag.signs.shape:
        raise ValueError(f"length mismatch: vector {x.shape} vs diagonal {diag.signs.shape}")
    return _fwht_inplace(x * diag.signs)


def apply_hd_inverse(y, diag: SignDiagonal) -> np.ndarray:
    """Exact inverse of apply_hd: returns D (H^T y); H^T = H here."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape != diag.signs.shape:
        raise ValueError(f"length mismatch: vector {y.shape} vs diagonal {diag.signs.shape}")
    return diag.signs * _fwht_inplace(y.copy())
