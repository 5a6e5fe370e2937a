"""Per-block coding of one spatial dimension.

Compression turns a signal block of m+1 samples into at most
``max(1, ceil(m * r_ret)) - 1`` quantized AC coefficients: velocities are
zero-centered against the block's average velocity, transformed, quantized
with step ``eps_f``, truncated to the retention budget, and stripped of
trailing zeros.  The DC coefficient is identically zero and never stored.

Decompression is the exact mirror and anchors the block on externally
supplied start and end values, so per-block errors never accumulate across
a trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codec import dequantize_array, quantize_array
from .errors import CorruptionError
from .model import EncodedBlock
from .transform import dct_forward, dct_inverse


@dataclass(frozen=True)
class BlockParams:
    eps_f: float   # frequency quantization half-step
    r_ret: float   # retained fraction of low-frequency slots
    b_s: int       # nominal block size (velocities per full block)

    def __post_init__(self) -> None:
        if self.eps_f <= 0.0:
            raise ValueError(f"eps_f must be positive, got {self.eps_f}")
        if not 0.0 < self.r_ret <= 1.0:
            raise ValueError(f"r_ret must be in (0, 1], got {self.r_ret}")
        if self.b_s < 2:
            raise ValueError(f"b_s must be at least 2, got {self.b_s}")


def coeff_budget(m: int, r_ret: float) -> int:
    """Retained slot count K; slots 1..K-1 may hold AC coefficients."""
    return max(1, math.ceil(m * r_ret))


def block_compress(samples, params: BlockParams) -> EncodedBlock:
    """Encode one block; ``samples`` holds m+1 values for m velocities."""
    s = np.asarray(samples, dtype=float)
    m = s.shape[0] - 1
    if m < 1:
        raise ValueError("block must contain at least two samples")
    velocities = np.diff(s)
    v_avg = (s[-1] - s[0]) / m
    centered = velocities - v_avg
    # zero-centered by construction; guards the discarded-DC assumption
    assert abs(centered.sum()) <= 1e-9 * m * np.abs(centered).max() + 1e-12
    spectrum = dct_forward(centered)
    budget = coeff_budget(m, params.r_ret)
    q = quantize_array(spectrum[1:budget], params.eps_f)
    nonzero = np.flatnonzero(q)
    if nonzero.size:
        q = q[: nonzero[-1] + 1]
    else:
        q = q[:0]
    return EncodedBlock(q_coeffs=tuple(int(v) for v in q))


def block_decompress(block: EncodedBlock, m: int, start_value: float,
                     end_value: float, params: BlockParams) -> np.ndarray:
    """Reconstruct the m+1 samples of one block between its anchor values."""
    if m < 1:
        raise ValueError("block must contain at least one velocity")
    if block.c_f >= m:
        raise CorruptionError(
            f"block holds {block.c_f} coefficients but only {m} velocities"
        )
    spectrum = np.zeros(m)
    if block.c_f:
        spectrum[1:1 + block.c_f] = dequantize_array(block.q_coeffs, params.eps_f)
    centered = dct_inverse(spectrum)
    v_avg = (end_value - start_value) / m
    out = np.empty(m + 1)
    out[0] = start_value
    out[1:] = start_value + np.cumsum(centered + v_avg)
    out[-1] = end_value  # sum of centered velocities is zero up to float dust
    return out
