"""Codec parameters and named dataset profiles.

The compressor is driven by a single error bound ``eps`` (max allowed SED,
in position units).  Three internal knobs derive from it:

    eps_f = eps / a                   frequency quantization half-step
    b_s   = round(b * eps + c)        block size, at least 2
    r_ret = min(1, d / sqrt(eps))     retained fraction of low frequencies

The constants ``a, b, c, d`` are dataset-dependent; ``PROFILES`` ships the
tuned sets.  A container must be decoded with the same constants it was
encoded with (they are deliberately not stored in the file).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .codec import round_half_away


def derive_block_size(eps: float, b: float, c: float) -> int:
    return max(2, round_half_away(b * eps + c))


@dataclass(frozen=True)
class CodecParams:
    """Full parameter set for one compression run."""

    eps: float
    a: float = 0.6
    b: float = 0.5
    c: float = 25.0
    d: float = 1.1
    v_max: float = 200.0
    eps_t: float = 1.0
    chunk_bits: int = 2
    eps_p_factor: float = 0.5

    def __post_init__(self) -> None:
        if not (self.eps > 0.0 and math.isfinite(self.eps)):
            raise ValueError(f"eps must be positive and finite, got {self.eps}")
        if self.a <= 0.0 or self.d <= 0.0:
            raise ValueError("constants a and d must be positive")
        if self.v_max <= 0.0:
            raise ValueError(f"v_max must be positive, got {self.v_max}")
        if self.eps_t <= 0.0:
            raise ValueError(f"eps_t must be positive, got {self.eps_t}")
        if not 1 <= self.chunk_bits <= 32:
            raise ValueError(f"chunk_bits must be in 1..32, got {self.chunk_bits}")
        if not 0.0 < self.eps_p_factor <= 1.0:
            raise ValueError(f"eps_p_factor must be in (0, 1], got {self.eps_p_factor}")

    @property
    def eps_f(self) -> float:
        return self.eps / self.a

    @property
    def b_s(self) -> int:
        return derive_block_size(self.eps, self.b, self.c)

    @property
    def r_ret(self) -> float:
        return min(1.0, self.d / math.sqrt(self.eps))

    @property
    def eps_p(self) -> float:
        return self.eps_p_factor * self.eps

    def eps_d(self, dim: int) -> float:
        """Per-dimension correction step: the point budget split over dims."""
        return self.eps_p / math.sqrt(dim)

    def eps_outlier(self, dim: int) -> float:
        """Per-dimension outlier step: the full error budget split over dims."""
        return self.eps / math.sqrt(dim)


@dataclass(frozen=True)
class Profile:
    """Dataset constants plus encoding defaults, independent of eps."""

    name: str
    a: float
    b: float
    c: float
    d: float
    v_max: float = 200.0
    eps_t: float = 1.0
    chunk_bits: int = 2
    eps_p_factor: float = 0.5

    def params(self, eps: float, **overrides) -> CodecParams:
        base = CodecParams(
            eps=eps, a=self.a, b=self.b, c=self.c, d=self.d,
            v_max=self.v_max, eps_t=self.eps_t, chunk_bits=self.chunk_bits,
            eps_p_factor=self.eps_p_factor,
        )
        return replace(base, **overrides) if overrides else base


PROFILES: dict[str, Profile] = {
    "nuplan": Profile("nuplan", a=0.6, b=20.0, c=100.0, d=0.04, eps_t=0.01),
    "geolife": Profile("geolife", a=0.6, b=0.5, c=25.0, d=1.1, eps_t=1.0),
    "geolife3d": Profile("geolife3d", a=0.7, b=0.5, c=25.0, d=0.8, eps_t=1.0),
    "mopsi": Profile("mopsi", a=0.6, b=1.0, c=25.0, d=0.6, eps_t=0.001),
}

DEFAULT_PROFILE = PROFILES["geolife"]
