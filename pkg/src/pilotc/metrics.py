"""Evaluation metrics and closed-form error predictors.

The raw size of a trajectory is charged at 8 * (dim + 1) bytes per point
(one float64 per coordinate plus the timestamp); the compression ratio is
compressed bytes over raw bytes, lower meaning better.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

BYTES_PER_VALUE = 8


@dataclass
class EvalReport:
    name: str
    n_points: int
    dim: int
    raw_bytes: int
    compressed_bytes: int
    compression_ratio: float
    max_sed: float | None = None
    mean_sed: float | None = None
    corrected_fraction: float | None = None
    eps: float | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    CSV_HEADER = ("name,n_points,dim,raw_bytes,compressed_bytes,"
                  "compression_ratio,max_sed,mean_sed,corrected_fraction,eps")

    def to_csv_row(self) -> str:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, float):
                return f"{v:.9g}"
            return str(v)
        return ",".join(fmt(v) for v in (
            self.name, self.n_points, self.dim, self.raw_bytes,
            self.compressed_bytes, self.compression_ratio,
            self.max_sed, self.mean_sed, self.corrected_fraction, self.eps,
        ))


def raw_size_bytes(n_points: int, dim: int) -> int:
    return BYTES_PER_VALUE * (dim + 1) * n_points


def compression_ratio(originals, payloads) -> float:
    """Total compressed bytes over total raw bytes for matched sets.

    ``originals`` holds trajectory records (or (n_points, dim) pairs) and
    ``payloads`` the corresponding serialized containers.
    """
    originals = list(originals)
    payloads = list(payloads)
    if not originals or len(originals) != len(payloads):
        raise ValueError("originals and payloads must be non-empty matched sets")
    raw = 0
    for o in originals:
        if isinstance(o, tuple):
            n, dim = o
        else:
            n, dim = o.n_points, o.dim
        raw += raw_size_bytes(n, dim)
    return sum(len(p) for p in payloads) / raw


def _paired_distances(original, reconstructed) -> np.ndarray:
    a = np.asarray(original, dtype=float)
    b = np.asarray(reconstructed, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return np.linalg.norm(a - b, axis=-1)


def max_sed(original, reconstructed) -> float:
    """Largest Euclidean distance between matched original and reconstructed points."""
    return float(_paired_distances(original, reconstructed).max())


def mean_sed(original, reconstructed) -> float:
    return float(_paired_distances(original, reconstructed).mean())


def predicted_exceedance(eps: float, eps_f: float) -> float:
    """Probability that the worst point of a 2-D block exceeds eps:
    exp(-12 eps^2 / eps_f^2)."""
    if eps < 0 or eps_f <= 0:
        raise ValueError("eps must be non-negative and eps_f positive")
    return math.exp(-12.0 * eps * eps / (eps_f * eps_f))


_MEAN_ERROR_FACTOR = {2: 0.335, 3: 0.426}


def predicted_mean_error(eps: float, dim: int) -> float:
    """Expected mean SED at the default frequency precision eps_f = eps/0.6."""
    try:
        return _MEAN_ERROR_FACTOR[dim] * eps
    except KeyError:
        raise ValueError(f"mean-error prediction covers dim 2 and 3, not {dim}") from None


def var_delta_s(k: int, b_s: int, eps_f: float) -> float:
    """Variance of the cumulative reconstruction error at sample k of a block
    whose coefficients carry i.i.d. uniform errors in [-eps_f, eps_f):
    (k*b_s - k^2) * eps_f^2 / (6 * b_s^2)."""
    if not 1 <= k <= b_s:
        raise ValueError(f"k must be in 1..{b_s}, got {k}")
    return (k * b_s - k * k) * eps_f * eps_f / (6.0 * b_s * b_s)
