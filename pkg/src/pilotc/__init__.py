"""Error-bounded, DCT-based lossy compression of timestamped trajectories.

Typical use:

    >>> from pilotc import PROFILES, compress, serialize, parse, Reconstructor
    >>> params = PROFILES["geolife"].params(eps=50.0)
    >>> model = compress(trajectory, params)
    >>> payload = serialize(model, PROFILES["geolife"])
    >>> rec = Reconstructor(parse(payload, PROFILES["geolife"]), PROFILES["geolife"])
    >>> positions = rec.query(trajectory.times)

Every reconstructed position at an original timestamp is guaranteed to lie
within ``eps`` (Euclidean) of the original point.
"""

from .container import pack_archive, parse, serialize, unpack_archive
from .errors import (
    CorruptionError,
    DataError,
    FormatError,
    PilotCError,
    QueryRangeError,
    TruncationError,
)
from .metrics import (
    EvalReport,
    compression_ratio,
    max_sed,
    mean_sed,
    predicted_exceedance,
    predicted_mean_error,
    raw_size_bytes,
    var_delta_s,
)
from .model import (
    CompressedTrajectory,
    CorrectionEntry,
    EncodedBlock,
    OutlierEntry,
    SubTrajectorySegment,
    TrajectoryRecord,
    UniformSeries,
)
from .params import DEFAULT_PROFILE, PROFILES, CodecParams, Profile
from .pipeline import choose_dt, compress, resample, segment, validate_and_correct
from .reconstruct import Reconstructor, decompress_uniform, query
from .synth import synthetic_trajectory

__version__ = "0.1.0"

__all__ = [
    "CodecParams",
    "CompressedTrajectory",
    "CorrectionEntry",
    "CorruptionError",
    "DataError",
    "DEFAULT_PROFILE",
    "EncodedBlock",
    "EvalReport",
    "FormatError",
    "OutlierEntry",
    "PilotCError",
    "PROFILES",
    "Profile",
    "QueryRangeError",
    "Reconstructor",
    "SubTrajectorySegment",
    "TrajectoryRecord",
    "TruncationError",
    "UniformSeries",
    "choose_dt",
    "compress",
    "compression_ratio",
    "decompress_uniform",
    "max_sed",
    "mean_sed",
    "pack_archive",
    "parse",
    "predicted_exceedance",
    "predicted_mean_error",
    "query",
    "raw_size_bytes",
    "resample",
    "segment",
    "serialize",
    "synthetic_trajectory",
    "unpack_archive",
    "validate_and_correct",
    "var_delta_s",
]
