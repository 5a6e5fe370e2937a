"""Decompression: rebuild uniform series and answer timestamp queries.

Original timestamps are not stored in the container; the decompressor is a
query API.  A query timestamp resolves to an outlier entry when its
quantized time index matches one, otherwise to the sub-trajectory whose
grid span contains it (the later one winning ties), where the position is
linearly interpolated between the two bracketing uniform samples and any
matching correction entry is added on top.
"""

from __future__ import annotations

import math

import numpy as np

from .blocks import BlockParams, block_decompress
from .codec import dequantize, dequantize_array, time_from_index, time_index_array
from .errors import QueryRangeError
from .model import CompressedTrajectory, UniformSeries, block_lengths
from .params import DEFAULT_PROFILE, derive_block_size


def _block_params(model: CompressedTrajectory, constants) -> BlockParams:
    return BlockParams(
        eps_f=model.eps / constants.a,
        r_ret=min(1.0, constants.d / math.sqrt(model.eps)),
        b_s=derive_block_size(model.eps, constants.b, constants.c),
    )


def decompress_uniform(model: CompressedTrajectory,
                       constants=DEFAULT_PROFILE) -> list[UniformSeries]:
    """Rebuild every sub-trajectory's uniform series.

    ``constants`` is any object carrying the dataset constants ``a, b, c, d``
    (a :class:`~pilotc.params.Profile` or :class:`~pilotc.params.CodecParams`),
    matching the ones used at compression time.
    """
    bp = _block_params(model, constants)
    eps_d = model.eps_p / math.sqrt(model.dim)
    out = []
    for seg in model.segments:
        sizes = block_lengths(seg.n_velocities, bp.b_s)
        values = np.empty((seg.n_samples, model.dim))
        for d in range(model.dim):
            p0 = dequantize(seg.p0_q[d], model.eps_p)
            values[0, d] = p0
            start = p0
            cum = 0
            pos = 0
            for blk, m in zip(seg.blocks[d], sizes):
                cum += blk.end_delta_q
                end = p0 + dequantize(cum, eps_d)
                values[pos + 1: pos + m + 1, d] = block_decompress(blk, m, start, end, bp)[1:]
                start = end
                pos += m
        out.append(UniformSeries(time_from_index(seg.t0_index, model.eps_t),
                                 model.dt, values))
    return out


class Reconstructor:
    """Immutable query engine over one parsed container."""

    def __init__(self, model: CompressedTrajectory, constants=DEFAULT_PROFILE):
        self.model = model
        self.series = decompress_uniform(model, constants)
        self._starts = np.array([s.t0 for s in self.series])
        self._ends = np.array([s.t_end for s in self.series])
        counts = np.array([s.n_samples for s in self.series], dtype=np.int64)
        self._counts = counts
        self._offsets = np.concatenate([[0], np.cumsum(counts)[:-1]]) if len(counts) else np.zeros(0, np.int64)
        self._values = (np.concatenate([s.values for s in self.series])
                        if self.series else np.zeros((0, model.dim)))
        eps_out = model.eps / math.sqrt(model.dim)
        eps_d = model.eps_p / math.sqrt(model.dim)
        self._outlier_idx = np.array([e.t_index for e in model.outliers], dtype=np.int64)
        self._outlier_pos = (dequantize_array(
            np.array([e.coord_q for e in model.outliers], dtype=np.int64), eps_out)
            if model.outliers else np.zeros((0, model.dim)))
        self._corr_idx = np.array([e.t_index for e in model.corrections], dtype=np.int64)
        self._corr_delta = (dequantize_array(
            np.array([e.delta_q for e in model.corrections], dtype=np.int64), eps_d)
            if model.corrections else np.zeros((0, model.dim)))
        extreme = float(np.abs(self._starts).max()) if len(self._starts) else 0.0
        extreme = max(extreme, float(np.abs(self._ends).max()) if len(self._ends) else 0.0)
        # covers t0 quantization (eps_t / 2) plus float dust on long time axes
        self._tol = 0.5 * model.eps_t + 1e-9 * max(1.0, extreme)

    def query(self, timestamps) -> np.ndarray:
        """Positions at the given timestamps, shape (len(timestamps), dim)."""
        ts = np.atleast_1d(np.asarray(timestamps, dtype=float))
        n = ts.shape[0]
        out = np.empty((n, self.model.dim))
        pending = np.ones(n, dtype=bool)

        try:
            q_idx = time_index_array(ts, self.model.eps_t)
        except (OverflowError, ValueError):
            # indices of stored entries fit comfortably, so such a timestamp
            # cannot match anything
            bad = ts[~np.isfinite(ts)] if not np.all(np.isfinite(ts)) else ts
            raise QueryRangeError(float(bad[np.argmax(np.abs(bad))])) from None
        if self._outlier_idx.size:
            pos = np.searchsorted(self._outlier_idx, q_idx)
            pos_c = np.minimum(pos, self._outlier_idx.size - 1)
            hit = self._outlier_idx[pos_c] == q_idx
            if hit.any():
                out[hit] = self._outlier_pos[pos_c[hit]]
                pending[hit] = False

        if pending.any():
            sel = np.flatnonzero(pending)
            t = ts[sel]
            if not len(self._starts):
                raise QueryRangeError(float(t[0]))
            seg = np.searchsorted(self._starts, t, side="right") - 1
            seg_c = np.maximum(seg, 0)
            in_cur = (seg >= 0) & (t <= self._ends[seg_c] + self._tol)
            nxt = np.minimum(seg + 1, len(self._starts) - 1)
            near_next = (seg + 1 <= len(self._starts) - 1) & (t >= self._starts[nxt] - self._tol)
            use_next = ~in_cur & near_next
            resolved = in_cur | use_next
            if not resolved.all():
                raise QueryRangeError(float(t[np.argmin(resolved)]))
            seg = np.where(use_next, nxt, seg_c)

            u = (t - self._starts[seg]) / self.model.dt
            j = np.clip(np.floor(u).astype(np.int64), 0, self._counts[seg] - 2)
            frac = np.clip(u - j, 0.0, 1.0)[:, None]
            base = self._offsets[seg] + j
            vals = self._values[base] * (1.0 - frac) + self._values[base + 1] * frac

            if self._corr_idx.size:
                qi = q_idx[sel]
                pos = np.searchsorted(self._corr_idx, qi)
                pos_c = np.minimum(pos, self._corr_idx.size - 1)
                hit = self._corr_idx[pos_c] == qi
                if hit.any():
                    vals[hit] += self._corr_delta[pos_c[hit]]
            out[sel] = vals

        return out

    def query_one(self, timestamp: float) -> np.ndarray:
        return self.query([timestamp])[0]


def query(model: CompressedTrajectory, timestamps,
          constants=DEFAULT_PROFILE) -> np.ndarray:
    """One-shot convenience wrapper around :class:`Reconstructor`."""
    return Reconstructor(model, constants).query(timestamps)
