"""Bit-level coding primitives: quantization, Zigzag mappings, Varint, bitstreams.

The Varint here is bit-oriented rather than byte-oriented.  A value is split
into ``chunk_bits``-bit payload chunks, least-significant chunk first.  Each
chunk is emitted as one continuation flag (1 = more chunks follow, 0 = final
chunk) followed by its payload bits, most-significant bit first.  Trailing
all-zero chunks are never emitted, so the final chunk is the highest nonzero
one (or a single zero chunk for the value 0).

When the payload domain is the enhanced Zigzag mapping (every code >= 1) and
``chunk_bits == 1``, the final chunk's payload bit is provably 1 and may be
omitted from storage; the reader restores it when the final flag is seen.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import CorruptionError, TruncationError

_U64_LIMIT = 1 << 64
_EXACT_FLOAT = float(1 << 53)  # largest range where float64 holds exact integers


def round_half_away(v: float) -> int:
    """Round to the nearest integer, ties away from zero."""
    if v >= 0.0:
        return int(math.floor(v + 0.5))
    return int(math.ceil(v - 0.5))


# ---------------------------------------------------------------------------
# scalar quantization: values are stored as the nearest multiple of 2*step,
# so the reconstruction error never exceeds step
# ---------------------------------------------------------------------------

def quantize(x: float, step: float) -> int:
    """Map ``x`` to the index of the nearest multiple of ``2 * step``."""
    if step <= 0.0 or not math.isfinite(step):
        raise ValueError(f"quantization step must be positive and finite, got {step}")
    if not math.isfinite(x):
        raise ValueError(f"cannot quantize non-finite value {x}")
    return round_half_away(x / (2.0 * step))


def dequantize(q: int, step: float) -> float:
    return q * (2.0 * step)


def quantize_array(x, step: float) -> np.ndarray:
    """Vectorized :func:`quantize`; returns int64 indices."""
    if step <= 0.0 or not math.isfinite(step):
        raise ValueError(f"quantization step must be positive and finite, got {step}")
    v = np.asarray(x, dtype=float)
    if v.size and not np.all(np.isfinite(v)):
        raise ValueError("cannot quantize non-finite values")
    scaled = np.abs(v) / (2.0 * step) + 0.5
    if v.size and scaled.max() >= _EXACT_FLOAT:
        raise OverflowError("quantized index exceeds the exact integer range of float64")
    return (np.sign(v) * np.floor(scaled)).astype(np.int64)


def dequantize_array(q, step: float) -> np.ndarray:
    return np.asarray(q, dtype=float) * (2.0 * step)


# ---------------------------------------------------------------------------
# timestamp quantization: time indices use step eps_t (not 2*eps_t), so the
# reconstruction error is at most eps_t / 2
# ---------------------------------------------------------------------------

def time_index(t: float, eps_t: float) -> int:
    if eps_t <= 0.0:
        raise ValueError(f"time precision must be positive, got {eps_t}")
    return round_half_away(t / eps_t)


def time_from_index(idx: int, eps_t: float) -> float:
    return idx * eps_t


def time_index_array(t, eps_t: float) -> np.ndarray:
    if eps_t <= 0.0:
        raise ValueError(f"time precision must be positive, got {eps_t}")
    v = np.asarray(t, dtype=float) / eps_t
    scaled = np.abs(v) + 0.5
    if v.size and scaled.max() >= _EXACT_FLOAT:
        raise OverflowError("time index exceeds the exact integer range of float64")
    return (np.sign(v) * np.floor(scaled)).astype(np.int64)


# ---------------------------------------------------------------------------
# signed <-> unsigned mappings
# ---------------------------------------------------------------------------

def zigzag_map(n: int) -> int:
    """n >= 0 -> 2n, n < 0 -> 2|n| - 1."""
    u = 2 * n if n >= 0 else 2 * (-n) - 1
    if u >= _U64_LIMIT:
        raise OverflowError(f"zigzag code for {n} exceeds 64 bits")
    return u


def zigzag_unmap(u: int) -> int:
    if u < 0:
        raise ValueError(f"zigzag code must be non-negative, got {u}")
    return u // 2 if u % 2 == 0 else -((u + 1) // 2)


def enhanced_zigzag_map(n: int) -> int:
    """n >= 0 -> 2n + 1, n < 0 -> 2|n|; the result is always >= 1."""
    u = 2 * n + 1 if n >= 0 else 2 * (-n)
    if u >= _U64_LIMIT:
        raise OverflowError(f"enhanced zigzag code for {n} exceeds 64 bits")
    return u


def enhanced_zigzag_unmap(u: int) -> int:
    if u < 1:
        raise ValueError(f"enhanced zigzag code must be >= 1, got {u}")
    return (u - 1) // 2 if u % 2 == 1 else -(u // 2)


# ---------------------------------------------------------------------------
# delta indexing
# ---------------------------------------------------------------------------

def delta_encode(values) -> np.ndarray:
    """First element kept, every later one replaced by its delta."""
    v = np.asarray(values, dtype=np.int64)
    if v.size == 0:
        return v.copy()
    out = np.empty_like(v)
    out[0] = v[0]
    np.subtract(v[1:], v[:-1], out=out[1:])
    return out


def delta_decode(deltas) -> np.ndarray:
    d = np.asarray(deltas, dtype=np.int64)
    return np.cumsum(d, dtype=np.int64)


# ---------------------------------------------------------------------------
# bitstream
# ---------------------------------------------------------------------------

class BitStream:
    """Append-only bit buffer with an independent read cursor.

    Bits map to bytes most-significant-bit first: the first bit written
    becomes the MSB of byte 0.  ``to_bytes`` pads the final partial byte
    with zero bits.  Single writer, single reader; not thread-safe.
    """

    __slots__ = ("_buf", "_acc", "_nacc", "_cursor")

    def __init__(self) -> None:
        self._buf = bytearray()
        self._acc = 0  # pending bits not yet flushed to _buf
        self._nacc = 0
        self._cursor = 0

    @classmethod
    def from_bytes(cls, data: bytes) -> "BitStream":
        s = cls()
        s._buf = bytearray(data)
        return s

    @property
    def bit_length(self) -> int:
        return 8 * len(self._buf) + self._nacc

    @property
    def cursor(self) -> int:
        return self._cursor

    @property
    def remaining_bits(self) -> int:
        return self.bit_length - self._cursor

    def seek(self, bit_position: int) -> None:
        if not 0 <= bit_position <= self.bit_length:
            raise ValueError(f"cannot seek to bit {bit_position} of {self.bit_length}")
        self._cursor = bit_position

    def write_bit(self, bit: int) -> None:
        self.write_bits(bit, 1)

    def write_bits(self, value: int, count: int) -> None:
        if count < 0 or value < 0 or value >> count:
            raise ValueError(f"value {value} does not fit in {count} bits")
        acc = (self._acc << count) | value
        nacc = self._nacc + count
        buf = self._buf
        while nacc >= 8:
            nacc -= 8
            buf.append((acc >> nacc) & 0xFF)
        self._acc = acc & ((1 << nacc) - 1)
        self._nacc = nacc

    def write_bytes(self, data: bytes) -> None:
        if self._nacc == 0:
            self._buf.extend(data)
        else:
            for b in data:
                self.write_bits(b, 8)

    def read_bit(self) -> int:
        return self.read_bits(1)

    def read_bits(self, count: int) -> int:
        start = self._cursor
        end = start + count
        if end > self.bit_length:
            raise TruncationError(
                f"bitstream exhausted: wanted {count} bits at {start}, "
                f"have {self.bit_length}"
            )
        self._cursor = end
        packed = 8 * len(self._buf)
        if end <= packed:
            first = start >> 3
            last = (end + 7) >> 3
            window = int.from_bytes(self._buf[first:last], "big")
            return (window >> (8 * last - end)) & ((1 << count) - 1)
        # request crosses into the unflushed tail; rare and small
        result = 0
        for i in range(start, end):
            if i < packed:
                bit = (self._buf[i >> 3] >> (7 - (i & 7))) & 1
            else:
                j = i - packed
                bit = (self._acc >> (self._nacc - 1 - j)) & 1
            result = (result << 1) | bit
        return result

    def read_bytes(self, count: int) -> bytes:
        start = self._cursor
        if start % 8 == 0 and start + 8 * count <= 8 * len(self._buf):
            self._cursor = start + 8 * count
            off = start >> 3
            return bytes(self._buf[off:off + count])
        return bytes(self.read_bits(8) for _ in range(count))

    def to_bytes(self) -> bytes:
        out = bytes(self._buf)
        if self._nacc:
            out += bytes([(self._acc << (8 - self._nacc)) & 0xFF])
        return out


# ---------------------------------------------------------------------------
# varint
# ---------------------------------------------------------------------------

def varint_write(stream: BitStream, value: int, chunk_bits: int,
                 omit_final_bit: bool = False) -> None:
    """Write ``value`` as flag-prefixed chunks of ``chunk_bits`` payload bits."""
    if not 1 <= chunk_bits <= 32:
        raise ValueError(f"chunk length must be in 1..32, got {chunk_bits}")
    if value < 0:
        raise ValueError(f"varint value must be non-negative, got {value}")
    if value >= _U64_LIMIT:
        raise OverflowError(f"varint value {value} exceeds 64 bits")
    if omit_final_bit and (chunk_bits != 1 or value < 1):
        raise ValueError("final-bit omission requires chunk length 1 and value >= 1")
    mask = (1 << chunk_bits) - 1
    chunks = [value & mask]
    value >>= chunk_bits
    while value:
        chunks.append(value & mask)
        value >>= chunk_bits
    flag = 1 << chunk_bits
    for c in chunks[:-1]:
        stream.write_bits(flag | c, chunk_bits + 1)
    if omit_final_bit:
        stream.write_bit(0)  # final payload is provably 1, not stored
    else:
        stream.write_bits(chunks[-1], chunk_bits + 1)


def varint_read(stream: BitStream, chunk_bits: int, omit_final_bit: bool = False) -> int:
    if not 1 <= chunk_bits <= 32:
        raise ValueError(f"chunk length must be in 1..32, got {chunk_bits}")
    result = 0
    shift = 0
    while True:
        flag = stream.read_bit()
        if flag == 0 and omit_final_bit:
            payload = 1
        else:
            payload = stream.read_bits(chunk_bits)
        result |= payload << shift
        if flag == 0:
            return result
        shift += chunk_bits
        if shift > 64:
            raise CorruptionError("varint longer than any encodable value")
