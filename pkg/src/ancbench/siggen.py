"""Test-signal generators and 16-bit PCM WAV I/O.

All synthetic generators are pure functions of their arguments and return a
:class:`SignalBuffer`. The default sample rate is 8 kHz.
"""
from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

DEFAULT_FS = 8000.0


@dataclass(frozen=True, eq=False)
class SignalBuffer:
    """A finite real-valued sample sequence with its sample rate."""

    samples: np.ndarray
    sample_rate_hz: float = DEFAULT_FS

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples must be finite")
        if not self.sample_rate_hz > 0:
            raise ValueError("sample_rate_hz must be positive")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "sample_rate_hz", float(self.sample_rate_hz))

    def __len__(self):
        return self.samples.shape[0]

    def __eq__(self, other):
        if not isinstance(other, SignalBuffer):
            return NotImplemented
        return (self.sample_rate_hz == other.sample_rate_hz
                and np.array_equal(self.samples, other.samples))

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate_hz

    def with_samples(self, samples) -> "SignalBuffer":
        return SignalBuffer(samples, self.sample_rate_hz)


def _check_common(n_samples, sample_rate_hz, *freqs):
    if int(n_samples) != n_samples or n_samples <= 0:
        raise ValueError("n_samples must be a positive integer")
    if not sample_rate_hz > 0:
        raise ValueError("sample_rate_hz must be positive")
    nyquist = sample_rate_hz / 2.0
    for f in freqs:
        if f < 0:
            raise ValueError(f"frequency must be non-negative, got {f}")
        if f >= nyquist:
            raise ValueError(f"frequency {f} Hz is at or above Nyquist ({nyquist} Hz)")


def gen_sinusoid(freq_hz, amplitude=1.0, n_samples=8000, sample_rate_hz=DEFAULT_FS,
                 phase_rad=0.0) -> SignalBuffer:
    """``amplitude * sin(2*pi*freq_hz*n/fs + phase_rad)`` for n = 0..n_samples-1."""
    _check_common(n_samples, sample_rate_hz, freq_hz)
    n = np.arange(int(n_samples), dtype=np.float64)
    x = amplitude * np.sin(2.0 * np.pi * freq_hz * n / sample_rate_hz + phase_rad)
    return SignalBuffer(x, sample_rate_hz)


def gen_sawtooth(freq_hz, amplitude=1.0, n_samples=8000,
                 sample_rate_hz=DEFAULT_FS) -> SignalBuffer:
    """Rising ramp from -amplitude towards +amplitude, restarting every period.

    Sample ``n`` is ``amplitude * (2*frac(freq_hz*n/fs) - 1)``, so the first
    sample of each period is exactly ``-amplitude``.
    """
    _check_common(n_samples, sample_rate_hz, freq_hz)
    n = np.arange(int(n_samples), dtype=np.float64)
    cycles = freq_hz * n / sample_rate_hz
    frac = cycles - np.floor(cycles)
    return SignalBuffer(amplitude * (2.0 * frac - 1.0), sample_rate_hz)


def gen_chirp(f0_hz, f1_hz, amplitude=1.0, n_samples=8000,
              sample_rate_hz=DEFAULT_FS) -> SignalBuffer:
    """Linear chirp sweeping ``f0_hz`` to ``f1_hz`` over the buffer duration."""
    _check_common(n_samples, sample_rate_hz, f0_hz, f1_hz)
    n = np.arange(int(n_samples), dtype=np.float64)
    t = n / sample_rate_hz
    T = int(n_samples) / sample_rate_hz
    phase = 2.0 * np.pi * (f0_hz * t + (f1_hz - f0_hz) * t * t / (2.0 * T))
    return SignalBuffer(amplitude * np.sin(phase), sample_rate_hz)


# ---------------------------------------------------------------------------
# WAV I/O
# ---------------------------------------------------------------------------

class WavError(Exception):
    """Base class for WAV decoding problems."""


class WavFormatError(WavError):
    """Not a RIFF/WAVE file, or not 16-bit integer PCM."""


class WavTruncatedError(WavError):
    """The data chunk is shorter than its header claims."""


_PCM = 1
_EXTENSIBLE = 0xFFFE


def load_wav(path) -> SignalBuffer:
    """Read a 16-bit PCM WAV file as floats in [-1, 1).

    Stereo (or any multi-channel) input is averaged to mono. Raises
    ``FileNotFoundError`` for a missing file, :class:`WavFormatError` for an
    unsupported encoding and :class:`WavTruncatedError` for a short data chunk.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 12 or blob[:4] != b"RIFF" or blob[8:12] != b"WAVE":
        raise WavFormatError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    data = None
    pos = 12
    while pos + 8 <= len(blob):
        cid, size = struct.unpack_from("<4sI", blob, pos)
        body = blob[pos + 8:pos + 8 + size]
        if cid == b"fmt ":
            if len(body) < 16:
                raise WavFormatError(f"{path}: fmt chunk too short")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
            if fmt[0] == _EXTENSIBLE and len(body) >= 26:
                # subformat GUID starts with the real format code
                fmt = (struct.unpack_from("<H", body, 24)[0],) + fmt[1:]
        elif cid == b"data":
            if len(body) < size:
                raise WavTruncatedError(
                    f"{path}: data chunk declares {size} bytes, found {len(body)}")
            data = body
            break
        pos += 8 + size + (size & 1)

    if fmt is None:
        raise WavFormatError(f"{path}: missing fmt chunk")
    if data is None:
        raise WavTruncatedError(f"{path}: missing data chunk")
    audio_format, channels, rate, _, block_align, bits = fmt
    if audio_format != _PCM:
        raise WavFormatError(f"{path}: audio format {audio_format} is not PCM")
    if bits != 16:
        raise WavFormatError(f"{path}: {bits}-bit samples, only 16-bit supported")
    if channels < 1 or rate <= 0:
        raise WavFormatError(f"{path}: bad header (channels={channels}, rate={rate})")
    if len(data) % (2 * channels):
        raise WavTruncatedError(f"{path}: data chunk ends mid-frame")

    pcm = np.frombuffer(data, dtype="<i2").astype(np.float64)
    pcm = pcm.reshape(-1, channels).mean(axis=1) / 32768.0
    return SignalBuffer(pcm, float(rate))


def write_wav(buf: SignalBuffer, path) -> None:
    """Write ``buf`` as mono 16-bit PCM, clipping to [-1, 1 - 2**-15]."""
    x = np.clip(buf.samples, -1.0, 1.0 - 2.0 ** -15)
    codes = np.round(x * 32768.0).astype("<i2")
    payload = codes.tobytes()
    rate = int(round(buf.sample_rate_hz))
    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    header += b"fmt " + struct.pack("<IHHIIHH", 16, _PCM, 1, rate, rate * 2, 2, 16)
    header += b"data" + struct.pack("<I", len(payload))
    with open(os.fspath(path), "wb") as fh:
        fh.write(header)
        fh.write(payload)
