"""Interference sources, the unknown noise path and SNR-controlled mixing.

Every random draw goes through numpy's ``PCG64`` bit generator
(``numpy.random.default_rng(seed)``) and its ziggurat normal sampler, so a
given seed reproduces the same samples on any platform numpy supports.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .siggen import DEFAULT_FS, SignalBuffer

NOISE_KINDS = ("white", "pink", "burst")
PINK_MIN_SAMPLES = 1024


@dataclass(frozen=True)
class NoiseSpec:
    """Reference-noise source description.

    ``burst_on_prob`` and ``burst_off_prob`` are the per-sample off->on and
    on->off transition probabilities of the burst gate.
    """

    kind: str = "white"
    seed: int = 0
    burst_on_prob: float = 0.01
    burst_off_prob: float = 0.05
    burst_gain: float = 1.0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        for name in ("burst_on_prob", "burst_off_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if not self.burst_gain > 0:
            raise ValueError("burst_gain must be positive")


@dataclass(frozen=True)
class ChannelSpec:
    """FIR path from the reference noise to the primary interference."""

    taps: tuple = (1.0,)
    seed: int | None = field(default=None, compare=False)

    def __post_init__(self):
        taps = tuple(float(t) for t in np.atleast_1d(np.asarray(self.taps, dtype=float)))
        if not taps:
            raise ValueError("channel needs at least one tap")
        if not any(taps):
            raise ValueError("channel needs at least one nonzero tap")
        if not all(np.isfinite(taps)):
            raise ValueError("channel taps must be finite")
        object.__setattr__(self, "taps", taps)

    def __len__(self):
        return len(self.taps)

    @classmethod
    def random(cls, length: int, seed: int) -> "ChannelSpec":
        """Gaussian taps normalized to unit energy."""
        if length < 1:
            raise ValueError("channel length must be >= 1")
        taps = np.random.default_rng(seed).standard_normal(length)
        taps /= np.sqrt(np.sum(taps ** 2))
        return cls(tuple(taps), seed=seed)


def _check_n(n_samples, minimum=1):
    if int(n_samples) != n_samples or n_samples < minimum:
        raise ValueError(f"n_samples must be an integer >= {minimum}, got {n_samples}")
    return int(n_samples)


def gen_white(seed, n_samples, sample_rate_hz=DEFAULT_FS) -> SignalBuffer:
    """I.i.d. standard normal samples."""
    n = _check_n(n_samples)
    return SignalBuffer(np.random.default_rng(seed).standard_normal(n), sample_rate_hz)


def gen_pink(seed, n_samples, sample_rate_hz=DEFAULT_FS) -> SignalBuffer:
    """1/f noise by spectral shaping of a white Gaussian draw.

    The rFFT of white noise is scaled by ``1/sqrt(f)`` (DC removed), giving a
    power spectral density falling 10 dB per decade. The result is rescaled
    to zero mean and unit variance.
    """
    n = _check_n(n_samples, PINK_MIN_SAMPLES)
    white = np.random.default_rng(seed).standard_normal(n)
    spec = np.fft.rfft(white)
    bins = np.arange(spec.size, dtype=np.float64)
    shaping = np.zeros_like(bins)
    shaping[1:] = 1.0 / np.sqrt(bins[1:])
    pink = np.fft.irfft(spec * shaping, n)
    pink -= pink.mean()
    pink /= pink.std()
    return SignalBuffer(pink, sample_rate_hz)


def burst_gate(spec: NoiseSpec, n_samples, rng) -> np.ndarray:
    """On/off state sequence of the two-state Markov gate, starting off.

    The state is advanced before each sample is emitted.
    """
    u = rng.random(n_samples)
    gate = np.zeros(n_samples, dtype=bool)
    on = False
    p_on, p_off = spec.burst_on_prob, spec.burst_off_prob
    for i in range(n_samples):
        if on:
            on = not u[i] < p_off
        else:
            on = u[i] < p_on
        gate[i] = on
    return gate


def gen_burst(spec: NoiseSpec, n_samples, sample_rate_hz=DEFAULT_FS) -> SignalBuffer:
    """White Gaussian noise switched on and off by a Markov gate.

    While the gate is on the noise is multiplied by ``burst_gain``; while it
    is off the output is zero.
    """
    n = _check_n(n_samples)
    rng = np.random.default_rng(spec.seed)
    white = rng.standard_normal(n)
    gate = burst_gate(spec, n, rng)
    return SignalBuffer(np.where(gate, spec.burst_gain * white, 0.0), sample_rate_hz)


def gen_noise(spec: NoiseSpec, n_samples, sample_rate_hz=DEFAULT_FS) -> SignalBuffer:
    if spec.kind == "white":
        return gen_white(spec.seed, n_samples, sample_rate_hz)
    if spec.kind == "pink":
        return gen_pink(spec.seed, n_samples, sample_rate_hz)
    return gen_burst(spec, n_samples, sample_rate_hz)


def channel_filter(noise: SignalBuffer, chan: ChannelSpec) -> SignalBuffer:
    """Causal FIR filtering with zero prehistory; output has the input length."""
    taps = np.asarray(chan.taps)
    if taps.size == 0:
        raise ValueError("channel needs at least one tap")
    n = len(noise)
    out = np.convolve(noise.samples, taps)[:n] if n else np.zeros(0)
    return noise.with_samples(out)


def mean_power(x) -> float:
    x = np.asarray(x, dtype=np.float64)
    return float(np.mean(x * x))


def mix_at_snr(signal: SignalBuffer, noise: SignalBuffer, target_snr_db):
    """Add scaled noise so that the signal-to-noise power ratio hits the target.

    Powers are mean squares over the whole buffers. Returns ``(primary,
    scale)`` with ``primary = signal + scale * noise``. An infinite target
    gives ``scale = 0``.
    """
    if len(signal) != len(noise):
        raise ValueError(f"length mismatch: signal {len(signal)}, noise {len(noise)}")
    ps = mean_power(signal.samples)
    pn = mean_power(noise.samples)
    if ps <= 0:
        raise ValueError("signal has zero power")
    if pn <= 0:
        raise ValueError("noise has zero power")
    if np.isposinf(target_snr_db):
        scale = 0.0
    else:
        scale = float(np.sqrt(ps / (pn * 10.0 ** (target_snr_db / 10.0))))
    return signal.with_samples(signal.samples + scale * noise.samples), scale
