"""Evaluation quantities for a noise-canceller run."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .siggen import SignalBuffer

SNR_CAP_DB = 120.0


@dataclass
class MetricsReport:
    """Summary of one run.

    ``convergence_samples`` is ``None`` when the run did not converge.
    ``convergence_seconds`` is wall-clock time spent filtering up to the
    convergence sample and is machine dependent.
    """

    mse_curve: list
    convergence_samples: int | None
    convergence_seconds: float | None
    corr_coeff: float
    output_snr_db: float
    input_snr_db: float

    def scalars(self) -> dict:
        d = asdict(self)
        d.pop("mse_curve")
        return d


def _values(x):
    return x.samples if isinstance(x, SignalBuffer) else np.asarray(x, dtype=np.float64)


def mse_curve(e, window: int):
    """Sliding mean of ``e**2`` over the last ``window`` samples.

    One ``(n, value)`` pair for every ``n >= window - 1``.
    """
    v = _values(e)
    if int(window) != window or window < 1:
        raise ValueError("window must be a positive integer")
    if window > v.size:
        raise ValueError(f"window {window} exceeds buffer length {v.size}")
    # direct per-window means; a running cumsum drifts on long buffers
    sq = np.lib.stride_tricks.sliding_window_view(v * v, window)
    means = sq.mean(axis=1)
    return [(i + window - 1, float(m)) for i, m in enumerate(means)]


def convergence_time(curve, settle_ratio: float = 2.0):
    """First curve index after which the curve stays near its final floor.

    The floor is the median of the last 10% of the curve. Returns the sample
    index of the first point from which every later value is at most
    ``settle_ratio * floor``, or ``None`` if the curve ends well above its
    minimum (tail median over 4x the global minimum) or never settles.
    """
    if len(curve) == 0:
        raise ValueError("empty curve")
    if not settle_ratio > 1:
        raise ValueError("settle_ratio must exceed 1")
    idx = np.array([p[0] for p in curve])
    val = np.array([p[1] for p in curve], dtype=np.float64)
    tail = val[-max(1, len(val) // 10):]
    floor = float(np.median(tail))
    if floor > 4.0 * float(val.min()):
        return None
    above = np.nonzero(val > settle_ratio * floor)[0]
    if above.size == 0:
        return int(idx[0])
    first = above[-1] + 1
    if first >= len(val):
        return None
    return int(idx[first])


def correlation_coefficient(s, e) -> float:
    """Pearson correlation, population convention."""
    a = _values(s)
    b = _values(e)
    if a.size != b.size:
        raise ValueError("length mismatch")
    if a.size < 2:
        raise ValueError("need at least two samples")
    a = a - a.mean()
    b = b - b.mean()
    sa = np.sqrt(np.mean(a * a))
    sb = np.sqrt(np.mean(b * b))
    if sa == 0 or sb == 0:
        raise ValueError("zero-variance input")
    r = float(np.mean(a * b) / (sa * sb))
    return min(1.0, max(-1.0, r))


def output_snr(s, e) -> float:
    """Clean-signal power over residual interference power, in dB.

    The residual is ``e - s``. Both powers are taken over the second half of
    the buffers; the result is capped at +120 dB.
    """
    a = _values(s)
    b = _values(e)
    if a.size != b.size:
        raise ValueError("length mismatch")
    half = a.size // 2
    a, b = a[half:], b[half:]
    ps = float(np.mean(a * a)) if a.size else 0.0
    if ps <= 0:
        raise ValueError("clean signal has zero power")
    r = b - a
    pr = float(np.mean(r * r))
    if pr <= ps * 10.0 ** (-SNR_CAP_DB / 10.0):
        return SNR_CAP_DB
    return float(10.0 * np.log10(ps / pr))
