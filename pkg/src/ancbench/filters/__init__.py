"""Sample-by-sample adaptive filters sharing one interface.

Each filter takes the reference sample ``x`` and the desired sample ``d``
and returns the a priori output ``y`` and error ``e = d - y``.
"""
from __future__ import annotations

import numpy as np

from ..siggen import SignalBuffer
from .base import ALGORITHMS, FilterConfig, StepResult
from .ftf import FTF, equivalent_rls_inverse
from .gal import GAL
from .rls import RLS

_CLASSES = {"rls": RLS, "ftf": FTF, "gal": GAL}


def make_filter(cfg: FilterConfig):
    return _CLASSES[cfg.algorithm](cfg)


def process(filt, x: SignalBuffer, d: SignalBuffer):
    """Run ``filt.step`` over two equal-length buffers; returns ``(y, e)``.

    The filter keeps its state, so consecutive calls continue the stream.
    """
    if len(x) != len(d):
        raise ValueError(f"length mismatch: x has {len(x)} samples, d has {len(d)}")
    n = len(x)
    y = np.empty(n)
    e = np.empty(n)
    step = filt.step
    for i, (xi, di) in enumerate(zip(x.samples.tolist(), d.samples.tolist())):
        y[i], e[i] = step(xi, di)
    return d.with_samples(y), d.with_samples(e)


__all__ = [
    "ALGORITHMS", "FilterConfig", "StepResult", "RLS", "FTF", "GAL",
    "equivalent_rls_inverse", "make_filter", "process",
]
