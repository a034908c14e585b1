from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import NamedTuple

ALGORITHMS = ("rls", "ftf", "gal")


@dataclass(frozen=True)
class FilterConfig:
    """Algorithm choice and tuning shared by all three filters.

    Parameters
    ----------
    algorithm : {"rls", "ftf", "gal"}
    order : int
        Tap count N for RLS/FTF; final prediction order M for GAL.
    forgetting_factor : float
        Exponential weight lambda in (0, 1] (RLS, FTF).
    init_delta : float
        Regularization delta; the inverse correlation starts at ``I/delta``
        (RLS) and the least-squares sums at delta (FTF).
    step_size : float
        Reflection-coefficient step of GAL, conventionally below 0.1.
    ladder_step : float
        Regression (ladder) step of GAL.
    smoothing : float
        GAL power-estimate smoothing constant beta in (0, 1).
    floor : float
        Lower bound for GAL power denominators.
    """

    algorithm: str = "rls"
    order: int = 16
    forgetting_factor: float = 0.995
    init_delta: float = 0.01
    step_size: float = 0.05
    ladder_step: float = 0.05
    smoothing: float = 0.9
    floor: float = 1e-6

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        if int(self.order) != self.order or self.order < 0:
            raise ValueError(f"order must be a non-negative integer, got {self.order}")
        if self.order == 0 and self.algorithm != "gal":
            raise ValueError("RLS and FTF need order >= 1")
        if not 0.0 < self.forgetting_factor <= 1.0:
            raise ValueError(f"forgetting_factor must lie in (0, 1], got {self.forgetting_factor}")
        if not self.init_delta > 0:
            raise ValueError("init_delta must be positive")
        if not self.step_size > 0:
            raise ValueError("step_size must be positive")
        if not self.ladder_step > 0:
            raise ValueError("ladder_step must be positive")
        if not 0.0 < self.smoothing < 1.0:
            raise ValueError(f"smoothing must lie in (0, 1), got {self.smoothing}")
        if not self.floor > 0:
            raise ValueError("floor must be positive")
        object.__setattr__(self, "order", int(self.order))

    def with_(self, **changes) -> "FilterConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)


class StepResult(NamedTuple):
    y: float
    e: float


def check_sample(x, d):
    if not (math.isfinite(x) and math.isfinite(d)):
        raise ValueError(f"non-finite input sample (x={x}, d={d})")
