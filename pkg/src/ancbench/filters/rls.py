from __future__ import annotations

import numpy as np

from .base import FilterConfig, StepResult, check_sample


class RLS:
    """Exponentially weighted recursive least squares transversal filter.

    State: tap weights ``w``, inverse correlation matrix ``P`` and the
    regressor ``x_hist = [x(n), x(n-1), ..., x(n-N+1)]`` (zero prehistory).

    ``initial_inverse`` overrides the default starting matrix ``I/delta``.
    """

    def __init__(self, cfg: FilterConfig, initial_inverse=None):
        self.cfg = cfg
        n = cfg.order
        self.w = np.zeros(n)
        if initial_inverse is None:
            self.P = np.eye(n) / cfg.init_delta
        else:
            P = np.array(initial_inverse, dtype=np.float64)
            if P.shape != (n, n):
                raise ValueError(f"initial_inverse must be {n}x{n}")
            self.P = 0.5 * (P + P.T)
        self.x_hist = np.zeros(n)

    def step(self, x, d) -> StepResult:
        check_sample(x, d)
        lam = self.cfg.forgetting_factor
        h = self.x_hist
        h[1:] = h[:-1]
        h[0] = x

        u = self.P @ h
        k = u / (lam + h @ u)
        y = float(self.w @ h)
        e = d - y
        self.w += k * e
        # x^T P equals u^T because P is kept exactly symmetric
        P = (self.P - np.outer(k, u)) / lam
        self.P = 0.5 * (P + P.T)
        return StepResult(y, e)
