"""Gradient adaptive lattice (GAL) joint-process estimator.

A multistage lattice predictor turns the reference input into backward
prediction errors b_0..b_M, and a ladder of regression coefficients h_0..h_M
forms the output ``y = sum(h_m * b_m)``. Reflection coefficients adapt by a
power-normalized stochastic gradient on the summed forward/backward error
energy; the ladder adapts stage by stage against the partial errors
``e_m = d - y_m``.

Ladder normalization: the order-recursive norm ``b_0^2 + ... + b_m^2`` is
smoothed in time with the same constant beta as the lattice powers
(``b_norm``), and every denominator is floored at ``floor``. Normalizing by the
instantaneous value alone makes the stage-0 update behave like
``ladder_step * e / b_0``, which has unbounded variance for Gaussian input.

State is kept in plain Python floats; the per-stage recursions are scalar and
this is markedly faster than small numpy arrays.
"""
from __future__ import annotations

import numpy as np

from .base import FilterConfig, StepResult, check_sample


class GAL:
    def __init__(self, cfg: FilterConfig):
        self.cfg = cfg
        m = cfg.order
        self._k = [0.0] * m            # k_1..k_M
        self._h = [0.0] * (m + 1)      # h_0..h_M
        self._eps = [cfg.floor] * m    # eps_0..eps_{M-1}
        self._b_prev = [0.0] * (m + 1)
        self._b_norm = [cfg.floor] * (m + 1)

    @property
    def refl(self):
        return np.array(self._k)

    @property
    def ladder(self):
        return np.array(self._h)

    @property
    def power(self):
        return np.array(self._eps)

    @property
    def b_prev(self):
        return np.array(self._b_prev)

    @property
    def b_norm(self):
        return np.array(self._b_norm)

    def step(self, x, d) -> StepResult:
        check_sample(x, d)
        cfg = self.cfg
        beta = cfg.smoothing
        alpha = 1.0 - beta
        mu = cfg.step_size
        floor = cfg.floor
        k, eps, b_prev = self._k, self._eps, self._b_prev

        x = float(x)
        b_cur = [x]
        f = x
        for m in range(1, cfg.order + 1):
            bp = b_prev[m - 1]
            e_pow = beta * eps[m - 1] + alpha * (f * f + bp * bp)
            if e_pow < floor:
                e_pow = floor
            eps[m - 1] = e_pow
            km = k[m - 1]
            f_m = f + km * bp
            b_m = bp + km * f
            km -= mu / e_pow * (f * b_m + bp * f_m)
            if km > 1.0:
                km = 1.0
            elif km < -1.0:
                km = -1.0
            k[m - 1] = km
            b_cur.append(b_m)
            f = f_m

        h, b_norm = self._h, self._b_norm
        mu_l = cfg.ladder_step
        y = 0.0
        acc = 0.0
        for m, b_m in enumerate(b_cur):
            acc += b_m * b_m
            norm = beta * b_norm[m] + alpha * acc
            if norm < floor:
                norm = floor
            b_norm[m] = norm
            y += h[m] * b_m
            h[m] += mu_l / norm * b_m * (d - y)

        self._b_prev = b_cur
        return StepResult(y, d - y)
