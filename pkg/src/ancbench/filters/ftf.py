"""Fast transversal filter (FTF) form of exponentially weighted RLS.

Four transversal filters are propagated: the forward predictor ``a_fwd``,
the backward predictor ``g_bwd``, the normalized gain ``k_norm`` and the
joint-process weights ``w``. Per-sample cost is O(N).

The initial least-squares sums are ``zeta_f = delta`` and
``zeta_b = delta * lambda**-N``. This is the only start that keeps the
recursions consistent with a prewindowed, regularized least-squares problem:
the filter then reproduces RLS started from
``P(0) = diag(1, lambda, ..., lambda**(N-1)) / delta`` to rounding error.
See :func:`equivalent_rls_inverse`.

Stabilization: the backward a priori error is available twice, from the
gain (``lambda * zeta_b * k_last``) and directly (``g_bwd @ x``). The two agree
in exact arithmetic, but plain FTF uses only the first and lets round-off grow
until the conversion factor leaves (0, 1]. Following Slock and Kailath, the
backward-predictor and ``zeta_b`` updates use blends weighted towards the
direct value; the conversion factor keeps the gain-based value. Without this
the default configuration needs a rescue every few thousand samples.
"""
from __future__ import annotations

import math

import numpy as np

from .base import FilterConfig, StepResult, check_sample

_GAMMA_SLACK = 1e-12
# weights of the directly computed backward error in the blends used for the
# backward-predictor update and the zeta_b update
_K_PRED, _K_SUM = 1.5, 2.5


def equivalent_rls_inverse(cfg: FilterConfig) -> np.ndarray:
    """Initial RLS inverse correlation matrix that FTF tracks exactly."""
    lam = cfg.forgetting_factor
    return np.diag(lam ** np.arange(cfg.order)) / cfg.init_delta


class FTF:
    def __init__(self, cfg: FilterConfig):
        self.cfg = cfg
        self.w = np.zeros(cfg.order)
        self.x_hist = np.zeros(cfg.order + 1)
        self.rescue_count = 0
        self._reset_predictors()

    def _reset_predictors(self):
        n = self.cfg.order
        self.a_fwd = np.zeros(n + 1)
        self.a_fwd[0] = 1.0
        self.g_bwd = np.zeros(n + 1)
        self.g_bwd[-1] = 1.0
        self.k_norm = np.zeros(n)
        self.gamma = 1.0
        self.zeta_f = self.cfg.init_delta
        self.zeta_b = self.cfg.init_delta * self.cfg.forgetting_factor ** (-n)

    def step(self, x, d) -> StepResult:
        check_sample(x, d)
        n = self.cfg.order
        lam = self.cfg.forgetting_factor
        h = self.x_hist
        h[1:] = h[:-1]
        h[0] = x

        a, g, k = self.a_fwd, self.g_bwd, self.k_norm
        gamma, zf, zb = self.gamma, self.zeta_f, self.zeta_b

        # forward prediction
        f = float(a @ h)
        f_post = gamma * f
        zf_new = lam * zf + f * f_post
        gamma_ext = lam * zf / zf_new * gamma
        k_ext = np.empty(n + 1)
        k_ext[0] = 0.0
        k_ext[1:] = k
        k_ext += (f / (lam * zf)) * a
        a_new = a.copy()
        a_new[1:] -= k * f_post

        # backward prediction
        k_last = k_ext[n]
        b = lam * zb * k_last
        b_direct = float(g @ h)
        b_pred = _K_PRED * b_direct + (1.0 - _K_PRED) * b
        b_sum = _K_SUM * b_direct + (1.0 - _K_SUM) * b
        beta = 1.0 - b * gamma_ext * k_last
        gamma_new = gamma_ext / beta
        if 1.0 < gamma_new <= 1.0 + _GAMMA_SLACK:
            gamma_new = 1.0
        k_new = k_ext[:n] - k_last * g[:n]
        zb_new = lam * zb + gamma_new * b_sum * b_sum
        g_new = g.copy()
        g_new[:n] -= k_new * (gamma_new * b_pred)

        # joint process (a priori output with the previous weights)
        y = float(self.w @ h[:n])
        e = d - y

        healthy = (0.0 < gamma_new <= 1.0 and 0.0 < gamma_ext <= 1.0
                   and zf_new > 0.0 and zb_new > 0.0
                   and math.isfinite(zf_new) and math.isfinite(zb_new)
                   and np.all(np.isfinite(k_new)) and np.all(np.isfinite(a_new))
                   and np.all(np.isfinite(g_new)))
        if not healthy:
            self._reset_predictors()
            self.rescue_count += 1
            return StepResult(y, e)

        self.a_fwd, self.g_bwd, self.k_norm = a_new, g_new, k_new
        self.gamma, self.zeta_f, self.zeta_b = gamma_new, zf_new, zb_new
        self.w += k_new * (gamma_new * e)
        return StepResult(y, e)
