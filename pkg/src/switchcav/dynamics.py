"""Closed-form population and intensity after delta-pulse excitation.

The emitters are excited at ``t0exc`` into population ``n02`` and then decay
with the switched radiative rate plus a constant non-radiative rate:

    N2(t) = n02 * exp(-(gamma0 + gamma_nrad) * (t - t0exc) - dalpha(t))
    I(t)  = rate(t) * N2(t)

``dalpha`` is the extra decay accumulated because of the switch.  For a hard
step it is closed form; for an erf-smoothed step it is integrated numerically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .integrate.quadrature import cumulative_quad
from .rate_models import NS_PER_PS, StepMode, SwitchProfile, switch_envelope, switched_rate

# erf-smoothed steps are treated as exactly zero this many pump widths early
_STEP_LEAD = 40.0


@dataclass(frozen=True)
class EmitterParams:
    n02: float = 1.0
    gamma_nrad: float = 0.0
    t0exc: float = 0.0

    def __post_init__(self):
        if not self.n02 >= 0:
            raise ValueError(f"n02 must be >= 0, got {self.n02}")
        if not self.gamma_nrad >= 0:
            raise ValueError(f"gamma_nrad must be >= 0, got {self.gamma_nrad}")


@dataclass
class DynamicsResult:
    t: np.ndarray
    rate: np.ndarray
    population: np.ndarray
    intensity: np.ndarray


def _alpha_from_start(p: SwitchProfile, t: np.ndarray, rtol: float) -> np.ndarray:
    """Extra decay accumulated from long before the switch up to each ``t``."""
    if p.step_mode is StepMode.HARD or p.tau_pu == 0.0:
        dt = t - p.t0pu
        return np.where(dt >= 0.0, p.dgamma * p.tau_sw * NS_PER_PS * -np.expm1(-np.maximum(dt, 0.0) / p.tau_sw), 0.0)

    lo = p.t0pu - _STEP_LEAD * p.tau_pu
    order = np.argsort(t, kind="stable")
    ts = t[order]
    inside = ts > lo
    out_sorted = np.zeros_like(ts)
    if p.dgamma != 0.0 and np.any(inside):
        pts = np.concatenate(([lo], ts[inside]))

        def env(s):
            return float(switch_envelope(s, p.t0pu, p.tau_sw, p.tau_pu, p.step_mode))

        cum = cumulative_quad(env, pts, rtol=rtol, split_points=[p.t0pu])
        out_sorted[inside] = p.dgamma * NS_PER_PS * cum[1:]
    out = np.empty_like(out_sorted)
    out[order] = out_sorted
    return out


def alpha_switch(p: SwitchProfile, t, t_from: float | None = None, rtol: float = 1e-10):
    """Dimensionless extra decay caused by the switch, accumulated up to ``t``.

    With ``t_from`` the accumulation starts there instead of before the
    switch.  Tends to ``dgamma * tau_sw`` (scaled to ps/ns) long after it.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if t_from is None:
        out = _alpha_from_start(p, t_arr, rtol)
    else:
        both = _alpha_from_start(p, np.concatenate(([t_from], t_arr)), rtol)
        out = both[1:] - both[0]
    return float(out[0]) if np.ndim(t) == 0 else out


def alpha_infinity(p: SwitchProfile) -> float:
    return p.dgamma * p.tau_sw * NS_PER_PS


def population_ratio_infinity(p: SwitchProfile) -> float:
    """Long-time population relative to the same emitters without a switch."""
    return math.exp(-alpha_infinity(p))


def population(p: SwitchProfile, e: EmitterParams, t, rtol: float = 1e-10):
    """Excited-state population at ``t`` (ps); ``t`` must not precede excitation."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < e.t0exc):
        raise ValueError(f"before excitation: t < t0exc = {e.t0exc}")
    dalpha = alpha_switch(p, t_arr, t_from=e.t0exc, rtol=rtol)
    g_tot = (p.gamma0 + e.gamma_nrad) * NS_PER_PS
    out = e.n02 * np.exp(-g_tot * (t_arr - e.t0exc) - dalpha)
    return float(out[0]) if np.ndim(t) == 0 else out


def intensity(p: SwitchProfile, e: EmitterParams, t, rtol: float = 1e-10):
    """Emitted intensity (photons per emitter per ns); zero before excitation."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    after = t_arr >= e.t0exc
    out = np.zeros_like(t_arr)
    if np.any(after):
        ta = t_arr[after]
        out[after] = switched_rate(p, ta) * population(p, e, ta, rtol=rtol)
    return float(out[0]) if np.ndim(t) == 0 else out


def evaluate(p: SwitchProfile, e: EmitterParams, t, rtol: float = 1e-10) -> DynamicsResult:
    """Rate, population and intensity on a time grid in one pass."""
    t_arr = np.asarray(t, dtype=float)
    rate = switched_rate(p, t_arr)
    pop = np.zeros_like(t_arr)
    after = t_arr >= e.t0exc
    if np.any(after):
        pop[after] = population(p, e, t_arr[after], rtol=rtol)
    return DynamicsResult(t_arr, rate, pop, rate * pop)
