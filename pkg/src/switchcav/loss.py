"""Free-carrier absorption in the switched cavity.

The carriers that shift the resonance also broaden it: the linewidth grows
by ``1 + a * S(t)`` where ``S`` is the resonance shift in units of the
unswitched linewidth.  The broadening lowers the radiative rate by the same
factor and lets only that fraction of the cavity photons escape, so

    I(t) = rate(t) / w(t)**2 * n02 * exp(-int_{t0exc}^{t} rate(t') / w(t') dt')

with ``w = 1 + a * S``.  The exponent has no closed form and is integrated
numerically.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .dynamics import EmitterParams
from .integrate.quadrature import cumulative_quad
from .rate_models import NS_PER_PS, StepMode, SwitchProfile, switch_envelope, switched_rate

# the linear broadening law was fitted for shifts up to this many linewidths
MAX_FIT_SHIFT = 4.0


class ClockMismatchError(ValueError):
    """Switch and loss timing differ although one carrier population drives both."""


@dataclass(frozen=True)
class LossModel:
    a: float = 0.083
    s0: float = 1.0
    t0pu: float = 150.0
    tau_sw: float = 35.0
    tau_pu: float = 0.12
    step_mode: StepMode = StepMode.HARD

    def __post_init__(self):
        object.__setattr__(self, "step_mode", StepMode(self.step_mode))
        if not self.a >= 0:
            raise ValueError(f"a must be >= 0, got {self.a}")
        if not 0 <= self.s0 <= MAX_FIT_SHIFT:
            raise ValueError(f"s0 must lie in [0, {MAX_FIT_SHIFT}], got {self.s0}")
        if not self.tau_sw > 0:
            raise ValueError(f"tau_sw must be > 0, got {self.tau_sw}")
        if not self.tau_pu >= 0:
            raise ValueError(f"tau_pu must be >= 0, got {self.tau_pu}")


def check_shared_clock(p: SwitchProfile, m: LossModel) -> None:
    for name in ("t0pu", "tau_sw", "tau_pu", "step_mode"):
        if getattr(p, name) != getattr(m, name):
            raise ClockMismatchError(
                f"loss.{name}={getattr(m, name)!r} differs from switch.{name}={getattr(p, name)!r}")


def relative_shift(m: LossModel, t):
    """Resonance shift in linewidths at time ``t`` (ps)."""
    out = m.s0 * switch_envelope(t, m.t0pu, m.tau_sw, m.tau_pu, m.step_mode)
    return float(out) if np.ndim(t) == 0 else out


def linewidth_factor(a: float, s):
    """Broadened over intrinsic linewidth, ``1 + a * s``."""
    if a < 0 or np.any(np.asarray(s) < 0):
        raise ValueError("a and s must be >= 0")
    return 1.0 + a * s


def lossy_intensity(
    p: SwitchProfile,
    m: LossModel,
    e: EmitterParams,
    t,
    tol: float = 1e-9,
    split_points: Iterable[float] = (),
):
    """Detected intensity (1/ns) with free-carrier absorption.

    The constant ``gamma0 + gamma_nrad`` part of the exponent is integrated in
    closed form; only the switch-driven remainder goes through adaptive
    quadrature (relative tolerance ``tol``), split at the switch time and at
    any extra ``split_points``.  Zero before excitation.
    """
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    check_shared_clock(p, m)

    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.zeros_like(t_arr)
    after = t_arr >= e.t0exc
    if not np.any(after):
        return float(out[0]) if np.ndim(t) == 0 else out

    ta = t_arr[after]
    order = np.argsort(ta, kind="stable")
    pts = np.concatenate(([e.t0exc], ta[order]))

    # rate/w - gamma0 written without the cancellation that would leave only
    # rounding noise once the switch has relaxed (S and the rate change share
    # one envelope)
    coupled = p.dgamma - m.a * m.s0 * p.gamma0

    def remainder(s):
        env = float(switch_envelope(s, p.t0pu, p.tau_sw, p.tau_pu, p.step_mode))
        return coupled * env / (1.0 + m.a * m.s0 * env)

    splits = [p.t0pu, *split_points]
    cum = cumulative_quad(remainder, pts, rtol=tol, split_points=splits)[1:]
    extra = np.empty_like(cum)
    extra[order] = cum

    g_tot = (p.gamma0 + e.gamma_nrad) * NS_PER_PS
    exponent = g_tot * (ta - e.t0exc) + NS_PER_PS * extra
    w = linewidth_factor(m.a, relative_shift(m, ta))
    out[after] = switched_rate(p, ta) / (w * w) * e.n02 * np.exp(-exponent)
    return float(out[0]) if np.ndim(t) == 0 else out
