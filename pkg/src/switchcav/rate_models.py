"""Time-dependent radiative decay rates of an emitter in a switched cavity.

Units used throughout the package: times in picoseconds, decay rates in
inverse nanoseconds, cavity frequencies in rad/ps.  A rate multiplied by a
time therefore needs the factor ``NS_PER_PS`` to become dimensionless.

``rate_from_ldos`` is the only SI routine; use ``per_s_to_per_ns`` to bring
its result onto the package scale.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import constants
from scipy.special import erf

NS_PER_PS = 1e-3

# sqrt(4 ln 2): converts a Gaussian FWHM into the erf argument scale
_FWHM_ERF = 2.0 * math.sqrt(math.log(2.0))


class StepMode(str, Enum):
    """Shape of the switch-on step."""

    HARD = "hard"
    ERF = "erf"


def _as_output(x, like):
    return float(x) if np.ndim(like) == 0 else x


def step_function(t, tau_pu: float = 0.0, mode: StepMode | str = StepMode.HARD):
    """Switch-on step evaluated at time offset ``t`` (ps) from the pump centre.

    ``HARD`` is a Heaviside step with value 1 at the origin.  ``ERF`` is the
    cumulative integral of a Gaussian pump of FWHM ``tau_pu``; with
    ``tau_pu == 0`` it falls back to the hard step.
    """
    if tau_pu < 0:
        raise ValueError(f"tau_pu must be >= 0, got {tau_pu}")
    mode = StepMode(mode)
    t_arr = np.asarray(t, dtype=float)
    if mode is StepMode.HARD or tau_pu == 0.0:
        out = np.where(t_arr >= 0.0, 1.0, 0.0)
    else:
        # a subnormal width overflows the argument; erf(+-inf) is still exact
        with np.errstate(over="ignore"):
            out = 0.5 * (1.0 + erf(_FWHM_ERF * t_arr / tau_pu))
    return _as_output(out, t)


def switch_envelope(t, t0pu, tau_sw, tau_pu, mode):
    """exp(-(t - t0pu)/tau_sw) * step(t - t0pu); exactly 0 where the step is 0."""
    dt = np.asarray(t, dtype=float) - t0pu
    theta = np.asarray(step_function(dt, tau_pu, mode))
    # The exponential grows without bound before the switch; only evaluate it
    # where the step is nonzero so it never meets a vanishing step as inf * 0.
    on = theta > 0.0
    return np.where(on, np.exp(np.where(on, -dt / tau_sw, 0.0)) * theta, 0.0)


@dataclass(frozen=True)
class SwitchProfile:
    """Exponentially relaxing switch of the radiative rate.

    rate(t) = gamma0 + dgamma * exp(-(t - t0pu)/tau_sw) * step(t - t0pu)
    """

    gamma0: float
    dgamma: float
    t0pu: float = 150.0
    tau_sw: float = 35.0
    tau_pu: float = 0.12
    step_mode: StepMode = StepMode.HARD

    def __post_init__(self):
        object.__setattr__(self, "step_mode", StepMode(self.step_mode))
        if not self.gamma0 > 0:
            raise ValueError(f"gamma0 must be > 0, got {self.gamma0}")
        if not self.tau_sw > 0:
            raise ValueError(f"tau_sw must be > 0, got {self.tau_sw}")
        if not self.tau_pu >= 0:
            raise ValueError(f"tau_pu must be >= 0, got {self.tau_pu}")
        if self.gamma0 + self.dgamma < 0:
            raise ValueError(
                f"gamma0 + dgamma must be >= 0 (got {self.gamma0} + {self.dgamma})")
        if not self.tau_pu < self.tau_sw:
            raise ValueError(
                f"tau_pu ({self.tau_pu}) must be shorter than tau_sw ({self.tau_sw})")

    @property
    def peak_rate(self) -> float:
        return self.gamma0 + self.dgamma


def switched_rate(p: SwitchProfile, t):
    """Radiative rate (1/ns) of a switch profile at time ``t`` (ps)."""
    env = switch_envelope(t, p.t0pu, p.tau_sw, p.tau_pu, p.step_mode)
    return _as_output(p.gamma0 + p.dgamma * env, t)


@dataclass(frozen=True)
class CavityLorentzian:
    """Lorentzian cavity: on-resonance rate over a leaky-mode background.

    ``gamma_cav`` is the full width at half maximum in rad/ps.
    """

    omega_cav0: float
    gamma_cav: float
    gamma_on_resonance: float
    gamma_background: float = 0.0

    def __post_init__(self):
        if not self.gamma_cav > 0:
            raise ValueError(f"gamma_cav must be > 0, got {self.gamma_cav}")
        if not self.gamma_background >= 0:
            raise ValueError(f"gamma_background must be >= 0, got {self.gamma_background}")
        if not self.gamma_on_resonance > self.gamma_background:
            raise ValueError("gamma_on_resonance must exceed gamma_background")


def lorentzian_rate(c: CavityLorentzian, omega_d, omega_cav):
    """Decay rate (1/ns) of an emitter at ``omega_d`` for a cavity centred at ``omega_cav``."""
    hw2 = (0.5 * c.gamma_cav) ** 2
    det = np.asarray(omega_d, dtype=float) - np.asarray(omega_cav, dtype=float)
    out = c.gamma_background + (c.gamma_on_resonance - c.gamma_background) * hw2 / (det * det + hw2)
    return _as_output(out, det)


@dataclass(frozen=True)
class CavityTrajectory:
    """A Lorentzian cavity whose resonance is kicked by ``delta_omega_max`` at
    ``t0pu`` and relaxes back to ``omega_cav0`` with time constant ``tau_sw``."""

    cavity: CavityLorentzian
    omega_d: float
    delta_omega_max: float
    t0pu: float = 150.0
    tau_sw: float = 35.0
    tau_pu: float = 0.12
    step_mode: StepMode = StepMode.HARD

    def __post_init__(self):
        object.__setattr__(self, "step_mode", StepMode(self.step_mode))
        if not self.tau_sw > 0:
            raise ValueError(f"tau_sw must be > 0, got {self.tau_sw}")
        if not self.tau_pu >= 0:
            raise ValueError(f"tau_pu must be >= 0, got {self.tau_pu}")
        if not self.tau_pu < self.tau_sw:
            raise ValueError(
                f"tau_pu ({self.tau_pu}) must be shorter than tau_sw ({self.tau_sw})")

    def omega_cav(self, t):
        env = switch_envelope(t, self.t0pu, self.tau_sw, self.tau_pu, self.step_mode)
        return _as_output(self.cavity.omega_cav0 + self.delta_omega_max * env, t)

    @property
    def gamma0(self) -> float:
        """Unswitched rate."""
        return lorentzian_rate(self.cavity, self.omega_d, self.cavity.omega_cav0)


def trajectory_rate(tr: CavityTrajectory, t):
    """Radiative rate (1/ns) along a cavity resonance trajectory."""
    return lorentzian_rate(tr.cavity, tr.omega_d, tr.omega_cav(t))


def effective_switch_time(delta_t: float, omega_shift: float, gamma_cav: float) -> float:
    """Effective switching time (ps) for a resonance swept by ``omega_shift``
    within ``delta_t``: the time to move the resonance by one linewidth."""
    if omega_shift == 0:
        raise ValueError("undefined effective switch time: omega_shift is zero")
    return delta_t * gamma_cav / abs(omega_shift)


@dataclass(frozen=True)
class DipoleParams:
    """Transition dipole moment ``d`` (C m) and emission frequency ``omega_d`` (rad/s)."""

    d: float
    omega_d: float

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError(f"d must be > 0, got {self.d}")
        if not self.omega_d > 0:
            raise ValueError(f"omega_d must be > 0, got {self.omega_d}")


def rate_from_ldos(dp: DipoleParams, rho):
    """Golden-rule radiative rate in 1/s for a local density of states ``rho`` (s/m^3)."""
    rho_arr = np.asarray(rho, dtype=float)
    if np.any(rho_arr < 0):
        raise ValueError("rho must be >= 0")
    out = math.pi * dp.d ** 2 * dp.omega_d * rho_arr / (constants.hbar * constants.epsilon_0)
    return _as_output(out, rho)


def per_s_to_per_ns(rate):
    return rate * 1e-9
