"""Spontaneous emission of two-level emitters in a time-switched microcavity.

Rates are in 1/ns and times in ps throughout; see :mod:`switchcav.rate_models`.
"""
__version__ = "0.1.0"

from .dynamics import (
    EmitterParams,
    alpha_infinity,
    alpha_switch,
    intensity,
    population,
    population_ratio_infinity,
)
from .loss import LossModel, linewidth_factor, lossy_intensity, relative_shift
from .rate_models import (
    CavityLorentzian,
    CavityTrajectory,
    DipoleParams,
    StepMode,
    SwitchProfile,
    effective_switch_time,
    lorentzian_rate,
    rate_from_ldos,
    step_function,
    switched_rate,
    trajectory_rate,
)
