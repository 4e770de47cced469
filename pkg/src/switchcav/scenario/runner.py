"""Run scenarios, sweep their parameters, and load the bundled presets."""
from __future__ import annotations

import copy
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from typing import Sequence

import numpy as np

from .. import __version__
from ..dynamics import evaluate
from ..integrate.ode import PumpKind, solve_rate_equation
from ..loss import linewidth_factor, lossy_intensity, relative_shift
from ..rate_models import (
    CavityTrajectory,
    StepMode,
    SwitchProfile,
    switched_rate,
    trajectory_rate,
)
from .config import TIMING_FIELDS, Scenario, ScenarioError, parse_scenario, scenario_from_dict
from .timeseries import TimeSeries


class ScenarioRunError(RuntimeError):
    """A module error raised while running a scenario, with the scenario named."""


UNITS = "time=ps;rate=1/ns;intensity=photons/(emitter*ns);population=normalized"


def list_presets() -> list[str]:
    root = resources.files(__package__).joinpath("presets")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".toml"))


def preset_text(name: str) -> str:
    if name not in list_presets():
        raise ScenarioError(f"unknown preset {name!r}; available: {', '.join(list_presets())}")
    return resources.files(__package__).joinpath("presets", f"{name}.toml").read_text("utf-8")


def load_preset(name: str) -> Scenario:
    return parse_scenario(preset_text(name))


def _rate_fn(model):
    if isinstance(model, SwitchProfile):
        return lambda t: switched_rate(model, t)
    return lambda t: trajectory_rate(model, t)


def resolve_method(s: Scenario) -> str:
    if s.method != "auto":
        return s.method
    analytic = (isinstance(s.rate_model, SwitchProfile)
                and s.rate_model.step_mode is StepMode.HARD
                and s.pump.kind is PumpKind.DELTA)
    return "analytic" if analytic else "numeric"


def run_scenario(s: Scenario) -> TimeSeries:
    """Sample rate, population and intensity (plus loss columns) on the grid.

    Hard-step switches with delta excitation use the closed form; everything
    else goes through the ODE solver.  The intensity column is always the
    product of the rate and population columns.
    """
    t = s.grid.times()
    method = resolve_method(s)
    model = s.rate_model
    try:
        if method == "analytic":
            res = evaluate(model, s.emitter, t, rtol=s.grid.rtol)
            rate, pop = res.rate, res.population
        else:
            sol = solve_rate_equation(_rate_fn(model), s.pump, s.emitter, s.grid,
                                      breakpoints=[model.t0pu])
            rate = (switched_rate(model, t) if isinstance(model, SwitchProfile)
                    else trajectory_rate(model, t))
            pop = sol.population
        cols = {
            "t_ps": t,
            "gamma_rad_per_ns": rate,
            "population": pop,
            "intensity_per_ns": rate * pop,
        }
        if s.loss is not None:
            shift = relative_shift(s.loss, t)
            cols["intensity_lossy_per_ns"] = lossy_intensity(model, s.loss, s.emitter, t,
                                                             tol=s.grid.rtol)
            cols["relative_shift"] = shift
            cols["linewidth_factor"] = linewidth_factor(s.loss.a, shift)
    except (ValueError, RuntimeError) as exc:
        raise ScenarioRunError(f"scenario {s.name!r}: {exc}") from exc

    if s.pump.kind is PumpKind.DELTA:
        i_exc = float(_rate_fn(model)(s.emitter.t0exc)) * s.emitter.n02
    else:
        i_exc = float("nan")
    meta = {
        "scenario": s.name,
        "scenario_sha256": s.digest,
        "generator": f"switchcav {__version__}",
        "method": method,
        "units": UNITS,
        "rtol": repr(s.grid.rtol),
        "atol": repr(s.grid.atol),
        # Figures plot I(t) / I(t0exc+); this is the divisor
        "intensity_at_excitation_per_ns": repr(i_exc),
    }
    return TimeSeries(meta, {k: np.asarray(cols[k], dtype=float) for k in s.columns})


def _axis_path(doc: dict, axis: str) -> tuple[str, str]:
    sections = [k for k, v in doc.items() if isinstance(v, dict)]
    if "." in axis:
        section, key = axis.split(".", 1)
        if section not in sections or key not in doc[section]:
            raise ScenarioError(f"unknown axis {axis!r}")
    else:
        hits = [sec for sec in sections if axis in doc[sec]]
        # timing keys duplicated in [loss] follow the rate model
        if len(hits) > 1 and axis in TIMING_FIELDS:
            hits = [h for h in hits if h in ("switch", "trajectory")]
        if len(hits) != 1:
            raise ScenarioError(f"unknown axis {axis!r}" if not hits
                                else f"ambiguous axis {axis!r}: use one of "
                                     + ", ".join(f"{h}.{axis}" for h in hits))
        section, key = hits[0], axis
    value = doc[section][key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"axis {section}.{key} is not a numeric parameter")
    return section, key


def with_value(s: Scenario, axis: str, value: float) -> Scenario:
    """Copy of ``s`` with one numeric parameter replaced and re-validated."""
    doc = copy.deepcopy(s.document)
    section, key = _axis_path(doc, axis)
    doc[section][key] = float(value)
    if key in TIMING_FIELDS and section in ("switch", "trajectory") and "loss" in doc:
        doc["loss"][key] = float(value)
    return scenario_from_dict(doc)


def sweep(s: Scenario, axis: str, values: Sequence[float], workers: int = 1) -> list[TimeSeries]:
    """One run per value of ``axis``, returned in the order of ``values``."""
    scenarios = [with_value(s, axis, v) for v in values]
    if workers <= 1 or len(scenarios) <= 1:
        return [run_scenario(sc) for sc in scenarios]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_scenario, scenarios))


def unswitched(s: Scenario) -> Scenario:
    """The same scenario with the switch disabled (reference decay)."""
    if isinstance(s.rate_model, CavityTrajectory):
        return with_value(s, "trajectory.delta_omega_max", 0.0)
    out = with_value(s, "switch.dgamma", 0.0)
    if s.loss is not None:
        out = with_value(out, "loss.s0", 0.0)
    return out
