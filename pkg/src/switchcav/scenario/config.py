"""Scenario documents: strict TOML, validated into immutable model objects.

A scenario document looks like::

    name = "fig3_enhance"

    [emitter]
    n02 = 1.0
    t0exc = 0.0

    [switch]            # or [trajectory]
    gamma0 = 1.0
    dgamma = 4.0
    t0pu = 150.0
    tau_sw = 35.0

    [pump]
    kind = "delta"

    [loss]              # optional; timing is shared with [switch]
    a = 0.083
    s0 = 1.0

    [grid]
    t_end = 1000.0
    output_dt = 0.5

Unknown keys anywhere are an error.
"""
from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, field
from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..dynamics import EmitterParams
from ..integrate.ode import PumpKind, PumpProfile, TimeGrid
from ..loss import ClockMismatchError, LossModel
from ..rate_models import CavityLorentzian, CavityTrajectory, StepMode, SwitchProfile

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

TIMING_FIELDS = ("t0pu", "tau_sw", "tau_pu", "step_mode")
COLUMNS = (
    "t_ps",
    "gamma_rad_per_ns",
    "population",
    "intensity_per_ns",
    "intensity_lossy_per_ns",
    "relative_shift",
    "linewidth_factor",
)
LOSS_COLUMNS = COLUMNS[4:]
_RATE_MODEL_MSG = "exactly one of [switch] or [trajectory] is required"


class ScenarioError(ValueError):
    pass


class ScenarioSyntaxError(ScenarioError):
    pass


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=True, frozen=True)


class EmitterSection(_Section):
    n02: float = Field(1.0, ge=0)
    gamma_nrad: float = Field(0.0, ge=0)
    t0exc: float = 0.0


class SwitchSection(_Section):
    gamma0: float = Field(gt=0)
    dgamma: float
    t0pu: float = 150.0
    tau_sw: float = Field(35.0, gt=0)
    tau_pu: float = Field(0.12, ge=0)
    step_mode: Literal["hard", "erf"] = "hard"


class TrajectorySection(_Section):
    omega_cav0: float
    gamma_cav: float = Field(gt=0)
    gamma_on_resonance: float = Field(gt=0)
    gamma_background: float = Field(0.0, ge=0)
    omega_d: float
    delta_omega_max: float
    t0pu: float = 150.0
    tau_sw: float = Field(35.0, gt=0)
    tau_pu: float = Field(0.12, ge=0)
    step_mode: Literal["hard", "erf"] = "hard"


class PumpSection(_Section):
    kind: Literal["delta", "gaussian", "cw"] = "delta"
    amplitude: float = Field(0.0, ge=0)
    fwhm: Optional[float] = Field(None, gt=0)
    eta_abs: float = Field(1.0, ge=0, le=1)
    omega_exc: Optional[float] = Field(None, gt=0)


class LossSection(_Section):
    a: float = Field(ge=0)
    s0: float = Field(ge=0, le=4)
    t0pu: Optional[float] = None
    tau_sw: Optional[float] = Field(None, gt=0)
    tau_pu: Optional[float] = Field(None, ge=0)
    step_mode: Optional[Literal["hard", "erf"]] = None


class GridSection(_Section):
    t_start: float = 0.0
    t_end: float = 1000.0
    output_dt: float = Field(0.5, gt=0)
    rtol: float = Field(1e-9, gt=0)
    atol: float = Field(1e-12, gt=0)


class OutputSection(_Section):
    columns: Optional[list[str]] = None
    path: Optional[str] = None


class ScenarioDocument(_Section):
    name: str = "scenario"
    description: str = ""
    method: Literal["auto", "analytic", "numeric"] = "auto"
    emitter: EmitterSection
    switch: Optional[SwitchSection] = None
    trajectory: Optional[TrajectorySection] = None
    pump: PumpSection = PumpSection()
    loss: Optional[LossSection] = None
    grid: GridSection = GridSection()
    output: OutputSection = OutputSection()

    @model_validator(mode="after")
    def _one_rate_model(self):
        if (self.switch is None) == (self.trajectory is None):
            raise ValueError(_RATE_MODEL_MSG)
        return self


@dataclass(frozen=True)
class Scenario:
    name: str
    emitter: EmitterParams
    rate_model: Union[SwitchProfile, CavityTrajectory]
    pump: PumpProfile
    loss: Optional[LossModel]
    grid: TimeGrid
    columns: tuple[str, ...]
    path: Optional[str] = None
    method: str = "auto"
    description: str = ""
    # validated document in canonical form; source of the hash and of sweeps
    document: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def digest(self) -> str:
        blob = json.dumps(self.document, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _format_validation(err: ValidationError, raw) -> str:
    lines = []
    for item in err.errors():
        loc = ".".join(str(p) for p in item["loc"]) or "<document>"
        lines.append(f"  {loc}: {item['msg']}")
    # the cross-section check never runs when a field already failed
    if isinstance(raw, dict) and ("switch" in raw) == ("trajectory" in raw):
        lines.append(f"  switch|trajectory: {_RATE_MODEL_MSG}")
    return "invalid scenario:\n" + "\n".join(dict.fromkeys(lines))


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a TOML scenario document."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioSyntaxError(f"syntax error: {exc}") from None
    return scenario_from_dict(raw)


def scenario_from_dict(raw: dict[str, Any]) -> Scenario:
    try:
        doc = ScenarioDocument.model_validate(raw)
    except ValidationError as exc:
        raise ScenarioError(_format_validation(exc, raw)) from None
    return _build(doc)


def _build(doc: ScenarioDocument) -> Scenario:
    try:
        emitter = EmitterParams(**doc.emitter.model_dump())
        if doc.switch is not None:
            rate_model = SwitchProfile(**doc.switch.model_dump())
        else:
            tr = doc.trajectory.model_dump()
            cavity = CavityLorentzian(
                omega_cav0=tr.pop("omega_cav0"),
                gamma_cav=tr.pop("gamma_cav"),
                gamma_on_resonance=tr.pop("gamma_on_resonance"),
                gamma_background=tr.pop("gamma_background"),
            )
            rate_model = CavityTrajectory(cavity=cavity, **tr)
        pump = PumpProfile(t0exc=emitter.t0exc, **doc.pump.model_dump())
        grid = TimeGrid(**doc.grid.model_dump())
    except ValueError as exc:
        raise ScenarioError(f"invalid scenario: {exc}") from None

    loss = None
    if doc.loss is not None:
        if not isinstance(rate_model, SwitchProfile):
            raise ScenarioError("invalid scenario: [loss] requires a [switch] rate model")
        if pump.kind is not PumpKind.DELTA:
            raise ScenarioError("invalid scenario: [loss] requires a delta pump")
        timing = {}
        for name in TIMING_FIELDS:
            given = getattr(doc.loss, name)
            shared = getattr(rate_model, name)
            if name == "step_mode" and given is not None:
                given = StepMode(given)
            if given is not None and given != shared:
                raise ClockMismatchError(
                    f"clock mismatch: loss.{name}={getattr(doc.loss, name)!r} but "
                    f"switch.{name}={getattr(doc.switch, name)!r}; one carrier population "
                    "drives both")
            timing[name] = shared
        try:
            loss = LossModel(a=doc.loss.a, s0=doc.loss.s0, **timing)
        except ValueError as exc:
            raise ScenarioError(f"invalid scenario: {exc}") from None

    t_last = rate_model.t0pu + 10.0 * rate_model.tau_sw
    if grid.t_start > emitter.t0exc or grid.t_end < t_last:
        raise ScenarioError(
            f"invalid scenario: grid [{grid.t_start}, {grid.t_end}] must cover "
            f"[t0exc, t0pu + 10 tau_sw] = [{emitter.t0exc}, {t_last}]")

    if doc.method == "analytic":
        if not isinstance(rate_model, SwitchProfile) or pump.kind is not PumpKind.DELTA:
            raise ScenarioError(
                "invalid scenario: method 'analytic' needs a [switch] rate model and a delta pump")

    columns = _select_columns(doc.output.columns, loss is not None)
    document = doc.model_dump(mode="json", exclude_none=True)
    return Scenario(
        name=doc.name,
        emitter=emitter,
        rate_model=rate_model,
        pump=pump,
        loss=loss,
        grid=grid,
        columns=columns,
        path=doc.output.path,
        method=doc.method,
        description=doc.description,
        document=document,
    )


def _select_columns(requested, has_loss: bool) -> tuple[str, ...]:
    available = COLUMNS if has_loss else COLUMNS[:4]
    if requested is None:
        return available
    unknown = [c for c in requested if c not in COLUMNS]
    if unknown:
        raise ScenarioError(f"invalid scenario: output.columns: unknown column(s) {unknown}")
    missing = [c for c in requested if c not in available]
    if missing:
        raise ScenarioError(f"invalid scenario: output.columns: {missing} need a [loss] section")
    return ("t_ps", *(c for c in available if c in requested and c != "t_ps"))
