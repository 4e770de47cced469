from .config import (
    COLUMNS,
    Scenario,
    ScenarioError,
    ScenarioSyntaxError,
    parse_scenario,
    scenario_from_dict,
)
from .runner import (
    ScenarioRunError,
    list_presets,
    load_preset,
    preset_text,
    resolve_method,
    run_scenario,
    sweep,
    unswitched,
    with_value,
)
from .timeseries import TimeSeries, read_csv, to_csv_string, write_csv

__all__ = [
    "COLUMNS",
    "Scenario",
    "ScenarioError",
    "ScenarioSyntaxError",
    "ScenarioRunError",
    "TimeSeries",
    "list_presets",
    "load_preset",
    "parse_scenario",
    "preset_text",
    "read_csv",
    "resolve_method",
    "run_scenario",
    "scenario_from_dict",
    "sweep",
    "to_csv_string",
    "unswitched",
    "with_value",
    "write_csv",
]
