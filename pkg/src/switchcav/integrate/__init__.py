from .quadrature import QuadResult, QuadratureError, cumulative_quad, quad_adaptive
from .ode import (
    OdeSolution,
    PumpKind,
    PumpProfile,
    StepUnderflowError,
    TimeGrid,
    solve_rate_equation,
)

__all__ = [
    "QuadResult",
    "QuadratureError",
    "cumulative_quad",
    "quad_adaptive",
    "OdeSolution",
    "PumpKind",
    "PumpProfile",
    "StepUnderflowError",
    "TimeGrid",
    "solve_rate_equation",
]
