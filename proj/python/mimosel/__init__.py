"""Sparse MIMO radar virtual-array selection."""

from ._core import (
    ArrayGeometry,
    BudgetExceeded,
    CovarianceModel,
    Error,
    InvalidArgument,
    ParseError,
    Scenario,
    SelectionMode,
    build_model,
    f_logdet,
    grad_f,
    is_feasible,
    oracle,
    parse_scenario,
    parse_scenario_text,
    run_sweep,
    select,
    sinr_db,
)

__all__ = [
    "ArrayGeometry",
    "BudgetExceeded",
    "CovarianceModel",
    "Error",
    "InvalidArgument",
    "ParseError",
    "Scenario",
    "SelectionMode",
    "build_model",
    "f_logdet",
    "grad_f",
    "is_feasible",
    "oracle",
    "parse_scenario",
    "parse_scenario_text",
    "run_sweep",
    "select",
    "sinr_db",
]
