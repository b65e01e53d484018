"""Receding-horizon surveillance planning under LTL missions."""

from ._survplan import (
    INFEASIBLE_MESSAGE,
    ContractError,
    Error,
    InternalError,
    IoError,
    ParseError,
    Scenario,
    ValidationError,
    automaton_accepts,
    automaton_size,
    check,
    default_scenario,
    default_scenario_text,
    load_scenario,
    parse_scenario,
    run,
    satisfied_on_lasso,
)

__all__ = [
    "INFEASIBLE_MESSAGE",
    "ContractError",
    "Error",
    "InternalError",
    "IoError",
    "ParseError",
    "Scenario",
    "ValidationError",
    "automaton_accepts",
    "automaton_size",
    "check",
    "default_scenario",
    "default_scenario_text",
    "load_scenario",
    "parse_scenario",
    "run",
    "satisfied_on_lasso",
]
