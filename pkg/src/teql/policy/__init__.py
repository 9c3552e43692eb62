"""Exploration policies."""

from teql.policy.selection import (
    epsilon_greedy_select,
    eu_values,
    euge_select,
    greedy_select,
    select_action,
    ucb_select,
)

__all__ = [
    "epsilon_greedy_select",
    "eu_values",
    "euge_select",
    "greedy_select",
    "select_action",
    "ucb_select",
]
