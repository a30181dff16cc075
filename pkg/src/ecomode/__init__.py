"""Simulate CO2 savings from eco-friendly transport mode selection on map search logs."""

from ecomode.emissions import EmissionTable, plan_emission_g, rate_for
from ecomode.ingest import Session, join_sessions, parse_clicks, parse_plans, parse_queries
from ecomode.modes import PUBLISHED_MAPPING, ModeMapping, TransportMeans
from ecomode.optimizer import (
    Assignment,
    Instance,
    brute_force_oracle,
    build_instance,
    solve,
    solve_session,
    verify_assignment,
)

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "EmissionTable",
    "Instance",
    "ModeMapping",
    "PUBLISHED_MAPPING",
    "Session",
    "TransportMeans",
    "brute_force_oracle",
    "build_instance",
    "join_sessions",
    "parse_clicks",
    "parse_plans",
    "parse_queries",
    "plan_emission_g",
    "rate_for",
    "solve",
    "solve_session",
    "verify_assignment",
]
