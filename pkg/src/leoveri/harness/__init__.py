"""Scenario driver, forwarding engine, metrics, baseline, and CLI."""

from .config import ScenarioConfig, load_config
from .engine import FlightResult, fly_packet
from .metrics import BaselineReport, MetricsReport, PairStats
from .scenario import (
    BASE_HEADER_BYTES,
    SCHEMES,
    alibi_baseline,
    build_keys,
    choose_alibi_relay,
    delay_inflation,
    field_length,
    goodput_ratio,
    great_circle_km,
    rar,
    run,
    variation_counts,
)

__all__ = [
    "ScenarioConfig", "load_config", "FlightResult", "fly_packet",
    "BaselineReport", "MetricsReport", "PairStats", "BASE_HEADER_BYTES",
    "SCHEMES", "alibi_baseline", "build_keys", "choose_alibi_relay",
    "delay_inflation", "field_length", "goodput_ratio", "great_circle_km",
    "rar", "run", "variation_counts",
]
