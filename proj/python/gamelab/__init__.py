"""Config-driven repeated-game harness for scripted and LLM-backed agents.

The heavy lifting lives in the compiled extension; this package re-exports
its operations: config validation, campaign enumeration and execution,
history access, analytics exports, and the raw metric primitives.
"""

from gamelab._core import (
    ConfigError,
    TemplateError,
    aggregates_csv,
    builtin_variants,
    cross_language_inconsistency,
    dilemma_strength_gap,
    enumerate_setups,
    internal_variability,
    load_histories,
    normalize_config,
    payoff_sensitivity,
    preset_payoff,
    round_variability,
    run_campaign,
    scorecard_json,
    trajectories_csv,
    validate,
    version,
)

__version__ = version().rsplit(" ", 1)[-1]

__all__ = [
    "ConfigError",
    "TemplateError",
    "aggregates_csv",
    "builtin_variants",
    "cross_language_inconsistency",
    "dilemma_strength_gap",
    "enumerate_setups",
    "internal_variability",
    "load_histories",
    "normalize_config",
    "payoff_sensitivity",
    "preset_payoff",
    "round_variability",
    "run_campaign",
    "scorecard_json",
    "trajectories_csv",
    "validate",
    "version",
]
