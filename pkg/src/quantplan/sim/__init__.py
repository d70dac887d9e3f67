"""Desk-scale federation experiment harness."""

from .experiment import (
    ExperimentConfig,
    PLANNERS,
    ground_truth_satisfaction,
    override_weights_for_energy,
    run_experiment,
    unified_level,
)
from .population import SimClient, scripted_replies, simulate_interview, spawn_population
from .report import ExperimentReport, RoundSummary, emit_report, histogram_bins
from .tiers import load_default_tiers, seed_default_tiers

__all__ = [
    "ExperimentConfig",
    "PLANNERS",
    "ground_truth_satisfaction",
    "override_weights_for_energy",
    "run_experiment",
    "unified_level",
    "SimClient",
    "scripted_replies",
    "simulate_interview",
    "spawn_population",
    "ExperimentReport",
    "RoundSummary",
    "emit_report",
    "histogram_bins",
    "load_default_tiers",
    "seed_default_tiers",
]
