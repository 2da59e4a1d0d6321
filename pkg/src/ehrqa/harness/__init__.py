from .config import ALL_METRICS, ALL_SCENARIOS, PAPER_STRATEGIES, ExperimentConfig, load_config, parse_config
from .report import build_reports, report
from .runner import ExperimentRunner, Ledger, RunManifest, run_experiment
from .services import ServiceBundle, build_services

__all__ = [
    "ALL_METRICS",
    "ALL_SCENARIOS",
    "ExperimentConfig",
    "ExperimentRunner",
    "Ledger",
    "PAPER_STRATEGIES",
    "RunManifest",
    "ServiceBundle",
    "build_reports",
    "build_services",
    "load_config",
    "parse_config",
    "report",
    "run_experiment",
]
