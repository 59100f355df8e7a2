#!/usr/bin/env python3
"""
Campaign Service Module

Runs Monte Carlo campaigns with a progress bar, persists their artifacts and
prints summary tables.
"""

import time
from typing import Any, Dict, List, Optional, Tuple

from .. import __version__
from ..experiments import CampaignConfig, CampaignResult, run_campaign, sweep_settings, trial_count
from ..logging_utils import get_logger
from ..results_store import ResultStore
from ..utils import create_progress_bar, format_float, format_mean_sd, format_time, print_dynamic_table

logger = get_logger(__name__)


class CampaignService:
    """Service for running and persisting campaigns."""

    def __init__(self, out_dir: str, workers: int = 1, show_progress: bool = True):
        """
        Initialize the campaign service.

        Args:
            out_dir: Output directory for artifacts
            workers: Worker processes for the trials
            show_progress: Whether to draw progress bars on stderr
        """
        self.store = ResultStore(out_dir)
        self.workers = workers
        self.show_progress = show_progress

    def run(self, cfg: CampaignConfig) -> List[Tuple[str, CampaignResult]]:
        """
        Run every setting of a campaign (one per sweep value) and persist each.

        Args:
            cfg: Campaign configuration with master_seed set

        Returns:
            List of (setting label, result)
        """
        results = []
        for label, setting in sweep_settings(cfg):
            desc = f"{setting.mode} {label}".strip()
            start = time.time()
            with create_progress_bar(trial_count(setting), desc, disable=not self.show_progress) as bar:
                result = run_campaign(setting, workers=self.workers, progress=lambda: bar.update(1))
            logger.info(f"{desc}: {trial_count(setting)} trials in {format_time(time.time() - start)}")
            self.persist(label, result)
            results.append((label, result))
        return results

    def persist(self, label: str, result: CampaignResult) -> Dict[str, str]:
        """
        Write trials.csv, summary.json and, when requested, the per-trial fronts.

        Returns:
            Mapping of artifact name to path
        """
        store = self.store.subdir(label)
        meta = {"version": __version__, "config": result.config.to_dict()}
        paths = {
            "trials": store.write_trials(result.rows()),
            "summary": store.write_summary(result.summary, meta),
        }
        fronts = [r for r in result.reports if r.fronts is not None]
        for report in fronts:
            store.write_front(report.trial, report.fronts)
        logger.info(f"Artifacts written to {store.out_dir}")
        return paths

    def print_summary(self, label: str, result: CampaignResult) -> None:
        """Render the campaign summary as an aligned table."""
        summary = result.summary
        mode = summary["mode"]
        if label:
            print(f"\nSetting {label}")
        if mode == "gain_screening":
            rows = [
                {
                    "strategy": name,
                    "theta": format_mean_sd(stats["theta_hat"]),
                    "median": format_float(stats["theta_hat"]["median"]),
                    "min": format_float(stats["theta_hat"]["min"]),
                    "rank": format_float(stats["rank"]["mean"], 2),
                }
                for name, stats in summary["strategies"].items()
            ]
            headers = {"strategy": "Strategy", "theta": "θ̂ mean ± sd", "median": "median",
                       "min": "min", "rank": "mean rank"}
        elif mode == "correlation":
            rows = [
                {
                    "batch": entry["batch"],
                    "trials": entry["trials"],
                    "r": format_mean_sd(entry["r"]),
                    "pooled": format_float(entry["pooled_r"]),
                }
                for entry in summary["batches"]
            ]
            headers = {"batch": "Batch", "trials": "Trials", "r": "r mean ± sd", "pooled": "pooled r"}
        elif mode == "pareto":
            rows = [
                {
                    "strategy": name,
                    "hv": format_mean_sd(stats["hv_ratio"]),
                    "eps": format_mean_sd(stats["eps_plus"]),
                    "coverage": format_float(stats["fraction_full_coverage"], 2),
                    "ratio": format_mean_sd(stats["candidate_ratio"]),
                    "knee": format_float(stats["knee_captured"], 2),
                }
                for name, stats in summary["strategies"].items()
            ]
            headers = {"strategy": "Strategy", "hv": "HV ratio", "eps": "ε⁺",
                       "coverage": "full coverage", "ratio": "|C|/|E|", "knee": "knee hit"}
        else:
            rows = [
                {
                    "n": entry["n"],
                    "delta": format_float(entry["delta_n"]["median"]),
                    "residual": format_float(entry["scaled_error"]["median"]),
                }
                for entry in summary["sizes"]
            ]
            headers = {"n": "n", "delta": "median δ_n", "residual": "median √n·residual"}
        print_dynamic_table(rows, headers)
