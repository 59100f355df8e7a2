#!/usr/bin/env python3
"""
Command Handlers Module

Contains handler functions for each CLI command.
Separates command routing from the numerical work.
"""

from typing import Optional, Tuple

import numpy as np

from . import __version__
from .config import config
from .consensus_sim import SimConfig
from .cycle_core import WeightedCycle, parse_pair
from .exceptions import InputError
from .experiments import CampaignConfig, generate_instance
from .logging_utils import get_logger
from .services import AnalysisService, CampaignService, SimulationService
from .utils import load_json, write_output

logger = get_logger(__name__)


def load_cycle(path: str) -> WeightedCycle:
    """
    Read a cycle from its JSON file.

    Raises:
        InputError: If the file is missing, malformed or not a valid cycle
    """
    return WeightedCycle.from_dict(load_json(path))


def parse_chord_spec(text: str) -> Tuple[int, int, float]:
    """Parse ``"p,q,w"`` into (p, q, w)."""
    parts = [t.strip() for t in str(text).split(",")]
    if len(parts) != 3:
        raise InputError(f"Expected a chord 'p,q,w', got {text!r}")
    p, q = parse_pair(",".join(parts[:2]))
    try:
        w = float(parts[2])
    except ValueError as e:
        raise InputError(f"Invalid chord weight in {text!r}") from e
    return p, q, w


def handle_gen_command(
    n: int, lo: float, hi: float, seed: Optional[int] = None, out: Optional[str] = None
) -> None:
    """
    Handle the gen command: one cycle with conductances uniform on [lo, hi].

    Args:
        n: Number of vertices
        lo: Lower conductance bound
        hi: Upper conductance bound
        seed: Generator seed; drawn from OS entropy and echoed in meta when omitted
        out: Output path (stdout if None)
    """
    if seed is None:
        seed = int(np.random.SeedSequence().entropy)
        logger.info(f"No --seed given; using {seed}")
    cycle = generate_instance(n, lo, hi, np.random.default_rng(seed))
    write_output({**cycle.to_dict(), "meta": {"seed": seed, "version": __version__}}, out)


def handle_score_command(
    input_path: str, chord: str, w: float, m: int, out: Optional[str] = None
) -> None:
    """
    Handle the score command.

    Args:
        input_path: Cycle JSON file
        chord: Chord endpoints as "p,q"
        w: Chord conductance
        m: Low-frequency mode count
        out: Output path (stdout if None)
    """
    p, q = parse_pair(chord)
    service = AnalysisService(load_cycle(input_path))
    write_output(service.score(p, q, w, m), out)


def handle_screen_command(input_path: str, tau: float, out: Optional[str] = None) -> None:
    """
    Handle the screen command: print the candidate pairs as a JSON list.

    Args:
        input_path: Cycle JSON file
        tau: Window tolerance (0 for plain RBAPS)
        out: Output path (stdout if None)
    """
    service = AnalysisService(load_cycle(input_path))
    write_output(service.screen(tau), out)


def handle_pareto_command(
    input_path: str, tau: float, w: float, out: Optional[str] = None
) -> None:
    """
    Handle the pareto command.

    Args:
        input_path: Cycle JSON file
        tau: Window tolerance
        w: Chord conductance budget
        out: Output path (stdout if None)
    """
    service = AnalysisService(load_cycle(input_path))
    write_output(service.pareto(tau, w), out)


def handle_simulate_command(
    input_path: str,
    sim_config: SimConfig,
    chord: Optional[str] = None,
    pair: Optional[str] = None,
    out: Optional[str] = None,
) -> None:
    """
    Handle the simulate command.

    Args:
        input_path: Cycle JSON file
        sim_config: Integration settings
        chord: Optional chord "p,q,w" added before simulating
        pair: Optional vertex pair "u,v" for the pair-variance estimate
        out: Output path (stdout if None)
    """
    service = SimulationService(load_cycle(input_path))
    payload = service.run(
        sim_config,
        chord=parse_chord_spec(chord) if chord else None,
        pair=parse_pair(pair) if pair else None,
    )
    write_output(payload, out)


def handle_diagnose_command(
    input_path: str,
    chord: str,
    w: float,
    theta0: float,
    rho0: Optional[float] = None,
    out: Optional[str] = None,
) -> None:
    """
    Handle the diagnose command.

    Args:
        input_path: Cycle JSON file
        chord: Chord endpoints as "p,q"
        w: Chord conductance
        theta0: Dominance constant for the comparison bound
        rho0: Spectral-gap ratio (lambda_2 / lambda_3 when None)
        out: Output path (stdout if None)
    """
    p, q = parse_pair(chord)
    service = AnalysisService(load_cycle(input_path))
    write_output(service.diagnose(p, q, w, theta0, rho0), out)


def handle_campaign_command(
    config_path: str,
    out_dir: str,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    quiet: bool = False,
) -> None:
    """
    Handle the campaign command.

    Args:
        config_path: Campaign JSON file (fields of CampaignConfig)
        out_dir: Output directory for trials.csv / summary.json
        seed: Master seed; overrides master_seed from the file
        workers: Worker processes (config / RING_CHORD_THREADS / all cores when None)
        quiet: Suppress progress bars and the summary table

    Raises:
        InputError: If neither --seed nor master_seed is given
    """
    data = load_json(config_path)
    if not isinstance(data, dict):
        raise InputError("Campaign config must be a JSON object")
    if seed is not None:
        if data.get("master_seed") not in (None, seed):
            logger.info(f"--seed {seed} overrides master_seed {data['master_seed']}")
        data = {**data, "master_seed": seed}
    cfg = CampaignConfig.from_dict(data)
    if cfg.master_seed is None:
        raise InputError("A campaign needs a seed: pass --seed or set master_seed in the config")

    worker_count = config.worker_count(workers if workers is not None else cfg.workers)
    logger.info(f"Running campaign with {worker_count} worker(s), output in {out_dir}")
    service = CampaignService(out_dir, workers=worker_count, show_progress=not quiet)
    for label, result in service.run(cfg):
        if not quiet:
            service.print_summary(label, result)
