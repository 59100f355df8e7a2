#!/usr/bin/env python3
"""
ring-chord

Chord augmentation of weighted cycles: generates instances, scores and screens
chords, compares Pareto fronts, simulates noisy consensus and runs seeded
Monte Carlo campaigns. JSON goes to stdout (or --out); logs and progress bars
go to stderr.
"""

import argparse
import sys
from typing import List, Optional

from src import __version__
from src.commands import (
    handle_campaign_command,
    handle_diagnose_command,
    handle_gen_command,
    handle_pareto_command,
    handle_score_command,
    handle_screen_command,
    handle_simulate_command,
)
from src.config import config
from src.consensus_sim import METHODS, SimConfig
from src.exceptions import ComputationError, InputError
from src.logging_utils import get_logger, setup_logging

logger = get_logger(__name__)

EXIT_SUCCESS = 0
EXIT_INPUT_ERROR = 1
EXIT_COMPUTATION_ERROR = 2

SCORE_FIELDS = """output fields:
  delta_exact         lambda_1(L + w b b^T) - lambda_1(L), largest root of the secular equation
  delta_lowfreq       same gain with the secular sum truncated to the m lowest modes
  improvement         K_f(L) - K_f(L + w b b^T) = w n Q / (1 + w R), Q = b^T (L^+)^2 b
  r_endpoint          R_pq = d(p,q) d(q,p) / S, the two arcs in parallel
  r_endpoint_updated  R_pq / (1 + w R_pq)
"""

PARETO_FIELDS = """output fields:
  front, knee      screened Pareto front in (I/I*, D/D*) and the point closest to (1, 1)
  hv_ratio         dominated area of the screened front over that of the exhaustive front
  eps_plus         additive epsilon-dominance gap of the screened front (null if empty)
  coverage         share of exhaustive-front chords inside the candidate set
  front_coverage   share of exhaustive-front chords on the screened front
"""

SIMULATE_FIELDS = """output fields:
  H_hat, stderr               tail-window coherence (1/n) sum (xi_i - mean)^2 and its standard error
  predictions.H               sigma^2 K_f / (2 n^2)
  predictions.pair_variance   sigma^2 R_uv / 2
  config.record_every         steps between recorded states actually used
"""

DIAGNOSE_FIELDS = """output fields:
  discrepancy       D, Delta, eta and delta_n of the cumulative resistances
  spectrum          lowest eigenvalues, lambda_max and the ceiling gamma = lambda_2 - lambda_1
  fiedler_fit       sup-residual of u_1 against sqrt(2/n) sin(2 pi s_i / S + phase)
  ceiling_deficit   gamma - Delta(w) next to gamma eps / (1 - theta0) when its hypotheses hold
"""


def _add_output(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-o", "--out", help="Write the JSON result to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subparser per command."""
    parser = argparse.ArgumentParser(
        prog="ring-chord",
        description="Chord augmentation of weighted cycles: scoring, screening, Pareto fronts and campaigns",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="Show debug output")

    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    raw = argparse.RawDescriptionHelpFormatter

    gen = sub.add_parser("gen", help="Generate a random weighted cycle")
    gen.add_argument("--n", type=int, required=True, help="Number of vertices (>= 4)")
    gen.add_argument("--lo", type=float, default=1.0, help="Lower conductance bound (default: 1)")
    gen.add_argument("--hi", type=float, default=100.0, help="Upper conductance bound (default: 100)")
    gen.add_argument("--seed", type=int, help="Generator seed (random and echoed in meta if omitted)")
    _add_output(gen)

    score = sub.add_parser("score", help="Score one chord", epilog=SCORE_FIELDS, formatter_class=raw)
    score.add_argument("--input", required=True, help="Cycle JSON file")
    score.add_argument("--chord", required=True, help="Chord endpoints 'p,q'")
    score.add_argument("--w", type=float, default=config.get("default_budget"), help="Chord conductance")
    score.add_argument("--m", type=int, default=config.get("default_modes"), help="Low-frequency mode count")
    _add_output(score)

    screen = sub.add_parser("screen", help="List RBAPS / AW-RBAPS candidate chords")
    screen.add_argument("--input", required=True, help="Cycle JSON file")
    screen.add_argument("--tau", type=float, default=config.get("default_tau"),
                        help="Window tolerance (0 for plain RBAPS)")
    _add_output(screen)

    pareto = sub.add_parser("pareto", help="Compare the screened Pareto front with the exhaustive one",
                            epilog=PARETO_FIELDS, formatter_class=raw)
    pareto.add_argument("--input", required=True, help="Cycle JSON file")
    pareto.add_argument("--tau", type=float, default=config.get("default_tau"), help="Window tolerance")
    pareto.add_argument("--w", type=float, default=config.get("default_budget"), help="Conductance budget")
    _add_output(pareto)

    simulate = sub.add_parser("simulate", help="Simulate noisy consensus and compare with predictions",
                              epilog=SIMULATE_FIELDS, formatter_class=raw)
    simulate.add_argument("--input", required=True, help="Cycle JSON file")
    simulate.add_argument("--chord", help="Chord 'p,q,w' added before simulating")
    simulate.add_argument("--pair", help="Vertex pair 'u,v' for the pair variance")
    simulate.add_argument("--sigma", type=float, default=config.get("sim_sigma"), help="Noise intensity")
    simulate.add_argument("--dt", type=float, default=1e-3, help="Time step")
    simulate.add_argument("--horizon", type=float, default=100.0, help="Simulated time")
    simulate.add_argument("--paths", type=int, default=config.get("sim_paths"), help="Independent paths")
    simulate.add_argument("--seed", type=int, default=0, help="Noise seed")
    simulate.add_argument("--method", choices=METHODS, default="euler", help="Integrator")
    simulate.add_argument("--record-every", type=int,
                          help="Keep every k-th step (default: the smallest stride within the memory cap)")
    simulate.add_argument("--burn-in", type=float, help="Discarded initial time (default 10/lambda_1)")
    _add_output(simulate)

    campaign = sub.add_parser("campaign", help="Run a seeded Monte Carlo campaign")
    campaign.add_argument("--config", required=True, help="Campaign JSON (fields of CampaignConfig)")
    campaign.add_argument("--out", default="results", help="Output directory (default: results)")
    campaign.add_argument("--seed", type=int, help="Master seed (required unless master_seed is set)")
    campaign.add_argument("--workers", type=int, help="Worker processes")
    campaign.add_argument("-q", "--quiet", action="store_true", help="No progress bars or summary table")

    diagnose = sub.add_parser("diagnose", help="Discrepancy, spectrum and ceiling-deficit diagnostics",
                              epilog=DIAGNOSE_FIELDS, formatter_class=raw)
    diagnose.add_argument("--input", required=True, help="Cycle JSON file")
    diagnose.add_argument("--chord", required=True, help="Chord endpoints 'p,q'")
    diagnose.add_argument("--w", type=float, default=config.get("default_budget"), help="Chord conductance")
    diagnose.add_argument("--theta0", type=float, default=0.5, help="Dominance constant in (0, 1)")
    diagnose.add_argument("--rho0", type=float, help="Gap ratio in (0, 1) (default lambda_2/lambda_3)")
    _add_output(diagnose)

    return parser


def dispatch(args: argparse.Namespace) -> None:
    """Run the handler of the parsed subcommand."""
    if args.command == "gen":
        handle_gen_command(args.n, args.lo, args.hi, args.seed, args.out)
    elif args.command == "score":
        handle_score_command(args.input, args.chord, args.w, args.m, args.out)
    elif args.command == "screen":
        handle_screen_command(args.input, args.tau, args.out)
    elif args.command == "pareto":
        handle_pareto_command(args.input, args.tau, args.w, args.out)
    elif args.command == "simulate":
        sim_config = SimConfig(
            sigma=args.sigma,
            dt=args.dt,
            horizon=args.horizon,
            n_paths=args.paths,
            seed=args.seed,
            method=args.method,
            record_every=args.record_every,
            burn_in=args.burn_in,
        )
        handle_simulate_command(args.input, sim_config, args.chord, args.pair, args.out)
    elif args.command == "campaign":
        handle_campaign_command(args.config, args.out, args.seed, args.workers, args.quiet)
    elif args.command == "diagnose":
        handle_diagnose_command(args.input, args.chord, args.w, args.theta0, args.rho0, args.out)


def main(argv: Optional[List[str]] = None) -> int:
    """Main function: parse arguments, run the command and map errors to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse reports usage errors with status 2, which is reserved for computation failures
        if e.code == 2:
            return EXIT_INPUT_ERROR
        raise

    setup_logging(**config.log_settings(), verbose=args.verbose)

    try:
        dispatch(args)
    except InputError as e:
        logger.error(str(e))
        return EXIT_INPUT_ERROR
    except ComputationError as e:
        logger.error(f"Computation failed: {e}")
        return EXIT_COMPUTATION_ERROR
    except MemoryError:
        logger.error(f"'{args.command}' ran out of memory")
        return EXIT_COMPUTATION_ERROR
    except KeyboardInterrupt:
        logger.warning(f"'{args.command}' cancelled by user")
        return EXIT_INPUT_ERROR
    return EXIT_SUCCESS


if __name__ == "__main__":
    sys.exit(main())
