#!/usr/bin/env python3
"""
Simulation Service Module

Runs the consensus simulator on a cycle (optionally with one chord) and sets
the estimates next to their closed-form predictions.
"""

from typing import Any, Dict, Optional, Tuple

from ..consensus_sim import (
    SimConfig,
    coherence_prediction,
    estimate_coherence,
    estimate_pair_variance,
    pair_variance_prediction,
    simulate,
)
from ..cycle_core import WeightedCycle, check_chord
from ..logging_utils import get_logger
from ..spectral import check_weight, decompose_laplacian, laplacian

logger = get_logger(__name__)


class SimulationService:
    """Service for consensus simulations on one cycle."""

    def __init__(self, cycle: WeightedCycle):
        """
        Initialize the simulation service.

        Args:
            cycle: The weighted cycle
        """
        self.cycle = cycle

    def run(
        self,
        cfg: SimConfig,
        chord: Optional[Tuple[int, int, float]] = None,
        pair: Optional[Tuple[int, int]] = None,
    ) -> Dict[str, Any]:
        """
        Simulate and summarize.

        The pair variance is measured on ``pair``, or on the chord endpoints, or on
        vertices 0 and n/2.

        Args:
            cfg: Simulation settings
            chord: Optional (p, q, w) added to the cycle
            pair: Optional vertex pair for the pair-variance estimate

        Returns:
            Dict with H_hat, stderr, the pair-variance estimate and predictions
        """
        n = self.cycle.n
        if chord is not None:
            p, q = check_chord(self.cycle, chord[0], chord[1])
            chord = (p, q, check_weight(chord[2]))
        L = laplacian(self.cycle, chord)
        spec = decompose_laplacian(L)

        if pair is None:
            pair = (chord[0], chord[1]) if chord else (0, n // 2)
        u, v = self.cycle.check_vertex(pair[0]), self.cycle.check_vertex(pair[1])

        ensemble = simulate(L, cfg)
        coherence = estimate_coherence(ensemble)
        pair_var = estimate_pair_variance(ensemble, u, v)

        H = coherence_prediction(spec.kirchhoff_index(), n, cfg.sigma)
        rel_err = abs(coherence.value - H) / H if H > 0 else None
        logger.info(f"Coherence {coherence.value:.6g} ± {coherence.stderr:.2g} (predicted {H:.6g})")
        return {
            "H_hat": coherence.value,
            "stderr": coherence.stderr,
            "wide_ci": coherence.wide_ci,
            "pair": [u, v],
            "pair_variance": pair_var.to_dict(),
            "predictions": {
                "H": H,
                "pair_variance": pair_variance_prediction(spec.resistance(u, v), cfg.sigma),
                "kirchhoff_index": spec.kirchhoff_index(),
                "lambda1": spec.lambda1,
            },
            "relative_error": rel_err,
            "chord": list(chord) if chord else None,
            "config": {**cfg.to_dict(), "record_every": ensemble.record_every},
        }
