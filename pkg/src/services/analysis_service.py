#!/usr/bin/env python3
"""
Analysis Service Module

Single-instance analyses of one weighted cycle: chord scoring, screening,
Pareto comparison and diagnostics.
"""

from typing import Any, Dict, List, Optional

from ..chord_update import ChordCandidate, ceiling_deficit_report, saturate_budget, score_chord
from ..cycle_core import WeightedCycle, check_chord, discrepancy
from ..logging_utils import get_logger
from ..pareto import evaluate_objectives, extract_front, normalize, pareto_report
from ..screening import ScreenConfig, exhaustive_candidates
from ..spectral import SpectralDecomposition, decompose, fiedler_mode_fit

logger = get_logger(__name__)


class AnalysisService:
    """Service for analyses of a single cycle; the eigendecomposition is computed once."""

    def __init__(self, cycle: WeightedCycle):
        """
        Initialize the analysis service.

        Args:
            cycle: The weighted cycle under study
        """
        self.cycle = cycle
        self._spec: Optional[SpectralDecomposition] = None

    @property
    def spec(self) -> SpectralDecomposition:
        if self._spec is None:
            logger.debug(f"Decomposing the Laplacian of a {self.cycle.n}-cycle")
            self._spec = decompose(self.cycle)
        return self._spec

    def score(self, p: int, q: int, w: float, m: int) -> Dict[str, Any]:
        """
        Score one chord.

        Returns:
            ChordScore as a dict
        """
        p, q = check_chord(self.cycle, p, q)
        settings = ScreenConfig(m=m)
        return score_chord(self.spec, ChordCandidate(p, q, w), settings.m).to_dict()

    def screen(self, tau: float) -> List[List[int]]:
        """Candidate pairs of RBAPS (tau = 0) or AW-RBAPS (tau > 0)."""
        candidates = ScreenConfig(tau=tau).candidates(self.cycle)
        logger.info(
            f"{candidates.source.value}: {len(candidates)} of "
            f"{self.cycle.n * (self.cycle.n - 3) // 2} chords kept"
        )
        return candidates.to_list()

    def pareto(self, tau: float, w: float) -> Dict[str, Any]:
        """
        Screened Pareto front compared with the exhaustive one.

        Args:
            tau: Screening tolerance
            w: Chord conductance budget (saturated)

        Returns:
            pareto_report dict plus the tau and w used
        """
        settings = ScreenConfig(tau=tau)
        w = saturate_budget(w)
        full = exhaustive_candidates(self.cycle)
        points, normalizers = normalize(evaluate_objectives(self.spec, full, w))
        full_front = extract_front(points, normalizers)

        candidates = settings.candidates(self.cycle)
        lookup = {pt.chord: pt for pt in points}
        screened_front = extract_front([lookup[pair] for pair in candidates], normalizers)
        report = pareto_report(full_front, screened_front, candidates, total_chords=len(full))
        logger.info(
            f"Screened front: {len(screened_front)} points, exhaustive front: {len(full_front)}"
        )
        return {"tau": tau, "w": w, **report}

    def diagnose(
        self, p: int, q: int, w: float, theta0: float, rho0: Optional[float], head: int = 5
    ) -> Dict[str, Any]:
        """
        Discrepancy, spectrum head, Fiedler sinusoid fit and the ceiling-deficit
        report for one chord.
        """
        p, q = check_chord(self.cycle, p, q)
        spec = self.spec
        if spec.is_degenerate:
            logger.warning("lambda_1 is not simple; the ceiling deficit report is skipped")
            deficit = None
        else:
            deficit = ceiling_deficit_report(spec, ChordCandidate(p, q, w), theta0, rho0).to_dict()
        return {
            "discrepancy": discrepancy(self.cycle).to_dict(),
            "spectrum": spec.to_dict(head),
            "fiedler_fit": fiedler_mode_fit(spec, self.cycle).to_dict(),
            "chord": [p, q],
            "w": float(w),
            "ceiling_deficit": deficit,
        }
