#!/usr/bin/env python3
"""
Two-objective chord evaluation and Pareto-front metrics.

Objectives (both maximized): the Kirchhoff improvement I and the
algebraic-connectivity gain D, each normalized by its exhaustive optimum.
A screened front is compared with the exhaustive one through set-level
coverage, additive epsilon-dominance and the dominated-hypervolume ratio
(reference point (0, 0)).
"""

import math
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.chord_update import kirchhoff_improvements
from src.cycle_core import Pair
from src.exceptions import InputError
from src.logging_utils import get_logger
from src.screening import CandidateSet
from src.spectral import SpectralDecomposition, check_weight, exact_gains

logger = get_logger(__name__)


@dataclass(frozen=True)
class ObjectivePoint:
    """One chord in objective space; norm_* equal raw_* until normalized."""

    p: int
    q: int
    raw_I: float
    raw_D: float
    norm_I: float
    norm_D: float

    @property
    def chord(self) -> Pair:
        return (self.p, self.q)

    def to_dict(self) -> Dict[str, Any]:
        return {"p": self.p, "q": self.q, "nI": self.norm_I, "nD": self.norm_D}


@dataclass(frozen=True)
class Normalizers:
    """Exhaustive single-objective optima I* and D*, with zero-normalizer flags."""

    I_star: float
    D_star: float

    @property
    def degenerate_I(self) -> bool:
        return self.I_star <= 0

    @property
    def degenerate_D(self) -> bool:
        return self.D_star <= 0

    @property
    def degenerate(self) -> bool:
        return self.degenerate_I or self.degenerate_D


@dataclass(frozen=True)
class ParetoFront:
    """
    Nondominated points in descending norm_D (hence strictly ascending norm_I).

    knee and hv are None when a normalizer is zero (degenerate).
    """

    efficient: Tuple[ObjectivePoint, ...]
    knee: Optional[Pair]
    hv: Optional[float]
    degenerate: bool = False

    def __len__(self) -> int:
        return len(self.efficient)

    def chords(self) -> List[Pair]:
        return [point.chord for point in self.efficient]

    def to_list(self) -> List[Dict[str, Any]]:
        return [point.to_dict() for point in self.efficient]


def evaluate_objectives(
    spec: SpectralDecomposition, candidates: CandidateSet, w: float
) -> List[ObjectivePoint]:
    """
    Raw objectives of every candidate: exact secular gain and fast Kirchhoff improvement.

    Args:
        spec: Spectral decomposition of the base cycle
        candidates: Chords to evaluate
        w: Chord conductance (the saturated budget)

    Returns:
        List of ObjectivePoint in the candidate order, not yet normalized
    """
    w = check_weight(w)
    P, Q = candidates.arrays()
    D = exact_gains(spec, P, Q, w)
    I = kirchhoff_improvements(spec, P, Q, w)
    return [
        ObjectivePoint(int(p), int(q), float(i), float(d), float(i), float(d))
        for p, q, i, d in zip(P, Q, I, D)
    ]


def normalize(
    points: Sequence[ObjectivePoint], normalizers: Optional[Normalizers] = None
) -> Tuple[List[ObjectivePoint], Normalizers]:
    """
    Divide raw objectives by the exhaustive optima.

    With the default normalizers (the maxima over ``points``) the largest
    norm_I and norm_D are exactly 1. A zero D* sets every norm_D to 0 and a zero
    I* leaves norm_I raw; both cases are flagged on the returned Normalizers.

    Args:
        points: Raw objective points
        normalizers: Optima from the exhaustive set; computed from points if omitted

    Returns:
        Tuple of (normalized points, normalizers)
    """
    if normalizers is None:
        normalizers = Normalizers(
            I_star=max((pt.raw_I for pt in points), default=0.0),
            D_star=max((pt.raw_D for pt in points), default=0.0),
        )
    if normalizers.degenerate:
        logger.warning(
            f"Degenerate normalizers (I*={normalizers.I_star:.6g}, D*={normalizers.D_star:.6g}); "
            "knee and hypervolume are skipped"
        )
    normalized = []
    for pt in points:
        norm_I = pt.raw_I if normalizers.degenerate_I else pt.raw_I / normalizers.I_star
        norm_D = 0.0 if normalizers.degenerate_D else pt.raw_D / normalizers.D_star
        normalized.append(replace(pt, norm_I=norm_I, norm_D=norm_D))
    return normalized, normalizers


def dominates(a: ObjectivePoint, b: ObjectivePoint) -> bool:
    """a weakly improves both normalized objectives of b and strictly improves one."""
    return (
        a.norm_I >= b.norm_I
        and a.norm_D >= b.norm_D
        and (a.norm_I > b.norm_I or a.norm_D > b.norm_D)
    )


def _record_scan(points: Sequence[ObjectivePoint]) -> List[ObjectivePoint]:
    ordered = sorted(points, key=lambda pt: (-pt.norm_D, -pt.norm_I, pt.p, pt.q))
    front = []
    best_I = -math.inf
    for pt in ordered:
        if pt.norm_I > best_I:
            front.append(pt)
            best_I = pt.norm_I
    return front


def hypervolume(points: Sequence[ObjectivePoint]) -> float:
    """
    Area dominated by the points relative to the origin (exact 2-D staircase).

    Dominated points contribute nothing; negative coordinates are clipped to 0.
    """
    staircase = sorted(_record_scan(points), key=lambda pt: pt.norm_I)
    area = 0.0
    previous_I = 0.0
    for pt in staircase:
        x, y = max(pt.norm_I, 0.0), max(pt.norm_D, 0.0)
        if x > previous_I:
            area += (x - previous_I) * y
            previous_I = x
    return area


def knee(front: ParetoFront) -> Optional[Pair]:
    """
    Front chord closest to the ideal point (1, 1); lexicographic tie-break.

    Returns None for an empty or degenerate front.
    """
    if front.degenerate or not front.efficient:
        return None
    return _knee_of(front.efficient)


def _knee_of(efficient: Sequence[ObjectivePoint]) -> Pair:
    best = min(
        efficient,
        key=lambda pt: (math.hypot(1.0 - pt.norm_I, 1.0 - pt.norm_D), pt.p, pt.q),
    )
    return best.chord


def extract_front(
    points: Sequence[ObjectivePoint], normalizers: Optional[Normalizers] = None
) -> ParetoFront:
    """
    Pareto-efficient subset by a single record scan.

    Points are sorted by decreasing norm_D (ties: larger norm_I, then (p, q)) and
    a point is kept exactly when it sets a new norm_I record. Coinciding points
    collapse to the lexicographically first chord.

    Args:
        points: Normalized objective points
        normalizers: Normalizers used; a degenerate one suppresses knee and hypervolume

    Returns:
        ParetoFront

    Raises:
        InputError: If points is empty
    """
    if not points:
        raise InputError("Cannot extract a Pareto front from an empty point set")
    efficient = tuple(_record_scan(points))
    degenerate = normalizers is not None and normalizers.degenerate
    if degenerate:
        return ParetoFront(efficient=efficient, knee=None, hv=None, degenerate=True)
    return ParetoFront(
        efficient=efficient,
        knee=_knee_of(efficient),
        hv=hypervolume(efficient),
        degenerate=False,
    )


def hypervolume_ratio(full_front: ParetoFront, screened_front: ParetoFront) -> Optional[float]:
    """Screened-front hypervolume over exhaustive-front hypervolume; None when undefined."""
    if full_front.degenerate or not full_front.hv:
        logger.debug("Hypervolume ratio undefined: exhaustive front has zero or no hypervolume")
        return None
    screened_hv = hypervolume(screened_front.efficient)
    ratio = screened_hv / full_front.hv
    if ratio > 1.0 + 1e-12:
        logger.warning(f"Screened hypervolume exceeds the exhaustive one (ratio {ratio!r})")
    return ratio


def coverage(full_front: ParetoFront, screened_candidates: CandidateSet) -> Optional[float]:
    """
    Fraction of exhaustive-front chords that are in the screened candidate SET.

    Returns None for an empty exhaustive front.
    """
    if not full_front.efficient:
        return None
    hits = sum(1 for chord in full_front.chords() if chord in screened_candidates)
    return hits / len(full_front)


def front_coverage(full_front: ParetoFront, screened_front: ParetoFront) -> Optional[float]:
    """Fraction of exhaustive-front chords that are also on the screened front."""
    if not full_front.efficient:
        return None
    screened = set(screened_front.chords())
    hits = sum(1 for chord in full_front.chords() if chord in screened)
    return hits / len(full_front)


def epsilon_plus(full_front: ParetoFront, screened_front: ParetoFront) -> float:
    """
    Additive epsilon-dominance error of the screened front in normalized coordinates:
    max over exhaustive points of min over screened points of max(dI, dD, 0).

    Returns inf when the screened front is empty.
    """
    if not screened_front.efficient:
        logger.warning("Screened front is empty; epsilon+ is infinite")
        return math.inf
    if not full_front.efficient:
        return 0.0
    full = np.array([[pt.norm_I, pt.norm_D] for pt in full_front.efficient])
    screened = np.array([[pt.norm_I, pt.norm_D] for pt in screened_front.efficient])
    gaps = np.maximum(full[:, None, :] - screened[None, :, :], 0.0).max(axis=2)
    return float(gaps.min(axis=1).max())


def pearson_correlation(x: Sequence[float], y: Sequence[float]) -> Optional[float]:
    """Pearson correlation of two samples; None when either has zero variance."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise InputError(f"Samples differ in shape: {x.shape} vs {y.shape}")
    if x.size < 2:
        return None
    dx = x - x.mean()
    dy = y - y.mean()
    denom = math.sqrt(float(dx @ dx) * float(dy @ dy))
    if denom == 0:
        logger.debug("Correlation undefined: zero variance")
        return None
    return float(np.clip((dx @ dy) / denom, -1.0, 1.0))


def pareto_report(
    full_front: ParetoFront,
    screened_front: ParetoFront,
    screened_candidates: CandidateSet,
    total_chords: Optional[int] = None,
) -> Dict[str, Any]:
    """
    JSON-ready comparison of a screened front with the exhaustive front.

    Keys: front, knee, hv_ratio, eps_plus, coverage, plus the exhaustive front,
    its knee, front-level coverage and the degenerate flag. Infinite eps_plus
    is written as null.
    """
    eps = epsilon_plus(full_front, screened_front)
    screened_knee = screened_front.knee
    report = {
        "front": screened_front.to_list(),
        "knee": list(screened_knee) if screened_knee else None,
        "hv_ratio": hypervolume_ratio(full_front, screened_front),
        "eps_plus": eps if math.isfinite(eps) else None,
        "coverage": coverage(full_front, screened_candidates),
        "front_coverage": front_coverage(full_front, screened_front),
        "full_front": full_front.to_list(),
        "full_knee": list(full_front.knee) if full_front.knee else None,
        "knee_captured": (
            screened_knee is not None and full_front.knee is not None
            and tuple(screened_knee) == tuple(full_front.knee)
        ),
        "candidates": len(screened_candidates),
        "source": screened_candidates.source.value,
        "degenerate": full_front.degenerate,
    }
    if total_chords:
        report["candidate_ratio"] = len(screened_candidates) / total_chords
    return report
