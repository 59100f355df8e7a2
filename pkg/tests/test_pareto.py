#!/usr/bin/env python3
"""Tests for objective evaluation, front extraction and front-quality metrics."""

import math

import numpy as np
import pytest

from src.exceptions import InputError
from src.pareto import (
    Normalizers,
    ObjectivePoint,
    ParetoFront,
    coverage,
    dominates,
    epsilon_plus,
    evaluate_objectives,
    extract_front,
    front_coverage,
    hypervolume,
    hypervolume_ratio,
    knee,
    normalize,
    pareto_report,
    pearson_correlation,
)
from src.screening import CandidateSet, CandidateSource, exhaustive_candidates, screen
from src.spectral import decompose


def point(p, q, nI, nD):
    return ObjectivePoint(p, q, nI, nD, nI, nD)


@pytest.fixture
def hand_points():
    """Three efficient points and one dominated one."""
    return [
        point(0, 2, 1.0, 0.2),
        point(0, 3, 0.5, 0.5),
        point(1, 4, 0.2, 1.0),
        point(2, 5, 0.4, 0.4),
    ]


class TestFront:
    """Tests for extraction, hypervolume and knee on hand-built points."""

    def test_extract_front(self, hand_points):
        """Should drop the dominated point and order by decreasing D."""
        front = extract_front(hand_points)
        assert front.chords() == [(1, 4), (0, 3), (0, 2)]
        assert not front.degenerate

    def test_hypervolume(self, hand_points):
        """Should compute the staircase area against the origin."""
        assert hypervolume(hand_points) == pytest.approx(0.45)
        assert extract_front(hand_points).hv == pytest.approx(0.45)

    def test_knee(self, hand_points):
        """Should choose the point closest to (1, 1)."""
        front = extract_front(hand_points)
        assert front.knee == (0, 3)
        assert knee(front) == (0, 3)

    def test_coinciding_points_collapse(self):
        """Should keep only the lexicographically first of identical points."""
        front = extract_front([point(1, 4, 0.7, 0.7), point(0, 3, 0.7, 0.7)])
        assert front.chords() == [(0, 3)]

    def test_empty_points(self):
        """Should refuse an empty point set."""
        with pytest.raises(InputError):
            extract_front([])

    def test_dominates(self, hand_points):
        """Should require a strict improvement in one objective."""
        a, b, _, e = hand_points
        assert dominates(b, e)
        assert not dominates(a, b)
        assert not dominates(b, b)

    def test_front_matches_pairwise_dominance(self, random_cycle):
        """Should keep exactly the points no other point dominates."""
        spec = decompose(random_cycle)
        points, _ = normalize(evaluate_objectives(spec, exhaustive_candidates(random_cycle), 25.0))
        front = extract_front(points)
        brute = {pt.chord for pt in points if not any(dominates(o, pt) for o in points)}
        assert set(front.chords()) <= brute
        # Coinciding points aside, every undominated value pair is represented
        values = {(pt.norm_I, pt.norm_D) for pt in front.efficient}
        assert values == {(pt.norm_I, pt.norm_D) for pt in points if pt.chord in brute}


class TestMetrics:
    """Tests for epsilon+, coverage and the hypervolume ratio."""

    def test_epsilon_plus(self, hand_points):
        """Should measure how far the screened front falls short of the exhaustive one."""
        full = extract_front(hand_points)
        screened = extract_front(hand_points[1:])
        assert epsilon_plus(full, full) == 0.0
        assert epsilon_plus(full, screened) == pytest.approx(0.5)

    def test_epsilon_plus_empty_screened(self, hand_points):
        """Should be infinite for an empty screened front."""
        full = extract_front(hand_points)
        empty = ParetoFront(efficient=(), knee=None, hv=None)
        assert math.isinf(epsilon_plus(full, empty))

    def test_hypervolume_ratio(self, hand_points):
        """Should divide the screened area by the exhaustive one."""
        full = extract_front(hand_points)
        screened = extract_front(hand_points[1:])
        assert hypervolume_ratio(full, screened) == pytest.approx(0.35 / 0.45)

    def test_coverage_counts_candidate_set(self, hand_points):
        """Should count front chords present in the candidate set, not on the screened front."""
        full = extract_front(hand_points)
        candidates = CandidateSet.from_pairs([(0, 2), (1, 4), (6, 9)], CandidateSource.AW_RBAPS)
        assert coverage(full, candidates) == pytest.approx(2 / 3)
        assert front_coverage(full, extract_front(hand_points[2:])) == pytest.approx(1 / 3)

    def test_screened_front_never_beats_exhaustive(self, make_cycle):
        """Should keep hv_ratio <= 1 and eps+ >= 0 for screened subsets."""
        cycle = make_cycle(40, seed=13)
        spec = decompose(cycle)
        all_points, normalizers = normalize(evaluate_objectives(spec, exhaustive_candidates(cycle), 50.0))
        full = extract_front(all_points, normalizers)
        candidates = screen(cycle, 0.1)
        screened_points, _ = normalize(evaluate_objectives(spec, candidates, 50.0), normalizers)
        screened = extract_front(screened_points, normalizers)
        assert 0 <= hypervolume_ratio(full, screened) <= 1 + 1e-12
        assert epsilon_plus(full, screened) >= 0

    def test_report_keys(self, hand_points):
        """Should carry the front summary and metrics."""
        full = extract_front(hand_points)
        candidates = CandidateSet.from_pairs([(0, 3), (1, 4)], CandidateSource.AW_RBAPS)
        report = pareto_report(full, extract_front(hand_points[1:]), candidates, total_chords=20)
        assert report["knee"] == [0, 3]
        assert report["knee_captured"] is True
        assert report["eps_plus"] == pytest.approx(0.5)
        assert report["candidate_ratio"] == pytest.approx(0.1)
        assert report["source"] == "AW-RBAPS"


class TestNormalization:
    """Tests for normalization and its degenerate cases."""

    def test_maxima_become_one(self, random_cycle):
        """Should scale both objectives so the exhaustive maxima are 1."""
        spec = decompose(random_cycle)
        points, normalizers = normalize(evaluate_objectives(spec, exhaustive_candidates(random_cycle), 10.0))
        assert max(pt.norm_I for pt in points) == 1.0
        assert max(pt.norm_D for pt in points) == 1.0
        assert not normalizers.degenerate

    def test_zero_gain_normalizer(self, uniform4):
        """Should flag a zero D* and skip knee and hypervolume."""
        spec = decompose(uniform4)
        points, normalizers = normalize(evaluate_objectives(spec, exhaustive_candidates(uniform4), 1.0))
        assert normalizers.degenerate_D
        assert all(pt.norm_D == 0.0 for pt in points)
        front = extract_front(points, normalizers)
        assert front.degenerate
        assert front.knee is None and front.hv is None
        assert hypervolume_ratio(front, front) is None

    def test_explicit_normalizers(self):
        """Should divide by the given optima."""
        points, _ = normalize([ObjectivePoint(0, 2, 2.0, 3.0, 2.0, 3.0)], Normalizers(4.0, 6.0))
        assert (points[0].norm_I, points[0].norm_D) == (0.5, 0.5)


class TestPearson:
    """Tests for the correlation helper."""

    def test_linear(self):
        """Should give +1 and -1 on exact lines."""
        x = np.arange(10.0)
        assert pearson_correlation(x, 3 * x + 1) == pytest.approx(1.0)
        assert pearson_correlation(x, -x) == pytest.approx(-1.0)

    def test_undefined(self):
        """Should return None for a constant sample or a single point."""
        assert pearson_correlation([1, 1, 1], [1, 2, 3]) is None
        assert pearson_correlation([1], [2]) is None

    def test_shape_mismatch(self):
        """Should reject samples of different length."""
        with pytest.raises(InputError):
            pearson_correlation([1, 2], [1, 2, 3])
