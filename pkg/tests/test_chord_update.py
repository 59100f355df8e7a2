#!/usr/bin/env python3
"""Tests for the rank-one resistance and Kirchhoff-index update formulas."""

import math

import numpy as np
import pytest

from src.chord_update import (
    ChordCandidate,
    ceiling_deficit_report,
    endpoint_resistance_updated,
    kirchhoff_improvement,
    kirchhoff_improvement_pairsum,
    kirchhoff_improvements,
    pairwise_resistance_updated,
    saturate_budget,
    score_chord,
    square_sum,
)
from src.cycle_core import WeightedCycle, admissible_arrays
from src.exceptions import InputError
from src.spectral import decompose, laplacian


def random_cases(count, seed=1, n_range=(5, 60)):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        cycle = WeightedCycle(rng.uniform(1.0, 100.0, n))
        P, Q = admissible_arrays(n)
        k = int(rng.integers(P.size))
        yield cycle, ChordCandidate(int(P[k]), int(Q[k]), float(rng.uniform(0.1, 100.0)))


def resistance_matrix(G):
    diag = np.diag(G)
    return diag[:, None] + diag[None, :] - 2 * G


class TestChordCandidate:
    """Tests for chord validation."""

    def test_orders_endpoints(self):
        """Should store endpoints as p < q."""
        assert ChordCandidate(7, 2, 1.0).pair == (2, 7)

    def test_rejects_loop_and_negative_weight(self):
        """Should reject p == q and w < 0."""
        with pytest.raises(InputError):
            ChordCandidate(3, 3, 1.0)
        with pytest.raises(InputError):
            ChordCandidate(0, 3, -0.5)


class TestKirchhoffImprovement:
    """Tests for the fast and pair-sum Kirchhoff improvements."""

    def test_three_forms_agree(self):
        """Should match the pair-sum form and a dense recomputation within rel 1e-8."""
        for cycle, chord in random_cases(200):
            spec = decompose(cycle)
            fast = kirchhoff_improvement(spec, chord)
            pairsum = kirchhoff_improvement_pairsum(spec, chord)
            L_new = laplacian(cycle, (chord.p, chord.q, chord.w))
            dense = spec.kirchhoff_index() - cycle.n * np.trace(np.linalg.pinv(L_new))
            assert fast == pytest.approx(pairsum, rel=1e-8)
            assert fast == pytest.approx(dense, rel=1e-8)

    def test_vectorized_matches_scalar(self, random_cycle):
        """Should give the same improvements in bulk."""
        spec = decompose(random_cycle)
        P, Q = admissible_arrays(random_cycle.n)
        bulk = kirchhoff_improvements(spec, P, Q, 10.0)
        for k in range(0, P.size, 29):
            chord = ChordCandidate(int(P[k]), int(Q[k]), 10.0)
            assert bulk[k] == pytest.approx(kirchhoff_improvement(spec, chord), rel=1e-12)

    def test_square_sum(self, random_cycle):
        """Should equal the explicit sum of squared brackets over all vertex pairs."""
        spec = decompose(random_cycle)
        R = resistance_matrix(np.linalg.pinv(laplacian(random_cycle)))
        p, q = 4, 15
        bracket = R[:, q][:, None] + R[:, p][None, :] - R[:, p][:, None] - R[:, q][None, :]
        explicit = np.sum(np.triu(bracket**2, k=1))
        assert square_sum(spec, ChordCandidate(p, q, 1.0)) == pytest.approx(explicit, rel=1e-8)

    def test_increasing_concave_in_w(self):
        """Should grow with w with shrinking increments."""
        grid = [1.0, 2.0, 3.0, 4.0, 5.0]
        for cycle, chord in random_cases(100, seed=2, n_range=(5, 40)):
            spec = decompose(cycle)
            values = np.array(
                [kirchhoff_improvement(spec, ChordCandidate(chord.p, chord.q, w)) for w in grid]
            )
            steps = np.diff(values)
            tol = 1e-10 * max(1.0, values[-1])
            assert np.all(steps > 0)
            assert np.all(np.diff(steps) <= tol)


class TestResistanceUpdates:
    """Tests for endpoint and pairwise resistance updates."""

    def test_pairwise_matches_dense(self):
        """Should agree with the dense pseudoinverse of L + w b b^T within abs 1e-9."""
        for cycle, chord in random_cases(60, seed=3, n_range=(5, 30)):
            spec = decompose(cycle)
            R_new = resistance_matrix(np.linalg.pinv(laplacian(cycle, (chord.p, chord.q, chord.w))))
            for u, v in [(0, 2), (1, cycle.n - 1), (chord.p, chord.q), (0, cycle.n // 2)]:
                if u == v:
                    continue
                got = pairwise_resistance_updated(spec, chord, u, v)
                assert got == pytest.approx(R_new[u, v], abs=1e-9)

    def test_endpoint_resistance(self, random_cycle):
        """Should give R / (1 + w R) between the chord endpoints."""
        spec = decompose(random_cycle)
        chord = ChordCandidate(3, 14, 5.0)
        R = spec.resistance(3, 14)
        assert endpoint_resistance_updated(spec, chord) == pytest.approx(R / (1 + 5.0 * R))

    def test_endpoint_resistance_decreasing_convex(self):
        """Should shrink with w with shrinking decrements."""
        grid = [1.0, 2.0, 3.0, 4.0, 5.0]
        for cycle, chord in random_cases(100, seed=4, n_range=(5, 40)):
            spec = decompose(cycle)
            values = np.array(
                [endpoint_resistance_updated(spec, ChordCandidate(chord.p, chord.q, w)) for w in grid]
            )
            steps = np.diff(values)
            assert np.all(steps < 0)
            assert np.all(np.diff(steps) >= -1e-10)

    def test_pairwise_never_increases(self):
        """Should lower or keep every pair resistance, more so as w grows."""
        grid = [0.0, 0.5, 2.0, 10.0, 100.0]
        for cycle, chord in random_cases(10, seed=9, n_range=(5, 14)):
            spec = decompose(cycle)
            for u in range(cycle.n):
                for v in range(u + 1, cycle.n):
                    values = [
                        pairwise_resistance_updated(spec, ChordCandidate(chord.p, chord.q, w), u, v)
                        for w in grid
                    ]
                    assert values[0] == pytest.approx(spec.resistance(u, v), abs=1e-12)
                    assert np.all(np.diff(values) <= 1e-12)

    def test_pairwise_needs_distinct_vertices(self, random_cycle):
        """Should raise on u == v."""
        spec = decompose(random_cycle)
        with pytest.raises(InputError):
            pairwise_resistance_updated(spec, ChordCandidate(0, 5, 1.0), 2, 2)


class TestScoreChord:
    """Tests for the combined chord score."""

    def test_uniform_square(self, uniform4):
        """Should give zero gain and a halved endpoint resistance on the unit 4-cycle."""
        score = score_chord(decompose(uniform4), ChordCandidate(0, 2, 1.0))
        assert score.delta_exact == 0.0
        assert score.r_endpoint == pytest.approx(1.0)
        assert score.r_endpoint_updated == pytest.approx(0.5)
        assert score.modes == 3

    def test_fields_consistent(self, random_cycle):
        """Should reuse the single-objective functions."""
        spec = decompose(random_cycle)
        chord = ChordCandidate(2, 13, 20.0)
        score = score_chord(spec, chord, m=12)
        assert score.improvement == pytest.approx(kirchhoff_improvement(spec, chord), rel=1e-12)
        assert score.delta_lowfreq >= score.delta_exact - 1e-10
        assert set(score.to_dict()) >= {"delta_exact", "delta_lowfreq", "improvement", "r_endpoint_updated"}

    def test_saturate_budget(self):
        """Should spend the whole budget and reject negative ones."""
        assert saturate_budget(100) == 100.0
        with pytest.raises(InputError):
            saturate_budget(-1)
        with pytest.raises(InputError):
            saturate_budget(math.inf)


class TestCeilingDeficit:
    """Tests for the ceiling-deficit report."""

    def test_deficit_within_ceiling(self, make_cycle):
        """Should report a deficit between zero and the ceiling gamma."""
        cycle = make_cycle(40, seed=6)
        spec = decompose(cycle)
        report = ceiling_deficit_report(spec, ChordCandidate(0, 20, 100.0))
        assert 0 <= report.deficit <= report.gamma + 1e-12
        assert report.gain + report.deficit == pytest.approx(report.gamma, abs=1e-10)
        if report.hypotheses_hold:
            assert report.bound_satisfied is True
        else:
            assert report.bound_rhs is None

    def test_bound_holds_whenever_hypotheses_do(self, make_cycle):
        """Should satisfy the comparison bound on every chord where its hypotheses hold."""
        cycle = make_cycle(30, seed=8)
        spec = decompose(cycle)
        P, Q = admissible_arrays(cycle.n)
        for p, q in zip(P.tolist(), Q.tolist()):
            report = ceiling_deficit_report(spec, ChordCandidate(p, q, 1e4), theta0=0.9)
            assert report.bound_satisfied in (None, True)

    def test_degenerate_spectrum(self, uniform4):
        """Should refuse a double lambda_1."""
        with pytest.raises(InputError):
            ceiling_deficit_report(decompose(uniform4), ChordCandidate(0, 2, 1.0))

    def test_theta0_range(self, random_cycle):
        """Should reject theta0 outside (0, 1)."""
        with pytest.raises(InputError):
            ceiling_deficit_report(decompose(random_cycle), ChordCandidate(0, 9, 1.0), theta0=1.0)
