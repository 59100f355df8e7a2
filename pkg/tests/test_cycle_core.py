#!/usr/bin/env python3
"""Tests for the weighted cycle and its closed-form resistance quantities."""

import numpy as np
import pytest

from src.cycle_core import (
    WeightedCycle,
    admissible_arrays,
    admissible_chords,
    arc_resistance,
    check_chord,
    discrepancy,
    expected_chord_count,
    is_admissible,
    kirchhoff_index_closed_form,
    near_antipodal_pairs,
    pair_resistance,
    parse_pair,
    resistance_distance,
    resistance_profile,
)
from src.exceptions import InputError


class TestWeightedCycle:
    """Tests for construction and validation."""

    def test_rejects_too_few_vertices(self):
        """Should reject a cycle with fewer than four vertices."""
        with pytest.raises(InputError):
            WeightedCycle(np.ones(3))

    @pytest.mark.parametrize("bad", [0.0, -1.0, np.inf, np.nan])
    def test_rejects_invalid_conductance(self, bad):
        """Should reject zero, negative and non-finite conductances."""
        with pytest.raises(InputError):
            WeightedCycle(np.array([1.0, 2.0, bad, 1.0]))

    def test_conductances_are_read_only(self):
        """Should not allow the conductances to be modified in place."""
        cycle = WeightedCycle(np.ones(5))
        with pytest.raises(ValueError):
            cycle.conductances[0] = 2.0

    def test_from_dict_ignores_meta(self):
        """Should accept the generator output including its meta block."""
        cycle = WeightedCycle.from_dict({"n": 4, "conductances": [1, 2, 3, 4], "meta": {"seed": 1}})
        assert cycle.n == 4
        assert cycle.to_dict() == {"n": 4, "conductances": [1.0, 2.0, 3.0, 4.0]}

    def test_from_dict_rejects_inconsistent_n(self):
        """Should reject an 'n' that disagrees with the conductance list."""
        with pytest.raises(InputError):
            WeightedCycle.from_dict({"n": 5, "conductances": [1, 2, 3, 4]})

    def test_check_vertex(self):
        """Should reject out-of-range vertex indices."""
        cycle = WeightedCycle.uniform(6)
        assert cycle.check_vertex(5) == 5
        with pytest.raises(InputError):
            cycle.check_vertex(6)


class TestResistances:
    """Tests for arc and pairwise resistances."""

    def test_profile_prefix_sums(self):
        """Should build prefix sums ending at the total resistance."""
        cycle = WeightedCycle(np.array([1.0, 2.0, 4.0, 0.5]))
        profile = resistance_profile(cycle)
        assert profile.s.tolist() == [0.0, 1.0, 1.5, 1.75, 3.75]
        assert profile.total == 3.75
        assert profile.r_max == 2.0

    def test_arcs_sum_to_total(self, random_cycle):
        """Should split the total resistance into the two arcs."""
        S = resistance_profile(random_cycle).total
        for a, b in [(0, 5), (7, 3), (23, 0)]:
            total = arc_resistance(random_cycle, a, b) + arc_resistance(random_cycle, b, a)
            assert total == pytest.approx(S, rel=1e-12)

    def test_pair_resistance_matches_pseudoinverse(self, random_cycle, nx_laplacian):
        """Should agree with the dense pseudoinverse oracle."""
        G = np.linalg.pinv(nx_laplacian(random_cycle))
        for a, b in [(0, 1), (0, 12), (5, 17), (23, 2)]:
            oracle = G[a, a] + G[b, b] - 2 * G[a, b]
            assert pair_resistance(random_cycle, a, b) == pytest.approx(oracle, rel=1e-9)

    def test_pair_resistance_needs_distinct_vertices(self, random_cycle):
        """Should raise on a == b."""
        with pytest.raises(InputError):
            pair_resistance(random_cycle, 3, 3)

    def test_resistance_distance_is_short_arc(self, random_cycle):
        """Should return the shorter of the two arcs."""
        S = resistance_profile(random_cycle).total
        d = resistance_distance(random_cycle, 2, 14)
        assert d <= S / 2
        assert d == pytest.approx(
            min(arc_resistance(random_cycle, 2, 14), arc_resistance(random_cycle, 14, 2))
        )


class TestKirchhoffIndex:
    """Tests for the closed-form Kirchhoff index."""

    @pytest.mark.parametrize("n, expected", [(4, 5.0), (5, 10.0)])
    def test_uniform_cycles(self, n, expected):
        """Should give (n^3 - n)/12 on unit cycles."""
        assert kirchhoff_index_closed_form(WeightedCycle.uniform(n)) == pytest.approx(expected, abs=1e-10)

    def test_matches_spectral_sum(self, make_cycle, nx_laplacian):
        """Should equal n * sum 1/lambda_k on random cycles."""
        for seed in range(5):
            cycle = make_cycle(5 + 7 * seed, seed=seed)
            lam = np.linalg.eigvalsh(nx_laplacian(cycle))[1:]
            oracle = cycle.n * np.sum(1.0 / lam)
            assert kirchhoff_index_closed_form(cycle) == pytest.approx(oracle, rel=1e-8)


class TestDiscrepancy:
    """Tests for the discrepancy report."""

    def test_uniform_cycle(self):
        """Should report zero discrepancy and eta = 1/n on a uniform cycle."""
        report = discrepancy(WeightedCycle.uniform(10, 3.0))
        assert report.D == pytest.approx(0.0, abs=1e-12)
        assert report.eta == pytest.approx(0.1)
        assert report.delta_n == pytest.approx(0.1)

    def test_node_discrepancy_bounded(self, random_cycle):
        """Should never let the node discrepancy exceed Delta."""
        report = discrepancy(random_cycle)
        assert 0 <= report.node_discrepancy <= report.Delta + 1e-15
        assert report.delta_n == pytest.approx(report.Delta + report.eta)

    def test_single_heavy_edge(self):
        """Should see one dominant resistance as a large run deviation."""
        cycle = WeightedCycle(np.array([0.01, 1.0, 1.0, 1.0]))
        report = discrepancy(cycle)
        assert report.eta == pytest.approx(100.0 / 103.0)
        assert report.Delta > 0.7

    def test_matches_direct_run_sums(self, make_cycle):
        """Should equal the largest deviation over every cyclic run, summed term by term."""
        cycle = make_cycle(13, seed=8)
        r = 1.0 / cycle.conductances
        total = r.sum()
        D = max(
            abs(sum(r[(p + k) % 13] for k in range(length)) - length * total / 13)
            for p in range(13)
            for length in range(1, 14)
        )
        assert discrepancy(cycle).D == pytest.approx(D, rel=1e-12, abs=1e-12)


class TestChords:
    """Tests for admissible chords and pair parsing."""

    @pytest.mark.parametrize("n", [4, 5, 9, 30])
    def test_chord_count(self, n):
        """Should enumerate n(n-3)/2 admissible chords."""
        chords = admissible_chords(WeightedCycle.uniform(n))
        assert len(chords) == expected_chord_count(n) == n * (n - 3) // 2
        P, Q = admissible_arrays(n)
        assert list(zip(P.tolist(), Q.tolist())) == chords

    def test_wraparound_is_adjacent(self):
        """Should treat 0 and n-1 as adjacent."""
        assert not is_admissible(8, 0, 7)
        assert is_admissible(8, 0, 6)

    def test_check_chord(self):
        """Should order endpoints and reject adjacent pairs."""
        cycle = WeightedCycle.uniform(6)
        assert check_chord(cycle, 4, 1) == (1, 4)
        with pytest.raises(InputError):
            check_chord(cycle, 2, 3)

    def test_parse_pair(self):
        """Should parse 'p,q' into an ordered pair."""
        assert parse_pair("3, 1") == (1, 3)
        with pytest.raises(InputError):
            parse_pair("1")
        with pytest.raises(InputError):
            parse_pair("a,b")

    def test_near_antipodal_nonempty(self, make_cycle):
        """Should find at least one partner per instance with zeta = r_max."""
        for seed in range(5):
            cycle = make_cycle(31, seed=seed)
            zeta = resistance_profile(cycle).r_max
            pairs = near_antipodal_pairs(cycle, zeta)
            assert pairs
            assert all(is_admissible(cycle.n, p, q) for p, q in pairs)
