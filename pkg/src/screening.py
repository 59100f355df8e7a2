#!/usr/bin/env python3
"""
Candidate-chord screening and baseline selectors.

Resistance-balanced antipodal pair screening (RBAPS) pairs every vertex i with
the vertices straddling the point half the total resistance away from it. The
adaptive-window variant (AW-RBAPS, tau > 0) then widens each straddling seed
while the two arcs stay balanced to within tau * S.
"""

import bisect
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Iterable, Iterator, Optional, Tuple

import numpy as np

from src.cycle_core import (
    Pair,
    WeightedCycle,
    admissible_arrays,
    is_admissible,
    near_antipodal_pairs,
    resistance_profile,
)
from src.exceptions import InputError
from src.logging_utils import get_logger
from src.spectral import SpectralDecomposition

logger = get_logger(__name__)

DEFAULT_TAU = 0.1


class CandidateSource(str, Enum):
    """Where a candidate set came from."""

    RBAPS = "RBAPS"
    AW_RBAPS = "AW-RBAPS"
    FULL = "FULL"
    FIEDLER = "FIEDLER"
    RANDOM = "RANDOM"
    ANTIPODAL = "ANTIPODAL"


@dataclass(frozen=True)
class ScreenConfig:
    """Screening tolerance and the low-frequency mode count used to rank its candidates."""

    tau: float = DEFAULT_TAU
    m: int = 12

    def __post_init__(self):
        if not 0 <= self.tau < 1:
            raise InputError(f"tau must lie in [0, 1), got {self.tau}")
        if int(self.m) != self.m or self.m < 1:
            raise InputError(f"Mode count m must be a positive integer, got {self.m}")

    def plain(self) -> "ScreenConfig":
        """Same settings with the window closed (plain RBAPS)."""
        return replace(self, tau=0.0)

    def modes(self, n: int) -> int:
        """Mode count clipped to the n-1 nonzero modes of an n-cycle."""
        return min(int(self.m), n - 1)

    def candidates(self, cycle: WeightedCycle) -> "CandidateSet":
        return screen(cycle, self.tau)


@dataclass(frozen=True)
class CandidateSet:
    """Deduplicated admissible pairs in lexicographic order, tagged with their source."""

    pairs: Tuple[Pair, ...]
    source: CandidateSource

    @classmethod
    def from_pairs(cls, pairs: Iterable[Pair], source: CandidateSource) -> "CandidateSet":
        ordered = sorted({(min(p, q), max(p, q)) for p, q in pairs})
        return cls(tuple(ordered), source)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[Pair]:
        return iter(self.pairs)

    def __contains__(self, pair) -> bool:
        p, q = pair
        key = (min(p, q), max(p, q))
        index = bisect.bisect_left(self.pairs, key)
        return index < len(self.pairs) and self.pairs[index] == key

    def arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """Endpoint arrays (P, Q) in the set's order."""
        if not self.pairs:
            return np.empty(0, dtype=np.intp), np.empty(0, dtype=np.intp)
        P, Q = zip(*self.pairs)
        return np.asarray(P, dtype=np.intp), np.asarray(Q, dtype=np.intp)

    def to_list(self):
        return [[p, q] for p, q in self.pairs]


def screen(cycle: WeightedCycle, tau: float = 0.0) -> CandidateSet:
    """
    Resistance-balanced screening (RBAPS for tau == 0, AW-RBAPS for tau > 0).

    For each vertex i the target t = s~_i + S/2 is located by binary search over
    the lifted prefix sums s~ (2n + 1 entries); the first index j reaching t and
    its neighbours j-1, j+1 seed the candidates. With tau > 0 each seed is
    extended one step at a time to the left and to the right while
    |2(s~_k - s~_i) - S| <= tau * S, stopping at the first violation in each
    direction. Indices stay inside i+1..i+n-1 and only nonadjacent pairs are kept.

    Args:
        cycle: The weighted cycle
        tau: Window tolerance, >= 0

    Returns:
        CandidateSet: Pairs tagged RBAPS or AW-RBAPS

    Raises:
        InputError: If tau is negative
    """
    if not tau >= 0:
        raise InputError(f"tau must be nonnegative, got {tau}")

    n = cycle.n
    profile = resistance_profile(cycle)
    total = profile.total
    lifted = np.concatenate((profile.s[:-1], total + profile.s))
    window = tau * total

    pairs = set()

    def add(i: int, k: int) -> None:
        v = k % n
        if is_admissible(n, i, v):
            pairs.add((min(i, v), max(i, v)))

    def balanced(i: int, k: int) -> bool:
        return abs(2.0 * (lifted[k] - lifted[i]) - total) <= window

    for i in range(n):
        target = lifted[i] + 0.5 * total
        j = int(np.searchsorted(lifted, target, side="left"))
        j = min(max(j, i + 1), i + n)
        seeds = [k for k in (j - 1, j, j + 1) if i + 1 <= k <= i + n - 1]
        for k0 in seeds:
            add(i, k0)
            if tau <= 0:
                continue
            k = k0 - 1
            while k >= i + 1 and balanced(i, k):
                add(i, k)
                k -= 1
            k = k0 + 1
            while k <= i + n - 1 and balanced(i, k):
                add(i, k)
                k += 1

    source = CandidateSource.AW_RBAPS if tau > 0 else CandidateSource.RBAPS
    result = CandidateSet(tuple(sorted(pairs)), source)
    logger.debug(f"{source.value} screening with tau={tau}: {len(result)} candidates on n={n}")
    return result


def exhaustive_candidates(cycle: WeightedCycle) -> CandidateSet:
    """Every admissible chord, tagged FULL."""
    P, Q = admissible_arrays(cycle.n)
    return CandidateSet(tuple(zip(P.tolist(), Q.tolist())), CandidateSource.FULL)


def fiedler_baseline(spec: SpectralDecomposition, cycle: WeightedCycle) -> Pair:
    """
    Pair the vertices where the Fiedler vector is smallest and largest.

    Falls back to the admissible chord maximizing (u_{1,p} - u_{1,q})^2 when the
    extremes are equal or adjacent.

    Args:
        spec: Spectral decomposition of the cycle
        cycle: The same cycle

    Returns:
        The chosen (p, q) with p < q
    """
    u1 = spec.fiedler
    lo, hi = int(np.argmin(u1)), int(np.argmax(u1))
    if is_admissible(cycle.n, lo, hi):
        return (min(lo, hi), max(lo, hi))
    logger.debug(f"Fiedler extremes ({lo}, {hi}) are not a chord; maximizing the squared gap")
    P, Q = admissible_arrays(cycle.n)
    best = int(np.argmax((u1[P] - u1[Q]) ** 2))
    return (int(P[best]), int(Q[best]))


def random_baseline(cycle: WeightedCycle, rng: np.random.Generator) -> Pair:
    """One chord drawn uniformly from the admissible set (one integer draw from rng)."""
    P, Q = admissible_arrays(cycle.n)
    index = int(rng.integers(P.size))
    return (int(P[index]), int(Q[index]))


def select_best(candidates: CandidateSet, score: Callable[[int, int], float]) -> Pair:
    """
    Maximize a chord score over a candidate set.

    Ties go to the lexicographically smallest pair.

    Args:
        candidates: Nonempty candidate set
        score: Function of (p, q) returning a real score

    Returns:
        The best (p, q)

    Raises:
        InputError: If the candidate set is empty
    """
    if len(candidates) == 0:
        raise InputError(f"Cannot select from an empty {candidates.source.value} candidate set")
    best_pair: Optional[Pair] = None
    best_value = -np.inf
    for pair in candidates.pairs:
        value = float(score(*pair))
        if best_pair is None or value > best_value:
            best_pair, best_value = pair, value
    return best_pair


def antipodal_selection(
    spec: SpectralDecomposition, cycle: WeightedCycle, zeta: Optional[float] = None
) -> Pair:
    """
    Among near-antipodal chords (|d_R(p, q) - S/2| <= zeta), take the one with the
    largest Fiedler jump |u_{1,p} - u_{1,q}|.

    zeta defaults to r_max, for which the near-antipodal set is never empty.
    """
    if zeta is None:
        zeta = resistance_profile(cycle).r_max
    pairs = near_antipodal_pairs(cycle, zeta)
    candidates = CandidateSet(tuple(pairs), CandidateSource.ANTIPODAL)
    u1 = spec.fiedler
    return select_best(candidates, lambda p, q: abs(u1[p] - u1[q]))
