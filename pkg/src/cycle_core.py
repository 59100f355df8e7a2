#!/usr/bin/env python3
"""
Weighted-cycle representation and closed-form resistance quantities.

Vertices are the integers 0..n-1; edge i joins vertex i and vertex i+1 (mod n)
and carries conductance c_i > 0, i.e. resistance r_i = 1/c_i. Every quantity
here is derived from the resistance prefix sums s_0 = 0, s_i = r_0 + ... + r_{i-1}
and the total resistance S = s_n.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

import numpy as np

from src.exceptions import InputError
from src.logging_utils import get_logger

logger = get_logger(__name__)

MIN_VERTICES = 4

Pair = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class WeightedCycle:
    """
    A cycle on n vertices with strictly positive, finite edge conductances.

    Instances are immutable; the conductance array is copied and made read-only.
    """

    conductances: np.ndarray
    n: int = field(init=False)

    def __post_init__(self):
        c = np.array(self.conductances, dtype=float).ravel()
        if c.size < MIN_VERTICES:
            raise InputError(
                f"A weighted cycle needs at least {MIN_VERTICES} vertices, got {c.size}"
            )
        if not np.all(np.isfinite(c)) or np.any(c <= 0):
            raise InputError("All conductances must be positive and finite")
        c.setflags(write=False)
        object.__setattr__(self, "conductances", c)
        object.__setattr__(self, "n", int(c.size))

    @classmethod
    def uniform(cls, n: int, conductance: float = 1.0) -> "WeightedCycle":
        """Cycle with every edge carrying the same conductance."""
        return cls(np.full(int(n), float(conductance)))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "WeightedCycle":
        """
        Build a cycle from its JSON form ``{"n": int, "conductances": [...]}``.

        A ``meta`` key, if present, is ignored.

        Args:
            data: Parsed JSON object

        Returns:
            WeightedCycle: The validated cycle

        Raises:
            InputError: If keys are missing or inconsistent
        """
        if not isinstance(data, dict) or "conductances" not in data:
            raise InputError("Cycle JSON must be an object with a 'conductances' list")
        try:
            conductances = [float(c) for c in data["conductances"]]
        except (TypeError, ValueError) as e:
            raise InputError(f"Invalid conductance value: {e}") from e
        if "n" in data and not (
            isinstance(data["n"], int) and not isinstance(data["n"], bool)
        ):
            raise InputError(f"'n' must be an integer, got {data['n']!r}")
        if "n" in data and data["n"] != len(conductances):
            raise InputError(
                f"'n' is {data['n']} but {len(conductances)} conductances were given"
            )
        return cls(np.asarray(conductances))

    def to_dict(self) -> Dict[str, Any]:
        """Serialize to the JSON form accepted by :meth:`from_dict`."""
        return {"n": self.n, "conductances": [float(c) for c in self.conductances]}

    def check_vertex(self, v: int) -> int:
        """
        Validate a vertex index.

        Args:
            v: Candidate vertex index

        Returns:
            int: The index as a plain int

        Raises:
            InputError: If the index is outside 0..n-1
        """
        if isinstance(v, bool) or not 0 <= int(v) < self.n or int(v) != v:
            raise InputError(f"Vertex {v} out of range for a cycle with n={self.n}")
        return int(v)


@dataclass(frozen=True, eq=False)
class ResistanceProfile:
    """Edge resistances with their prefix sums along the cycle."""

    r: np.ndarray
    s: np.ndarray  # length n+1, s[0] = 0, s[n] = total
    total: float
    r_max: float
    r_bar: float

    @property
    def n(self) -> int:
        return int(self.r.size)


@dataclass(frozen=True)
class DiscrepancyReport:
    """Deviation of the cumulative resistances from uniform spacing."""

    D: float
    Delta: float
    eta: float
    delta_n: float
    node_discrepancy: float  # max_i |s_i/S - i/n|, always <= Delta

    def to_dict(self) -> Dict[str, float]:
        return {
            "D": self.D,
            "Delta": self.Delta,
            "eta": self.eta,
            "delta_n": self.delta_n,
            "node_discrepancy": self.node_discrepancy,
        }


def resistance_profile(cycle: WeightedCycle) -> ResistanceProfile:
    """
    Compute edge resistances, their prefix sums and summary statistics.

    Args:
        cycle: The weighted cycle

    Returns:
        ResistanceProfile: r, s (with s[n] = S), S, r_max and the mean resistance
    """
    r = 1.0 / cycle.conductances
    s = np.concatenate(([0.0], np.cumsum(r)))
    total = float(s[-1])
    return ResistanceProfile(
        r=r, s=s, total=total, r_max=float(r.max()), r_bar=total / cycle.n
    )


def arc_resistance(cycle: WeightedCycle, a: int, b: int) -> float:
    """
    Directed arc resistance d(a, b): resistance of the path a -> a+1 -> ... -> b.

    Args:
        cycle: The weighted cycle
        a: Start vertex
        b: End vertex

    Returns:
        float: d(a, b); 0 when a == b, and d(a, b) + d(b, a) = S

    Raises:
        InputError: If either index is out of range
    """
    a = cycle.check_vertex(a)
    b = cycle.check_vertex(b)
    s = resistance_profile(cycle).s
    if a < b:
        return float(s[b] - s[a])
    if a == b:
        return 0.0
    return float(s[cycle.n] - s[a] + s[b])


def pair_resistance(cycle: WeightedCycle, a: int, b: int) -> float:
    """
    Effective resistance between two distinct vertices: the two arcs in parallel,
    R_ab = d(a, b) d(b, a) / S.

    Raises:
        InputError: If a == b or an index is out of range
    """
    if cycle.check_vertex(a) == cycle.check_vertex(b):
        raise InputError(f"pair_resistance needs two distinct vertices, got {a} twice")
    forward = arc_resistance(cycle, a, b)
    backward = arc_resistance(cycle, b, a)
    return forward * backward / (forward + backward)


def kirchhoff_index_closed_form(cycle: WeightedCycle) -> float:
    """
    Kirchhoff index of the cycle from arc resistances alone:
    K_f = (1/S) * sum_{u<v} d(u, v) (S - d(u, v)).

    Args:
        cycle: The weighted cycle

    Returns:
        float: Sum of all pairwise effective resistances
    """
    profile = resistance_profile(cycle)
    s = profile.s[:-1]
    forward = s[None, :] - s[:, None]
    upper = forward[np.triu_indices(cycle.n, k=1)]
    return float(np.sum(upper * (profile.total - upper)) / profile.total)


def discrepancy(cycle: WeightedCycle) -> DiscrepancyReport:
    """
    Measure how far the cumulative resistances deviate from uniform spacing.

    D is the largest deviation |A_{p,l} - l S / n| over every start vertex p and
    every run length 1 <= l <= n, where A_{p,l} sums l consecutive resistances
    starting at edge p (cyclically).

    Args:
        cycle: The weighted cycle

    Returns:
        DiscrepancyReport: D, Delta = D/S, eta = r_max/S and delta_n = Delta + eta
    """
    profile = resistance_profile(cycle)
    n, total = cycle.n, profile.total
    lifted = np.concatenate(([0.0], np.cumsum(np.tile(profile.r, 2))))
    lengths = np.arange(1, n + 1)
    expected = lengths * total / n

    starts = np.arange(n)[:, None]
    runs = lifted[starts + lengths[None, :]] - lifted[:n, None]
    D = float(np.max(np.abs(runs - expected[None, :])))

    Delta = D / total
    eta = profile.r_max / total
    node = float(np.max(np.abs(profile.s / total - np.arange(n + 1) / n)))
    if node > Delta * (1 + 1e-12) + 1e-15:
        logger.warning(f"Node discrepancy {node} exceeds Delta {Delta}")
    return DiscrepancyReport(D=D, Delta=Delta, eta=eta, delta_n=Delta + eta, node_discrepancy=node)


def cyclic_distance(n: int, p: int, q: int) -> int:
    """Hop distance between p and q around a cycle of n vertices."""
    gap = abs(int(p) - int(q)) % n
    return min(gap, n - gap)


def is_admissible(n: int, p: int, q: int) -> bool:
    """Whether {p, q} is a chord: distinct, nonadjacent vertices."""
    return cyclic_distance(n, p, q) >= 2


def admissible_chords(cycle: WeightedCycle) -> List[Pair]:
    """
    All unordered nonadjacent vertex pairs, as (min, max) tuples in lexicographic order.

    Args:
        cycle: The weighted cycle

    Returns:
        List of n(n-3)/2 pairs (empty for n < 4)
    """
    n = cycle.n
    if n < MIN_VERTICES:
        return []
    return [
        (p, q)
        for p in range(n)
        for q in range(p + 2, n)
        if is_admissible(n, p, q)
    ]


def admissible_arrays(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Index arrays (P, Q) of all admissible chords of an n-cycle, lexicographic order.

    Same ordering as :func:`admissible_chords`, without building Python tuples.
    """
    P, Q = np.triu_indices(n, k=2)
    keep = ~((P == 0) & (Q == n - 1))
    return P[keep].astype(np.intp), Q[keep].astype(np.intp)


def resistance_distance(cycle: WeightedCycle, p: int, q: int) -> float:
    """Resistance arclength between p and q the short way round: min(|s_p - s_q|, S - |s_p - s_q|)."""
    p = cycle.check_vertex(p)
    q = cycle.check_vertex(q)
    profile = resistance_profile(cycle)
    gap = abs(profile.s[p] - profile.s[q])
    return float(min(gap, profile.total - gap))


def near_antipodal_pairs(cycle: WeightedCycle, zeta: float) -> List[Pair]:
    """
    Admissible chords whose arcs are balanced to within zeta: |d_R(p, q) - S/2| <= zeta.

    The set is nonempty whenever zeta >= r_max.

    Args:
        cycle: The weighted cycle
        zeta: Resistance tolerance, >= 0

    Returns:
        List of (p, q) pairs in lexicographic order
    """
    if zeta < 0:
        raise InputError(f"zeta must be nonnegative, got {zeta}")
    profile = resistance_profile(cycle)
    P, Q = admissible_arrays(cycle.n)
    gap = np.abs(profile.s[P] - profile.s[Q])
    d_r = np.minimum(gap, profile.total - gap)
    keep = np.abs(d_r - profile.total / 2) <= zeta
    return [(int(p), int(q)) for p, q in zip(P[keep], Q[keep])]


def parse_pair(text: str) -> Pair:
    """Parse ``"p,q"`` into an ordered (min, max) pair."""
    parts = [t.strip() for t in str(text).split(",")]
    if len(parts) != 2:
        raise InputError(f"Expected a pair 'p,q', got {text!r}")
    try:
        p, q = int(parts[0]), int(parts[1])
    except ValueError as e:
        raise InputError(f"Invalid vertex in {text!r}") from e
    return (min(p, q), max(p, q))


def check_chord(cycle: WeightedCycle, p: int, q: int) -> Pair:
    """
    Validate that (p, q) is an admissible chord of the cycle.

    Returns:
        The pair ordered as (min, max)

    Raises:
        InputError: If an index is out of range or the vertices are equal or adjacent
    """
    p = cycle.check_vertex(p)
    q = cycle.check_vertex(q)
    if not is_admissible(cycle.n, p, q):
        raise InputError(f"({p}, {q}) is not an admissible chord of a {cycle.n}-cycle")
    return (min(p, q), max(p, q))


def expected_chord_count(n: int) -> int:
    """Number of admissible chords, n(n-3)/2 (0 below four vertices)."""
    return n * (n - 3) // 2 if n >= MIN_VERTICES else 0

