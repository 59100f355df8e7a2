#!/usr/bin/env python3
"""
Exact rank-one update formulas for a single chord w (e_p - e_q)(e_p - e_q)^T.

Resistances and the Kirchhoff index follow from Sherman-Morrison applied to
the pseudoinverse G: with R = b^T G b and Q = b^T G^2 b,

    R_pq(w) = R / (1 + w R)
    K_f(L) - K_f(L + w b b^T) = w n Q / (1 + w R)

so every chord is scored from four entries of G and four entries of M = G^2.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence

import numpy as np

from src.exceptions import InputError
from src.logging_utils import get_logger
from src.spectral import (
    SpectralDecomposition,
    check_pair,
    check_weight,
    exact_gain,
    lowfreq_gain,
    mode_jumps,
)

logger = get_logger(__name__)

DEFAULT_MODES = 12
DEFAULT_THETA0 = 0.5


@dataclass(frozen=True)
class ChordCandidate:
    """An admissible chord {p, q} (stored with p < q) carrying conductance w >= 0."""

    p: int
    q: int
    w: float

    def __post_init__(self):
        p, q = int(self.p), int(self.q)
        if p == q:
            raise InputError(f"A chord needs two distinct endpoints, got {p} twice")
        object.__setattr__(self, "p", min(p, q))
        object.__setattr__(self, "q", max(p, q))
        object.__setattr__(self, "w", check_weight(self.w))

    @property
    def pair(self):
        return (self.p, self.q)


@dataclass(frozen=True)
class ChordScore:
    """Exact and approximate objective values of one chord."""

    p: int
    q: int
    w: float
    delta_exact: float
    delta_lowfreq: float
    modes: int
    improvement: float
    r_endpoint: float
    r_endpoint_updated: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p": self.p,
            "q": self.q,
            "w": self.w,
            "delta_exact": self.delta_exact,
            "delta_lowfreq": self.delta_lowfreq,
            "modes": self.modes,
            "improvement": self.improvement,
            "r_endpoint": self.r_endpoint,
            "r_endpoint_updated": self.r_endpoint_updated,
        }


@dataclass(frozen=True)
class CeilingDeficitReport:
    """
    How far a chord's gain falls short of the interlacing ceiling gamma, next to
    the two-mode comparison bound gamma * eps / (1 - theta0).

    bound_rhs is None unless the comparison hypotheses were verified for the
    supplied (theta0, rho0); bound_satisfied is None in that case too.
    """

    gamma: float
    gain: float
    deficit: float
    beta1sq: float
    beta2sq: float
    eps: float
    t3plus: float
    theta0: float
    rho0: float
    hypotheses_hold: bool
    bound_rhs: Optional[float]
    bound_satisfied: Optional[bool]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gamma": self.gamma,
            "gain": self.gain,
            "deficit": self.deficit,
            "beta1sq": self.beta1sq,
            "beta2sq": self.beta2sq,
            "eps": self.eps if math.isfinite(self.eps) else None,
            "eps_infinite": not math.isfinite(self.eps),
            "t3plus": self.t3plus,
            "theta0": self.theta0,
            "rho0": self.rho0,
            "hypotheses_hold": self.hypotheses_hold,
            "bound_rhs": self.bound_rhs,
            "bound_satisfied": self.bound_satisfied,
        }


def _endpoint_quantities(spec: SpectralDecomposition, chord: ChordCandidate):
    p, q = check_pair(spec, chord.p, chord.q)
    G, M = spec.G, spec.M
    R = float(G[p, p] + G[q, q] - 2.0 * G[p, q])
    Q = float(M[p, p] + M[q, q] - 2.0 * M[p, q])
    return R, Q


def endpoint_resistance_updated(spec: SpectralDecomposition, chord: ChordCandidate) -> float:
    """
    Effective resistance between the chord endpoints after adding the chord.

    Args:
        spec: Spectral decomposition of the base cycle
        chord: Admissible chord

    Returns:
        float: R_pq / (1 + w R_pq)
    """
    R, _ = _endpoint_quantities(spec, chord)
    return R / (1.0 + chord.w * R)


def pairwise_resistance_updated(
    spec: SpectralDecomposition, chord: ChordCandidate, u: int, v: int
) -> float:
    """
    Effective resistance between any two vertices after adding the chord.

    R_uv(w) = R_uv - w/(4(1 + w R_pq)) * (R_uq + R_vp - R_up - R_vq)^2, where the
    bracket equals 2 (e_u - e_v)^T G b.

    Raises:
        InputError: If u == v or an index is out of range
    """
    n = spec.n
    for x in (u, v):
        if isinstance(x, bool) or int(x) != x or not 0 <= int(x) < n:
            raise InputError(f"Vertex {x} out of range for n={n}")
    if u == v:
        raise InputError(f"pairwise_resistance_updated needs two distinct vertices, got {u} twice")
    R_pq, _ = _endpoint_quantities(spec, chord)
    G = spec.G
    p, q = chord.p, chord.q
    cross = float(G[u, p] - G[u, q] - G[v, p] + G[v, q])
    return spec.resistance(u, v) - chord.w * cross**2 / (1.0 + chord.w * R_pq)


def kirchhoff_improvement(spec: SpectralDecomposition, chord: ChordCandidate) -> float:
    """
    Exact Kirchhoff-index decrease K_f(L) - K_f(L + w b b^T) = w n Q / (1 + w R).

    Args:
        spec: Spectral decomposition of the base cycle
        chord: Admissible chord

    Returns:
        float: The improvement (0 when w == 0)
    """
    R, Q = _endpoint_quantities(spec, chord)
    w = chord.w
    return w * spec.n * Q / (1.0 + w * R)


def kirchhoff_improvements(
    spec: SpectralDecomposition, P: Sequence[int], Q: Sequence[int], w: float
) -> np.ndarray:
    """Fast-form Kirchhoff improvements for many chords; admissibility is not re-checked."""
    w = check_weight(w)
    P = np.asarray(P, dtype=np.intp)
    Q = np.asarray(Q, dtype=np.intp)
    G, M = spec.G, spec.M
    R = G[P, P] + G[Q, Q] - 2.0 * G[P, Q]
    Qe = M[P, P] + M[Q, Q] - 2.0 * M[P, Q]
    return w * spec.n * Qe / (1.0 + w * R)


def square_sum(spec: SpectralDecomposition, chord: ChordCandidate) -> float:
    """sum_{u<v} (R_uq + R_vp - R_up - R_vq)^2, which equals 4 n Q_e."""
    _, Q = _endpoint_quantities(spec, chord)
    return 4.0 * spec.n * Q


def kirchhoff_improvement_pairsum(spec: SpectralDecomposition, chord: ChordCandidate) -> float:
    """
    Kirchhoff improvement as an explicit sum over all vertex pairs.

    O(n^2) reference form of :func:`kirchhoff_improvement`.
    """
    R_pq, _ = _endpoint_quantities(spec, chord)
    G = spec.G
    diag = np.diag(G)
    R = diag[:, None] + diag[None, :] - 2.0 * G
    p, q = chord.p, chord.q
    bracket = R[:, q][:, None] + R[:, p][None, :] - R[:, p][:, None] - R[:, q][None, :]
    iu = np.triu_indices(spec.n, k=1)
    total = float(np.sum(bracket[iu] ** 2))
    return chord.w * total / (4.0 * (1.0 + chord.w * R_pq))


def saturate_budget(budget: float) -> float:
    """
    Chord weight for a conductance budget: always the full budget.

    Every objective is nondecreasing in w, so Pareto-efficient chords use all of it.

    Raises:
        InputError: If the budget is negative or not finite
    """
    budget = float(budget)
    if not budget >= 0 or not math.isfinite(budget):
        raise InputError(f"Budget must be a finite nonnegative number, got {budget}")
    return budget


def score_chord(
    spec: SpectralDecomposition, chord: ChordCandidate, m: int = DEFAULT_MODES
) -> ChordScore:
    """
    Collect every objective of one chord.

    m is clipped to n-1 on small cycles.

    Args:
        spec: Spectral decomposition of the base cycle
        chord: Admissible chord
        m: Low-frequency mode count

    Returns:
        ChordScore: Exact and low-frequency gains, Kirchhoff improvement and
            endpoint resistances before/after
    """
    if m < 1:
        raise InputError(f"Mode count m must be >= 1, got {m}")
    modes = min(int(m), spec.n - 1)
    if modes != m:
        logger.debug(f"Clipping mode count {m} to n-1={modes}")
    R, Q = _endpoint_quantities(spec, chord)
    w = chord.w
    return ChordScore(
        p=chord.p,
        q=chord.q,
        w=w,
        delta_exact=exact_gain(spec, chord.p, chord.q, w),
        delta_lowfreq=lowfreq_gain(spec, chord.p, chord.q, w, modes),
        modes=modes,
        improvement=w * spec.n * Q / (1.0 + w * R),
        r_endpoint=R,
        r_endpoint_updated=R / (1.0 + w * R),
    )


def ceiling_deficit_report(
    spec: SpectralDecomposition,
    chord: ChordCandidate,
    theta0: float = DEFAULT_THETA0,
    rho0: Optional[float] = None,
) -> CeilingDeficitReport:
    """
    Compare a chord's realized ceiling deficit with the two-mode comparison bound.

    The hypotheses checked are lambda_2 <= rho0 * lambda_3 and
    gamma * (1/w + T_3+/(1 - rho0)) <= theta0 * beta_1^2. Only when both hold is
    the bound gamma * eps / (1 - theta0), eps = beta_2^2 / beta_1^2, reported and
    compared with the deficit.

    Args:
        spec: Spectral decomposition of the base cycle
        chord: Admissible chord
        theta0: Dominance constant in (0, 1)
        rho0: Spectral-gap ratio in (0, 1); defaults to lambda_2 / lambda_3

    Returns:
        CeilingDeficitReport

    Raises:
        InputError: If lambda_1 is not simple or theta0/rho0 are outside (0, 1)
    """
    if spec.is_degenerate:
        raise InputError("Ceiling deficit needs a simple lambda_1 (lambda_1 < lambda_2)")
    if not 0 < theta0 < 1:
        raise InputError(f"theta0 must lie in (0, 1), got {theta0}")

    lam = spec.eigenvalues
    lambda3 = float(lam[3]) if spec.n > 3 else math.inf
    if rho0 is None:
        rho0 = spec.lambda2 / lambda3
    elif not 0 < rho0 < 1:
        raise InputError(f"rho0 must lie in (0, 1), got {rho0}")

    jumps = mode_jumps(spec, chord.p, chord.q)
    beta1sq = float(jumps.beta[0] ** 2)
    beta2sq = float(jumps.beta[1] ** 2) if jumps.beta.size > 1 else 0.0
    gamma = spec.gap
    gain = exact_gain(spec, chord.p, chord.q, chord.w)
    deficit = max(gamma - gain, 0.0)
    eps = beta2sq / beta1sq if beta1sq > 0 else math.inf

    hypotheses = (
        beta1sq > 0
        and chord.w > 0
        and rho0 < 1
        and spec.lambda2 <= rho0 * lambda3 * (1 + 1e-12)
        and gamma * (1.0 / chord.w + jumps.t3plus / (1.0 - rho0)) <= theta0 * beta1sq
    )
    bound_rhs = gamma * eps / (1.0 - theta0) if hypotheses else None
    satisfied = None
    if bound_rhs is not None:
        satisfied = deficit <= bound_rhs + 1e-10 * max(gamma, 1.0)
        if not satisfied:
            logger.warning(
                f"Ceiling deficit {deficit:.6g} exceeds the comparison bound {bound_rhs:.6g} "
                f"for chord ({chord.p}, {chord.q})"
            )
    return CeilingDeficitReport(
        gamma=gamma,
        gain=gain,
        deficit=deficit,
        beta1sq=beta1sq,
        beta2sq=beta2sq,
        eps=eps,
        t3plus=jumps.t3plus,
        theta0=float(theta0),
        rho0=float(rho0),
        hypotheses_hold=bool(hypotheses),
        bound_rhs=bound_rhs,
        bound_satisfied=satisfied,
    )
