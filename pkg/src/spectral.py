#!/usr/bin/env python3
"""
Spectral machinery for weighted cycles and their one-chord augmentations.

The cycle Laplacian is decomposed once (dense symmetric eigensolver); every
chord is then scored by reading the modal jumps beta_k = u_{k,p} - u_{k,q}
and solving the secular equation

    1/w + sum_k beta_k^2 / (lambda_k - mu) = 0

for its smallest root in (lambda_1, lambda_2]. The root finder works on many
chords at once so that exhaustive scoring of all n(n-3)/2 chords stays cheap.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from src.cycle_core import WeightedCycle, is_admissible, resistance_profile
from src.exceptions import ComputationError, InputError
from src.logging_utils import get_logger

logger = get_logger(__name__)

# beta_k^2 below this fraction of the row maximum is treated as an exact zero
DEFLATION_RTOL = 1e-24
# lambda_2 - lambda_1 below this fraction of lambda_max counts as a double eigenvalue
DEGENERACY_RTOL = 1e-10
# absolute bisection width, as a fraction of lambda_2
BISECTION_RTOL = 1e-12
NEWTON_STEPS = 6
ZERO_EIGENVALUE_RTOL = 1e-9
CHUNK_ROWS = 8192


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """
    Full eigendecomposition of a connected graph Laplacian.

    eigenvalues are ascending with eigenvalues[0] == 0, eigenvectors[:, k] is the
    unit eigenvector u_k (column 0 is exactly 1/sqrt(n)). G is the Moore-Penrose
    pseudoinverse and M = G @ G.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    G: np.ndarray
    M: np.ndarray

    @property
    def n(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def lambda1(self) -> float:
        return float(self.eigenvalues[1])

    @property
    def lambda2(self) -> float:
        return float(self.eigenvalues[2]) if self.n > 2 else math.inf

    @property
    def gap(self) -> float:
        """Interlacing ceiling gamma = lambda_2 - lambda_1."""
        return self.lambda2 - self.lambda1

    @property
    def is_degenerate(self) -> bool:
        """Whether lambda_1 is (numerically) a double eigenvalue."""
        return self.gap <= DEGENERACY_RTOL * float(self.eigenvalues[-1])

    @property
    def fiedler(self) -> np.ndarray:
        return self.eigenvectors[:, 1]

    def kirchhoff_index(self) -> float:
        """K_f = n * sum_{k>=1} 1/lambda_k."""
        return float(self.n * np.sum(1.0 / self.eigenvalues[1:]))

    def resistance(self, p: int, q: int) -> float:
        """Effective resistance b^T G b between p and q."""
        G = self.G
        return float(G[p, p] + G[q, q] - 2.0 * G[p, q])

    def to_dict(self, head: int = 5) -> Dict[str, Any]:
        """Debug dump of the lowest eigenvalues."""
        return {
            "n": self.n,
            "eigenvalues_head": [float(v) for v in self.eigenvalues[: head + 1]],
            "lambda_max": float(self.eigenvalues[-1]),
            "gap": self.gap,
            "degenerate": self.is_degenerate,
        }


@dataclass(frozen=True, eq=False)
class ModeJumps:
    """Modal jumps beta_k(p, q) for k = 1..n-1 and the tail beyond the first two modes."""

    beta: np.ndarray  # beta[k - 1] pairs with eigenvalues[k]
    t3plus: float
    resistance: float  # sum_k beta_k^2 / lambda_k


@dataclass(frozen=True)
class FiedlerFit:
    """Sinusoid fit of the first two modes in resistance arclength."""

    phase: float
    sign: int
    sup_error: float
    scaled_error: float  # sqrt(n) * sup_error
    cosine_sign: int
    cosine_sup_error: float
    degenerate: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "phase": self.phase,
            "sign": self.sign,
            "sup_error": self.sup_error,
            "scaled_error": self.scaled_error,
            "cosine_sign": self.cosine_sign,
            "cosine_sup_error": self.cosine_sup_error,
            "degenerate": self.degenerate,
        }


def laplacian(
    cycle: WeightedCycle, chord: Optional[Tuple[int, int, float]] = None
) -> np.ndarray:
    """
    Dense Laplacian L = D - A of the cycle, optionally plus a chord w b b^T.

    Args:
        cycle: The weighted cycle
        chord: Optional (p, q, w) chord to add

    Returns:
        np.ndarray: n x n symmetric Laplacian
    """
    n = cycle.n
    c = cycle.conductances
    i = np.arange(n)
    j = (i + 1) % n
    L = np.zeros((n, n))
    np.add.at(L, (i, i), c)
    np.add.at(L, (j, j), c)
    L[i, j] -= c
    L[j, i] -= c
    if chord is not None:
        p, q, w = chord
        L[p, p] += w
        L[q, q] += w
        L[p, q] -= w
        L[q, p] -= w
    return L


def decompose(cycle: WeightedCycle) -> SpectralDecomposition:
    """
    Dense symmetric eigendecomposition of the cycle Laplacian plus G = L^+ and M = G^2.

    Args:
        cycle: The weighted cycle

    Returns:
        SpectralDecomposition: Shared, read-only spectral data for chord scoring

    Raises:
        ComputationError: If the eigensolver fails or the spectrum is not that
            of a connected Laplacian
    """
    return decompose_laplacian(laplacian(cycle))


def decompose_laplacian(L: np.ndarray) -> SpectralDecomposition:
    """
    Decompose an arbitrary connected Laplacian (used for augmented graphs too).

    Raises:
        ComputationError: On eigensolver failure or a disconnected spectrum
    """
    n = L.shape[0]
    try:
        eigenvalues, eigenvectors = scipy.linalg.eigh(L)
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise ComputationError("Dense eigensolver did not converge", {"n": n}) from e

    lam_max = float(eigenvalues[-1])
    if abs(eigenvalues[0]) > ZERO_EIGENVALUE_RTOL * lam_max:
        raise ComputationError(
            "Smallest Laplacian eigenvalue is not zero",
            {"lambda_0": float(eigenvalues[0]), "lambda_max": lam_max},
        )
    if eigenvalues[1] <= ZERO_EIGENVALUE_RTOL * lam_max:
        raise ComputationError(
            "Graph is not connected (lambda_1 is zero)",
            {"lambda_1": float(eigenvalues[1]), "lambda_max": lam_max},
        )

    eigenvalues = eigenvalues.copy()
    eigenvalues[0] = 0.0
    eigenvectors = eigenvectors.copy()
    eigenvectors[:, 0] = 1.0 / math.sqrt(n)

    U = eigenvectors[:, 1:]
    inv = 1.0 / eigenvalues[1:]
    G = (U * inv) @ U.T
    M = (U * inv**2) @ U.T
    G = 0.5 * (G + G.T)
    M = 0.5 * (M + M.T)

    for arr in (eigenvalues, eigenvectors, G, M):
        arr.setflags(write=False)

    logger.debug(
        f"Decomposed Laplacian n={n}: lambda_1={eigenvalues[1]:.6g}, "
        f"lambda_2={eigenvalues[2] if n > 2 else float('nan'):.6g}, lambda_max={lam_max:.6g}"
    )
    return SpectralDecomposition(eigenvalues, eigenvectors, G, M)


def mode_differences(
    spec: SpectralDecomposition, P: np.ndarray, Q: np.ndarray, modes: Optional[int] = None
) -> np.ndarray:
    """
    Modal jumps for many chords at once.

    Args:
        spec: Spectral decomposition
        P, Q: Endpoint index arrays of equal length
        modes: Number of leading nontrivial modes (default: all n-1)

    Returns:
        np.ndarray: shape (len(P), modes), entry [c, k-1] = u_{k,P[c]} - u_{k,Q[c]}
    """
    K = spec.n - 1 if modes is None else modes
    U = spec.eigenvectors[:, 1 : K + 1]
    return U[np.asarray(P)] - U[np.asarray(Q)]


def check_pair(spec: SpectralDecomposition, p: int, q: int) -> Tuple[int, int]:
    """Validate that {p, q} is an admissible chord of the decomposed cycle."""
    n = spec.n
    for v in (p, q):
        if isinstance(v, bool) or int(v) != v or not 0 <= int(v) < n:
            raise InputError(f"Vertex {v} out of range for n={n}")
    if not is_admissible(n, p, q):
        raise InputError(f"({p}, {q}) is not an admissible chord of a {n}-cycle")
    return int(p), int(q)


def check_weight(w: float) -> float:
    """Validate a chord conductance (finite, >= 0)."""
    w = float(w)
    if not w >= 0 or not math.isfinite(w):
        raise InputError(f"Chord conductance must be a finite nonnegative number, got {w}")
    return w


def _secular_roots(
    poles: np.ndarray, weights: np.ndarray, w: float, ceiling: float, tol: float
) -> np.ndarray:
    """
    Smallest root offsets x of 1/w + sum_k weights_k / (poles_k - x) = 0.

    poles are shifted so that poles[0] == 0 and are ascending; weights has one
    row per chord. The root lies in (0, min(ceiling, w * weights[:, 0])]; rows
    with a zero first weight return 0 because lambda_1 persists.
    """
    rows = weights.shape[0]
    x_out = np.zeros(rows)
    first = weights[:, 0]
    active = np.nonzero(first > 0)[0]
    if active.size == 0:
        return x_out
    if poles.size == 1:
        x_out[active] = w * first[active]
        return x_out

    W = weights[active]
    inv_w = 1.0 / w
    lo = np.zeros(active.size)
    hi = np.minimum(w * W[:, 0], ceiling)

    def secular(x: np.ndarray, derivative: bool = False):
        diff = poles[None, :] - x[:, None]
        terms = W / diff
        g = inv_w + terms.sum(axis=1)
        if not derivative:
            return g, None
        return g, (terms / diff).sum(axis=1)

    width = float(hi.max())
    iterations = int(np.clip(math.ceil(math.log2(max(width / tol, 1.0))) + 1, 1, 200))
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        g, _ = secular(mid)
        below = g < 0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)

    x = 0.5 * (lo + hi)
    for _ in range(NEWTON_STEPS):
        g, dg = secular(x, derivative=True)
        below = g < 0
        lo = np.where(below, x, lo)
        hi = np.where(below, hi, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = x - g / dg
        inside = (step > lo) & (step < hi)
        x = np.where(inside, step, 0.5 * (lo + hi))

    x_out[active] = x
    return x_out


def _gains(
    spec: SpectralDecomposition, P: np.ndarray, Q: np.ndarray, w: float, modes: int
) -> np.ndarray:
    P = np.atleast_1d(np.asarray(P, dtype=np.intp))
    Q = np.atleast_1d(np.asarray(Q, dtype=np.intp))
    out = np.zeros(P.size)
    if w == 0 or P.size == 0:
        return out
    if modes >= 2 and spec.is_degenerate:
        logger.debug("lambda_1 is a double eigenvalue; every chord gain is zero")
        return out

    lam = spec.eigenvalues[1 : modes + 1]
    poles = lam - lam[0]
    ceiling = float(poles[1]) if modes >= 2 else math.inf
    tol = BISECTION_RTOL * float(spec.eigenvalues[min(2, spec.n - 1)])

    for start in range(0, P.size, CHUNK_ROWS):
        stop = start + CHUNK_ROWS
        beta = mode_differences(spec, P[start:stop], Q[start:stop], modes)
        weights = beta**2
        row_max = weights.max(axis=1, keepdims=True)
        weights = np.where(weights <= DEFLATION_RTOL * row_max, 0.0, weights)
        out[start:stop] = _secular_roots(poles, weights, w, ceiling, tol)
    return out


def exact_gains(
    spec: SpectralDecomposition, P: Sequence[int], Q: Sequence[int], w: float
) -> np.ndarray:
    """
    Exact algebraic-connectivity gains lambda_1(L + w b b^T) - lambda_1(L) for many chords.

    Args:
        spec: Spectral decomposition of the base cycle
        P, Q: Endpoint arrays (admissibility is the caller's responsibility)
        w: Chord conductance, >= 0

    Returns:
        np.ndarray: Gains in [0, lambda_2 - lambda_1]
    """
    return _gains(spec, np.asarray(P), np.asarray(Q), check_weight(w), spec.n - 1)


def lowfreq_gains(
    spec: SpectralDecomposition, P: Sequence[int], Q: Sequence[int], w: float, m: int
) -> np.ndarray:
    """Low-frequency gains restricted to the first m nontrivial modes, for many chords."""
    if not 1 <= int(m) <= spec.n - 1:
        raise InputError(f"Mode count m must lie in [1, {spec.n - 1}], got {m}")
    return _gains(spec, np.asarray(P), np.asarray(Q), check_weight(w), int(m))


def exact_gain(spec: SpectralDecomposition, p: int, q: int, w: float) -> float:
    """
    Algebraic-connectivity gain Delta_{p,q}(w) of a single chord.

    Raises:
        InputError: If w < 0 or {p, q} is not admissible
    """
    p, q = check_pair(spec, p, q)
    return float(exact_gains(spec, [p], [q], w)[0])


def lambda1_updated(spec: SpectralDecomposition, p: int, q: int, w: float) -> float:
    """
    Algebraic connectivity of L + w b b^T with b = e_p - e_q.

    Modes orthogonal to b are deflated and keep their eigenvalue; the remaining
    smallest eigenvalue is the secular root bracketed by interlacing, so
    lambda_1(L) <= result <= lambda_2(L).

    Args:
        spec: Spectral decomposition of the base cycle
        p, q: Admissible chord endpoints
        w: Chord conductance, >= 0

    Returns:
        float: Updated lambda_1

    Raises:
        InputError: If w < 0 or the chord is not admissible
    """
    return spec.lambda1 + exact_gain(spec, p, q, w)


def lowfreq_gain(spec: SpectralDecomposition, p: int, q: int, w: float, m: int) -> float:
    """
    lambda_min(diag(lambda_1..lambda_m) + w a a^T) - lambda_1 with a_k = u_{k,p} - u_{k,q}.

    Raises:
        InputError: If m is outside [1, n-1], w < 0 or the chord is not admissible
    """
    p, q = check_pair(spec, p, q)
    return float(lowfreq_gains(spec, [p], [q], w, m)[0])


def mode_jumps(spec: SpectralDecomposition, p: int, q: int) -> ModeJumps:
    """
    Modal jumps of a chord and the higher-mode tail T_3+ = sum_{k>=3} beta_k^2 / lambda_k.

    Raises:
        InputError: If the chord is not admissible
    """
    p, q = check_pair(spec, p, q)
    beta = spec.eigenvectors[p, 1:] - spec.eigenvectors[q, 1:]
    lam = spec.eigenvalues[1:]
    contributions = beta**2 / lam
    return ModeJumps(
        beta=beta,
        t3plus=float(contributions[2:].sum()),
        resistance=float(contributions.sum()),
    )


def fiedler_mode_fit(spec: SpectralDecomposition, cycle: WeightedCycle) -> FiedlerFit:
    """
    Fit u_1 to sign * sqrt(2/n) * sin(2 pi s_i / S + phase) and u_2 to the matching cosine.

    The phase maximizes the overlap with u_1 (least squares at fixed amplitude);
    it is reported in [0, pi) with the sign carrying the remaining half turn.
    The cosine fit reuses the same phase. When lambda_1 is double the fit is
    still computed but the report is flagged degenerate.

    Args:
        spec: Spectral decomposition of the cycle
        cycle: The same cycle (for its resistance arclength)

    Returns:
        FiedlerFit: phase, sign and sup-norm residuals of both fits
    """
    n = spec.n
    profile = resistance_profile(cycle)
    theta = 2.0 * math.pi * profile.s[:-1] / profile.total
    amplitude = math.sqrt(2.0 / n)

    u1 = spec.eigenvectors[:, 1]
    phase = math.atan2(float(u1 @ np.cos(theta)), float(u1 @ np.sin(theta))) % (2 * math.pi)
    sign = 1
    if phase >= math.pi:
        phase -= math.pi
        sign = -1
    sup_error = float(np.max(np.abs(u1 - sign * amplitude * np.sin(theta + phase))))

    cosine = amplitude * np.cos(theta + phase)
    u2 = spec.eigenvectors[:, 2]
    cosine_sign = 1 if float(u2 @ cosine) >= 0 else -1
    cosine_error = float(np.max(np.abs(u2 - cosine_sign * cosine)))

    degenerate = spec.is_degenerate
    if degenerate:
        logger.debug("Fiedler fit on a double lambda_1: eigenvector basis is arbitrary")
    fit = FiedlerFit(
        phase=phase,
        sign=sign,
        sup_error=sup_error,
        scaled_error=math.sqrt(n) * sup_error,
        cosine_sign=cosine_sign,
        cosine_sup_error=cosine_error,
        degenerate=degenerate,
    )
    return fit


def constrained_limit(cycle: WeightedCycle, p: int, q: int) -> float:
    """
    min x^T L x over unit x orthogonal to 1 with x_p = x_q: the infinite-conductance limit.

    Vertices p and q are merged (x = K y); the constrained problem becomes the
    generalized eigenproblem (K^T L K) y = mu (K^T K) y, whose second eigenvalue
    is the answer.
    """
    n = cycle.n
    p, q = cycle.check_vertex(p), cycle.check_vertex(q)
    keep = [v for v in range(n) if v != q]
    column = {v: k for k, v in enumerate(keep)}
    K = np.zeros((n, n - 1))
    for v in range(n):
        K[v, column[p if v == q else v]] = 1.0
    L = laplacian(cycle)
    try:
        values = scipy.linalg.eigh(K.T @ L @ K, K.T @ K, eigvals_only=True)
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise ComputationError("Generalized eigensolver failed", {"p": p, "q": q}) from e
    return float(values[1])
