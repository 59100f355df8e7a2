#!/usr/bin/env python3
"""
Monte Carlo simulator for noisy first-order consensus

    d xi = -L xi dt + sigma dW,

restricted to the disagreement subspace (noise increments are projected with
P = I - 11^T/n). At stationarity the covariance is sigma^2 L^+ / 2, so the
coherence is H = sigma^2 K_f / (2 n^2) and E[(xi_i - xi_j)^2] = sigma^2 R_ij / 2.

Two integrators are available: Euler-Maruyama ("euler") and the exact
per-mode Ornstein-Uhlenbeck transition ("exact"). Each path draws its noise from
its own SeedSequence substream, in blocks, so results do not depend on how the
paths are scheduled.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np

from src.exceptions import ComputationError, InputError
from src.logging_utils import get_logger
from src.spectral import SpectralDecomposition, decompose_laplacian

logger = get_logger(__name__)

METHODS = ("euler", "exact")
# default burn-in, in units of the slowest relaxation time 1/lambda_1
BURN_IN_RELAXATION_TIMES = 10.0
BLOCK_STEPS = 256
# recorded states per run; the default record stride is chosen to stay under it
MAX_STATE_BYTES = 256 * 1024 * 1024
MIN_TAIL_RECORDS = 10
WIDE_CI_RTOL = 0.1


@dataclass(frozen=True)
class SimConfig:
    """
    Integration settings.

    burn_in defaults to 10 / lambda_1. record_every=None picks the smallest stride
    that keeps the recorded states within MAX_STATE_BYTES.
    """

    sigma: float = 1.0
    dt: float = 1e-3
    horizon: float = 100.0
    n_paths: int = 200
    seed: int = 0
    method: str = "euler"
    record_every: Optional[int] = None
    burn_in: Optional[float] = None

    def __post_init__(self):
        if not self.sigma >= 0 or not math.isfinite(self.sigma):
            raise InputError(f"sigma must be a finite nonnegative number, got {self.sigma}")
        if not self.dt > 0:
            raise InputError(f"dt must be positive, got {self.dt}")
        if not self.horizon > 0:
            raise InputError(f"horizon must be positive, got {self.horizon}")
        if int(self.n_paths) != self.n_paths or self.n_paths < 1:
            raise InputError(f"n_paths must be a positive integer, got {self.n_paths}")
        if self.record_every is not None and (
            int(self.record_every) != self.record_every or self.record_every < 1
        ):
            raise InputError(f"record_every must be a positive integer, got {self.record_every}")
        if self.method not in METHODS:
            raise InputError(f"Unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        if self.burn_in is not None and self.burn_in < 0:
            raise InputError(f"burn_in must be nonnegative, got {self.burn_in}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sigma": self.sigma,
            "dt": self.dt,
            "horizon": self.horizon,
            "n_paths": self.n_paths,
            "seed": self.seed,
            "method": self.method,
            "record_every": self.record_every,
            "burn_in": self.burn_in,
        }


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Recorded disagreement trajectories, states[path, record, vertex]."""

    times: np.ndarray
    states: np.ndarray
    sigma: float
    burn_in: float
    lambda1: float
    stationary_draws: bool = False
    record_every: int = 1

    @property
    def n(self) -> int:
        return int(self.states.shape[2])

    @property
    def n_paths(self) -> int:
        return int(self.states.shape[0])

    def tail(self, burn_in: Optional[float] = None) -> np.ndarray:
        """States recorded at times >= burn_in (default: the ensemble's burn-in)."""
        start = self.burn_in if burn_in is None else burn_in
        return self.states[:, self.times >= start - 1e-12, :]


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo estimate with the standard error over independent paths."""

    value: float
    stderr: float
    samples: int
    wide_ci: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "stderr": self.stderr if math.isfinite(self.stderr) else None,
            "samples": self.samples,
            "wide_ci": self.wide_ci,
        }


def _check_laplacian(laplacian: np.ndarray) -> np.ndarray:
    L = np.asarray(laplacian, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1] or L.shape[0] < 2:
        raise InputError(f"Laplacian must be a square matrix, got shape {L.shape}")
    if not np.allclose(L, L.T, rtol=0, atol=1e-12 * max(1.0, float(np.abs(L).max()))):
        raise InputError("Laplacian must be symmetric")
    return L


def _noise_block(streams: List[np.random.Generator], size: int, dim: int) -> np.ndarray:
    return np.stack([rng.standard_normal((size, dim)) for rng in streams], axis=0)


def _euler(L, X, cfg, stride, streams, states):
    n = L.shape[0]
    steps = (states.shape[1] - 1) * stride
    A = np.eye(n) - cfg.dt * L
    scale = cfg.sigma * math.sqrt(cfg.dt)
    record = 1
    step = 0
    while step < steps:
        size = min(BLOCK_STEPS, steps - step)
        if cfg.sigma > 0:
            Z = _noise_block(streams, size, n)
            Z -= Z.mean(axis=2, keepdims=True)
            Z *= scale
        for s in range(size):
            X = X @ A
            if cfg.sigma > 0:
                X = X + Z[:, s]
            step += 1
            if step % stride == 0:
                states[:, record] = X
                record += 1


def _exact(spec: SpectralDecomposition, X, cfg, stride, streams, states):
    U = spec.eigenvectors[:, 1:]
    lam = spec.eigenvalues[1:]
    h = cfg.dt * stride
    decay = np.exp(-lam * h)
    spread = cfg.sigma * np.sqrt(-np.expm1(-2.0 * lam * h) / (2.0 * lam))
    Y = X @ U
    records = states.shape[1]
    record = 1
    while record < records:
        size = min(BLOCK_STEPS, records - record)
        Z = _noise_block(streams, size, lam.size) if cfg.sigma > 0 else None
        for s in range(size):
            Y = Y * decay
            if Z is not None:
                Y = Y + spread * Z[:, s]
            states[:, record] = Y @ U.T
            record += 1


def record_stride(cfg: SimConfig, n: int) -> int:
    """
    Steps between recorded states.

    An explicit cfg.record_every is returned as is. Otherwise the stride is the
    smallest one that keeps n_paths x records x n doubles within MAX_STATE_BYTES,
    never leaving fewer than MIN_TAIL_RECORDS records when the run is long enough.
    """
    if cfg.record_every is not None:
        return int(cfg.record_every)
    steps = max(int(round(cfg.horizon / cfg.dt)), 1)
    budget = MAX_STATE_BYTES // (8 * int(cfg.n_paths) * int(n)) - 1
    max_records = max(budget, MIN_TAIL_RECORDS)
    return max(1, math.ceil(steps / max_records))


def _allocate_states(shape) -> np.ndarray:
    try:
        return np.empty(shape)
    except (MemoryError, ValueError) as e:
        size = 8.0 * float(np.prod([float(d) for d in shape]))
        raise ComputationError(
            f"Cannot hold {size / 1e9:.3g} GB of recorded states; raise record_every "
            f"or lower the path count",
            {"shape": [int(d) for d in shape]},
        ) from e


def simulate(
    laplacian: np.ndarray, cfg: SimConfig, initial: Optional[np.ndarray] = None
) -> Ensemble:
    """
    Integrate the projected consensus dynamics for cfg.n_paths independent paths.

    Args:
        laplacian: Connected graph Laplacian (cycle, with or without a chord)
        cfg: Simulation settings
        initial: Starting state, projected onto the disagreement subspace (default 0)

    Returns:
        Ensemble: Records every record_stride(cfg, n) steps, starting at t = 0

    Raises:
        InputError: If the Laplacian is malformed or, for Euler-Maruyama,
            dt * lambda_max >= 2
        ComputationError: If the Laplacian is not connected or the record
            array cannot be allocated
    """
    L = _check_laplacian(laplacian)
    n = L.shape[0]
    spec = decompose_laplacian(L)
    lam_max = float(spec.eigenvalues[-1])
    if cfg.method == "euler" and cfg.dt * lam_max >= 2.0:
        raise InputError(
            f"Euler-Maruyama is unstable: dt * lambda_max = {cfg.dt * lam_max:.6g} >= 2"
        )

    burn_in = cfg.burn_in if cfg.burn_in is not None else BURN_IN_RELAXATION_TIMES / spec.lambda1
    if cfg.horizon < BURN_IN_RELAXATION_TIMES / spec.lambda1:
        logger.warning(
            f"Horizon {cfg.horizon:.6g} is shorter than 10/lambda_1 = "
            f"{BURN_IN_RELAXATION_TIMES / spec.lambda1:.6g}; the tail may not be stationary"
        )

    x0 = np.zeros(n) if initial is None else np.asarray(initial, dtype=float).ravel()
    if x0.size != n:
        raise InputError(f"Initial state has {x0.size} entries, expected {n}")
    x0 = x0 - x0.mean()

    steps = int(round(cfg.horizon / cfg.dt))
    stride = record_stride(cfg, n)
    n_records = steps // stride + 1
    states = _allocate_states((cfg.n_paths, n_records, n))
    X = np.tile(x0, (cfg.n_paths, 1))
    states[:, 0] = X

    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(cfg.seed).spawn(cfg.n_paths)]
    logger.debug(
        f"Simulating {cfg.n_paths} paths, n={n}, {steps} steps of dt={cfg.dt:.3g} "
        f"({cfg.method}), recording every {stride}"
    )
    if cfg.method == "euler":
        _euler(L, X, cfg, stride, streams, states)
    else:
        _exact(spec, X, cfg, stride, streams, states)

    times = np.arange(n_records) * cfg.dt * stride
    return Ensemble(
        times=times,
        states=states,
        sigma=cfg.sigma,
        burn_in=burn_in,
        lambda1=spec.lambda1,
        record_every=stride,
    )


def sample_stationary(
    spec: SpectralDecomposition, sigma: float, n_samples: int, rng: np.random.Generator
) -> Ensemble:
    """
    Exact independent draws from the stationary law N(0, sigma^2 L^+ / 2).

    Each draw is stored as a one-record path so the estimators apply unchanged.
    """
    if n_samples < 1:
        raise InputError(f"n_samples must be positive, got {n_samples}")
    lam = spec.eigenvalues[1:]
    Z = rng.standard_normal((int(n_samples), lam.size))
    X = (Z * (sigma / np.sqrt(2.0 * lam))) @ spec.eigenvectors[:, 1:].T
    return Ensemble(
        times=np.zeros(1),
        states=X[:, None, :],
        sigma=float(sigma),
        burn_in=0.0,
        lambda1=spec.lambda1,
        stationary_draws=True,
    )


def _estimate(ensemble: Ensemble, samples: np.ndarray) -> Estimate:
    paths, records = samples.shape
    if records == 0:
        raise InputError("No records after the burn-in window; increase the horizon")
    if ensemble.stationary_draws:
        flat = samples.ravel()
        value = float(flat.mean())
        stderr = float(flat.std(ddof=1) / math.sqrt(flat.size)) if flat.size > 1 else math.inf
        wide = flat.size < 2
    else:
        path_means = samples.mean(axis=1)
        value = float(path_means.mean())
        stderr = float(path_means.std(ddof=1) / math.sqrt(paths)) if paths > 1 else math.inf
        wide = records < MIN_TAIL_RECORDS or paths < 2
    if not wide and value != 0 and stderr > WIDE_CI_RTOL * abs(value):
        wide = True
    if wide:
        logger.warning(
            f"Wide confidence interval: {paths} paths x {records} tail records, "
            f"stderr {stderr:.3g} on {value:.6g}"
        )
    return Estimate(value=value, stderr=stderr, samples=int(paths * records), wide_ci=wide)


def estimate_coherence(ensemble: Ensemble, burn_in: Optional[float] = None) -> Estimate:
    """
    Empirical coherence (1/n) sum_i (xi_i - mean(xi))^2 averaged over the tail window
    and all paths.

    Raises:
        InputError: If no record falls after the burn-in
    """
    tail = ensemble.tail(burn_in)
    deviation = tail - tail.mean(axis=2, keepdims=True)
    return _estimate(ensemble, (deviation**2).mean(axis=2))


def estimate_pair_variance(
    ensemble: Ensemble, i: int, j: int, burn_in: Optional[float] = None
) -> Estimate:
    """
    Stationary E[(xi_i - xi_j)^2] over the tail window.

    Raises:
        InputError: If i == j or an index is out of range
    """
    n = ensemble.n
    for v in (i, j):
        if not 0 <= int(v) < n:
            raise InputError(f"Vertex {v} out of range for n={n}")
    if i == j:
        raise InputError(f"Pair variance needs two distinct vertices, got {i} twice")
    tail = ensemble.tail(burn_in)
    return _estimate(ensemble, (tail[:, :, i] - tail[:, :, j]) ** 2)


def empirical_covariance(ensemble: Ensemble, burn_in: Optional[float] = None) -> np.ndarray:
    """Second-moment matrix of the tail states (the mean is zero by construction)."""
    tail = ensemble.tail(burn_in).reshape(-1, ensemble.n)
    if tail.shape[0] == 0:
        raise InputError("No records after the burn-in window; increase the horizon")
    return tail.T @ tail / tail.shape[0]


def coherence_prediction(kirchhoff_index: float, n: int, sigma: float) -> float:
    """H = sigma^2 K_f / (2 n^2)."""
    return sigma**2 * kirchhoff_index / (2.0 * n**2)


def pair_variance_prediction(resistance: float, sigma: float) -> float:
    """E[(xi_i - xi_j)^2] = sigma^2 R_ij / 2."""
    return sigma**2 * resistance / 2.0
