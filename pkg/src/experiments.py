#!/usr/bin/env python3
"""
Seeded Monte Carlo campaigns over random weighted cycles.

Trial t of a campaign with master seed s draws everything from
numpy.random.default_rng(SeedSequence(s, spawn_key=(t,))): the conductances
first, then the random baseline. Trials are independent and may run in worker
processes; reports are always put back in trial order before aggregation, so
artifacts do not depend on the worker count.
"""

import math
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.chord_update import kirchhoff_improvements, saturate_budget
from src.cycle_core import WeightedCycle, admissible_arrays, discrepancy
from src.exceptions import InputError
from src.logging_utils import get_logger
from src.pareto import (
    ParetoFront,
    evaluate_objectives,
    extract_front,
    normalize,
    pareto_report,
    pearson_correlation,
)
from src.screening import (
    CandidateSet,
    antipodal_selection,
    exhaustive_candidates,
    fiedler_baseline,
    ScreenConfig,
    random_baseline,
    select_best,
)
from src.spectral import decompose, exact_gains, fiedler_mode_fit, lowfreq_gains

logger = get_logger(__name__)

MODES = ("gain_screening", "correlation", "pareto", "discrepancy")
STRATEGIES = ("random", "fiedler", "rbaps", "aw_rbaps", "antipodal", "exhaustive")
BUDGET_RULES = ("range_upper", "max_conductance")
SWEEP_FIELDS = ("n", "conductance_hi")

Screener = Callable[[WeightedCycle], CandidateSet]


@dataclass(frozen=True)
class CampaignConfig:
    """Campaign settings; mirrors the campaign JSON file field for field."""

    n: int = 200
    conductance_lo: float = 1.0
    conductance_hi: float = 100.0
    budget_rule: Union[str, float] = "range_upper"
    tau: float = 0.1
    m: int = 12
    trials: int = 100
    master_seed: Optional[int] = None
    strategies: Tuple[str, ...] = ("random", "fiedler", "rbaps", "aw_rbaps")
    mode: str = "gain_screening"
    batches: int = 4
    sizes: Tuple[int, ...] = (100, 400, 1600)
    sweep: Optional[Dict[str, Any]] = field(default=None, hash=False, compare=False)
    save_fronts: bool = False
    workers: Optional[int] = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 4:
            raise InputError(f"n must be an integer >= 4, got {self.n}")
        lo, hi = self.conductance_lo, self.conductance_hi
        if not (0 < lo <= hi) or not math.isfinite(hi):
            raise InputError(f"Conductance range needs 0 < lo <= hi < inf, got [{lo}, {hi}]")
        if isinstance(self.budget_rule, str):
            if self.budget_rule not in BUDGET_RULES:
                raise InputError(
                    f"Unknown budget_rule {self.budget_rule!r}; use one of "
                    f"{', '.join(BUDGET_RULES)} or a number"
                )
        else:
            saturate_budget(self.budget_rule)
        self.screening  # validates tau and m
        if int(self.trials) != self.trials or self.trials < 1:
            raise InputError(f"trials must be a positive integer, got {self.trials}")
        if self.mode not in MODES:
            raise InputError(f"Unknown mode {self.mode!r}; choose from {', '.join(MODES)}")
        unknown = [s for s in self.strategies if s not in STRATEGIES]
        if unknown or not self.strategies:
            raise InputError(
                f"Unknown or empty strategies {unknown or list(self.strategies)}; "
                f"choose from {', '.join(STRATEGIES)}"
            )
        if int(self.batches) != self.batches or not 1 <= self.batches <= self.trials:
            raise InputError(f"batches must lie in [1, trials], got {self.batches}")
        if any(int(s) != s or s < 4 for s in self.sizes) or not self.sizes:
            raise InputError(f"sizes must be integers >= 4, got {list(self.sizes)}")
        if self.sweep is not None:
            if set(self.sweep) != {"field", "values"} or self.sweep["field"] not in SWEEP_FIELDS:
                raise InputError(
                    f"sweep must be {{'field': one of {', '.join(SWEEP_FIELDS)}, 'values': [...]}}"
                )
            if not self.sweep["values"]:
                raise InputError("sweep values must not be empty")
        if self.workers is not None and self.workers < 1:
            raise InputError(f"workers must be >= 1, got {self.workers}")

    @property
    def screening(self) -> ScreenConfig:
        """AW-RBAPS tolerance and mode count as screening settings (validates both)."""
        return ScreenConfig(tau=self.tau, m=self.m)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CampaignConfig":
        """
        Build a config from its JSON object; unknown keys are rejected.

        Raises:
            InputError: On unknown keys or invalid values
        """
        if not isinstance(data, dict):
            raise InputError("Campaign config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(data) - known)
        if unknown:
            raise InputError(f"Unknown campaign config keys: {', '.join(unknown)}")
        values = dict(data)
        for key in ("strategies", "sizes"):
            if key in values:
                values[key] = tuple(values[key])
        try:
            return cls(**values)
        except TypeError as e:
            raise InputError(f"Invalid campaign config: {e}") from e

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["strategies"] = list(self.strategies)
        data["sizes"] = list(self.sizes)
        return data

    def budget(self, cycle: WeightedCycle) -> float:
        """Chord weight for one instance under the configured budget rule."""
        if self.budget_rule == "range_upper":
            return saturate_budget(self.conductance_hi)
        if self.budget_rule == "max_conductance":
            return saturate_budget(float(cycle.conductances.max()))
        return saturate_budget(float(self.budget_rule))


@dataclass
class TrialReport:
    """Per-instance results: CSV rows plus the metrics used for aggregation."""

    trial: int
    rows: List[Dict[str, Any]]
    metrics: Dict[str, Any] = field(default_factory=dict)
    fronts: Optional[Dict[str, Any]] = None


@dataclass
class CampaignResult:
    """Ordered trial reports and the aggregate summary of one campaign."""

    config: CampaignConfig
    reports: List[TrialReport]
    summary: Dict[str, Any]

    def rows(self) -> List[Dict[str, Any]]:
        return [row for report in self.reports for row in report.rows]


def trial_stream(master_seed: int, index: int) -> np.random.Generator:
    """Independent generator for trial ``index`` of a campaign."""
    return np.random.default_rng(np.random.SeedSequence(int(master_seed), spawn_key=(int(index),)))


def generate_instance(n: int, lo: float, hi: float, rng: np.random.Generator) -> WeightedCycle:
    """
    Cycle with i.i.d. conductances uniform on [lo, hi].

    Raises:
        InputError: Unless 0 < lo <= hi < inf
    """
    if not (0 < lo <= hi) or not math.isfinite(hi):
        raise InputError(f"Conductance range needs 0 < lo <= hi < inf, got [{lo}, {hi}]")
    return WeightedCycle(rng.uniform(lo, hi, int(n)))


def describe(values: Sequence[float]) -> Dict[str, Any]:
    """mean / sd / median / min / max / count of a sample; None entries are skipped."""
    data = np.asarray([v for v in values if v is not None and math.isfinite(v)], dtype=float)
    if data.size == 0:
        return {"mean": None, "sd": None, "median": None, "min": None, "max": None, "count": 0}
    return {
        "mean": float(data.mean()),
        "sd": float(data.std(ddof=1)) if data.size > 1 else 0.0,
        "median": float(np.median(data)),
        "min": float(data.min()),
        "max": float(data.max()),
        "count": int(data.size),
    }


def _fraction(flags: Sequence[bool]) -> Optional[float]:
    return sum(1 for f in flags if f) / len(flags) if flags else None


# --- per-trial work -------------------------------------------------------


def _gain_trial(cfg: CampaignConfig, index: int, screener: Optional[Screener]) -> TrialReport:
    rng = trial_stream(cfg.master_seed, index)
    cycle = generate_instance(cfg.n, cfg.conductance_lo, cfg.conductance_hi, rng)
    w = cfg.budget(cycle)
    spec = decompose(cycle)
    settings = cfg.screening
    m = settings.modes(cycle.n)

    P, Q = admissible_arrays(cycle.n)
    values = lowfreq_gains(spec, P, Q, w, m)
    best = float(values.max())
    table = np.full((cycle.n, cycle.n), -np.inf)
    table[P, Q] = values

    def score(p: int, q: int) -> float:
        return table[p, q]

    rows = []
    thetas = {}
    for strategy in cfg.strategies:
        candidates = None
        if strategy == "random":
            chord = random_baseline(cycle, rng)
        elif strategy == "fiedler":
            chord = fiedler_baseline(spec, cycle)
        elif strategy == "antipodal":
            chord = antipodal_selection(spec, cycle)
        elif strategy == "exhaustive":
            candidates = exhaustive_candidates(cycle)
            chord = select_best(candidates, score)
        else:
            variant = settings if strategy == "aw_rbaps" else settings.plain()
            candidates = screener(cycle) if screener else variant.candidates(cycle)
            chord = select_best(candidates, score)

        value = float(table[chord])
        theta = value / best if best > 0 else None
        thetas[strategy] = theta
        rows.append(
            {
                "trial": index,
                "n": cycle.n,
                "budget": w,
                "strategy": strategy,
                "p": chord[0],
                "q": chord[1],
                "theta_hat": theta,
                "rank": int(np.count_nonzero(values > value)) + 1,
                "candidates": len(candidates) if candidates is not None else 1,
            }
        )
    if best <= 0:
        logger.warning(f"Trial {index}: every low-frequency gain is zero; theta_hat undefined")
    return TrialReport(trial=index, rows=rows, metrics={"theta": thetas, "degenerate": best <= 0})


def _correlation_trial(cfg: CampaignConfig, index: int, screener: Optional[Screener]) -> TrialReport:
    rng = trial_stream(cfg.master_seed, index)
    cycle = generate_instance(cfg.n, cfg.conductance_lo, cfg.conductance_hi, rng)
    w = cfg.budget(cycle)
    spec = decompose(cycle)
    P, Q = admissible_arrays(cycle.n)
    D = exact_gains(spec, P, Q, w)
    I = kirchhoff_improvements(spec, P, Q, w)
    r = pearson_correlation(D, I)
    batch = index * cfg.batches // cfg.trials

    # sufficient statistics of the normalized objectives, pooled per batch
    moments = None
    if D.max() > 0 and I.max() > 0:
        x, y = I / I.max(), D / D.max()
        moments = [float(x.size), float(x.sum()), float(y.sum()),
                   float(x @ x), float(y @ y), float(x @ y)]
    row = {
        "trial": index,
        "batch": batch,
        "n": cycle.n,
        "budget": w,
        "chords": int(P.size),
        "pearson_r": r,
        "degenerate": r is None,
    }
    return TrialReport(trial=index, rows=[row], metrics={"r": r, "batch": batch, "moments": moments})


def _empty_front(degenerate: bool) -> ParetoFront:
    return ParetoFront(efficient=(), knee=None, hv=None, degenerate=degenerate)


def _pareto_trial(cfg: CampaignConfig, index: int, screener: Optional[Screener]) -> TrialReport:
    rng = trial_stream(cfg.master_seed, index)
    cycle = generate_instance(cfg.n, cfg.conductance_lo, cfg.conductance_hi, rng)
    w = cfg.budget(cycle)
    spec = decompose(cycle)

    full = exhaustive_candidates(cycle)
    points, normalizers = normalize(evaluate_objectives(spec, full, w))
    full_front = extract_front(points, normalizers)
    lookup = {pt.chord: pt for pt in points}

    settings = cfg.screening
    screened_strategies = ["aw_rbaps"] + (["rbaps"] if "rbaps" in cfg.strategies else [])
    rows, reports, fronts = [], {}, {"trial": index, "full_front": full_front.to_list()}
    for strategy in screened_strategies:
        variant = settings if strategy == "aw_rbaps" else settings.plain()
        candidates = screener(cycle) if screener else variant.candidates(cycle)
        selected = [lookup[pair] for pair in candidates]
        front = extract_front(selected, normalizers) if selected else _empty_front(normalizers.degenerate)
        report = pareto_report(full_front, front, candidates, total_chords=len(full))
        reports[strategy] = report
        fronts[strategy] = {"front": report["front"], "knee": report["knee"]}
        rows.append(
            {
                "trial": index,
                "n": cycle.n,
                "budget": w,
                "strategy": strategy,
                "candidates": report["candidates"],
                "candidate_ratio": report["candidate_ratio"],
                "full_front_size": len(full_front),
                "front_size": len(front),
                "coverage": report["coverage"],
                "front_coverage": report["front_coverage"],
                "eps_plus": report["eps_plus"],
                "hv_ratio": report["hv_ratio"],
                "knee_captured": report["knee_captured"],
                "degenerate": report["degenerate"],
            }
        )
    fronts["full_knee"] = list(full_front.knee) if full_front.knee else None
    return TrialReport(
        trial=index,
        rows=rows,
        metrics={"reports": reports, "full_front_size": len(full_front)},
        fronts=fronts if cfg.save_fronts else None,
    )


def _discrepancy_trial(cfg: CampaignConfig, index: int, screener: Optional[Screener]) -> TrialReport:
    n = cfg.sizes[index // cfg.trials]
    rng = trial_stream(cfg.master_seed, index)
    cycle = generate_instance(n, cfg.conductance_lo, cfg.conductance_hi, rng)
    report = discrepancy(cycle)
    fit = fiedler_mode_fit(decompose(cycle), cycle)
    row = {
        "trial": index,
        "n": n,
        "D": report.D,
        "Delta": report.Delta,
        "eta": report.eta,
        "delta_n": report.delta_n,
        "fiedler_sup_error": fit.sup_error,
        "fiedler_scaled_error": fit.scaled_error,
        "degenerate": fit.degenerate,
    }
    return TrialReport(
        trial=index,
        rows=[row],
        metrics={"n": n, "delta_n": report.delta_n, "scaled_error": fit.scaled_error},
    )


_TRIAL_FUNCTIONS = {
    "gain_screening": _gain_trial,
    "correlation": _correlation_trial,
    "pareto": _pareto_trial,
    "discrepancy": _discrepancy_trial,
}


def _run_trial(cfg: CampaignConfig, index: int, screener: Optional[Screener]) -> TrialReport:
    return _TRIAL_FUNCTIONS[cfg.mode](cfg, index, screener)


def run_trials(
    cfg: CampaignConfig,
    count: int,
    workers: int = 1,
    progress: Optional[Callable[[], None]] = None,
    screener: Optional[Screener] = None,
) -> List[TrialReport]:
    """
    Run trials 0..count-1 of a campaign, in worker processes when workers > 1.

    Args:
        cfg: Campaign configuration (master_seed must be set)
        count: Number of trials
        workers: Worker processes
        progress: Called once per finished trial
        screener: Replacement candidate generator (must be picklable with workers > 1)

    Returns:
        Reports in trial order
    """
    if cfg.master_seed is None:
        raise InputError("A campaign needs an explicit master seed")
    reports: List[Optional[TrialReport]] = [None] * count
    if workers <= 1 or count == 1:
        for index in range(count):
            reports[index] = _run_trial(cfg, index, screener)
            if progress:
                progress()
        return reports

    logger.debug(f"Running {count} trials on {workers} worker processes")
    with ProcessPoolExecutor(max_workers=workers) as executor:
        futures = {
            executor.submit(_run_trial, cfg, index, screener): index for index in range(count)
        }
        for future in as_completed(futures):
            reports[futures[future]] = future.result()
            if progress:
                progress()
    return reports


# --- campaigns ------------------------------------------------------------


def run_gain_campaign(
    cfg: CampaignConfig,
    workers: int = 1,
    progress: Optional[Callable[[], None]] = None,
    screener: Optional[Screener] = None,
) -> CampaignResult:
    """
    Normalized low-frequency gain of each strategy against the exhaustive optimum.

    Returns:
        CampaignResult whose summary holds, per strategy, the statistics of
        theta_hat and of the global rank
    """
    cfg = replace(cfg, mode="gain_screening")
    reports = run_trials(cfg, cfg.trials, workers, progress, screener)
    strategies = {}
    for strategy in cfg.strategies:
        thetas = [r.metrics["theta"][strategy] for r in reports]
        ranks = [row["rank"] for r in reports for row in r.rows if row["strategy"] == strategy]
        strategies[strategy] = {
            "theta_hat": describe(thetas),
            "rank": describe(ranks),
        }
    summary = {
        "mode": cfg.mode,
        "trials": cfg.trials,
        "degenerate_trials": sum(1 for r in reports if r.metrics["degenerate"]),
        "strategies": strategies,
    }
    return CampaignResult(cfg, reports, summary)


def run_correlation_campaign(
    cfg: CampaignConfig,
    workers: int = 1,
    progress: Optional[Callable[[], None]] = None,
) -> CampaignResult:
    """
    Pearson correlation between the exact gain and the exact Kirchhoff improvement
    over all admissible chords, per trial and per batch of trials.

    A batch reports the mean of its per-trial correlations and the pooled
    correlation of its normalized objective points.
    """
    cfg = replace(cfg, mode="correlation")
    reports = run_trials(cfg, cfg.trials, workers, progress)
    batches = []
    for batch in range(cfg.batches):
        members = [r for r in reports if r.metrics["batch"] == batch]
        rs = [r.metrics["r"] for r in members]
        moments = np.zeros(6)
        for r in members:
            if r.metrics["moments"] is not None:
                moments += np.asarray(r.metrics["moments"])
        batches.append(
            {
                "batch": batch,
                "trials": len(members),
                "r": describe(rs),
                "pooled_r": _pooled_correlation(moments),
                "undefined": sum(1 for v in rs if v is None),
            }
        )
    summary = {
        "mode": cfg.mode,
        "trials": cfg.trials,
        "r": describe([r.metrics["r"] for r in reports]),
        "batches": batches,
    }
    return CampaignResult(cfg, reports, summary)


def _pooled_correlation(moments: np.ndarray) -> Optional[float]:
    count, sx, sy, sxx, syy, sxy = moments
    if count < 2:
        return None
    cov = sxy - sx * sy / count
    var_x = sxx - sx * sx / count
    var_y = syy - sy * sy / count
    if var_x <= 0 or var_y <= 0:
        return None
    return float(np.clip(cov / math.sqrt(var_x * var_y), -1.0, 1.0))


def run_pareto_campaign(
    cfg: CampaignConfig,
    workers: int = 1,
    progress: Optional[Callable[[], None]] = None,
    screener: Optional[Screener] = None,
) -> CampaignResult:
    """
    Front-approximation quality of AW-RBAPS (and RBAPS when listed in strategies)
    against the exhaustive front.

    Degenerate trials are left out of the hypervolume statistics and counted.
    """
    cfg = replace(cfg, mode="pareto")
    reports = run_trials(cfg, cfg.trials, workers, progress, screener)
    per_strategy = {}
    for strategy in reports[0].metrics["reports"]:
        records = [r.metrics["reports"][strategy] for r in reports]
        usable = [rec for rec in records if not rec["degenerate"]]
        hv = [rec["hv_ratio"] for rec in usable]
        eps = [rec["eps_plus"] for rec in records]
        cov = [rec["coverage"] for rec in records]
        per_strategy[strategy] = {
            "hv_ratio": describe(hv),
            "eps_plus": describe(eps),
            "coverage": describe(cov),
            "front_coverage": describe([rec["front_coverage"] for rec in records]),
            "candidate_ratio": describe([rec["candidate_ratio"] for rec in records]),
            "front_size": describe([len(rec["front"]) for rec in records]),
            "fraction_hv_ge_0.99": _fraction([v is not None and v >= 0.99 for v in hv]),
            "fraction_eps_le_0.01": _fraction([v is not None and v <= 1e-2 for v in eps]),
            "fraction_full_coverage": _fraction([v == 1.0 for v in cov]),
            "knee_captured": _fraction([rec["knee_captured"] for rec in records]),
            "degenerate_trials": len(records) - len(usable),
        }
    summary = {
        "mode": cfg.mode,
        "trials": cfg.trials,
        "full_front_size": describe([r.metrics["full_front_size"] for r in reports]),
        "strategies": per_strategy,
    }
    return CampaignResult(cfg, reports, summary)


def run_discrepancy_sweep(
    cfg: CampaignConfig,
    workers: int = 1,
    progress: Optional[Callable[[], None]] = None,
) -> CampaignResult:
    """
    Median discrepancy delta_n and median sqrt(n)-scaled sinusoid residual of the
    Fiedler vector for each cycle size in cfg.sizes (cfg.trials seeds per size).
    """
    cfg = replace(cfg, mode="discrepancy")
    reports = run_trials(cfg, cfg.trials * len(cfg.sizes), workers, progress)
    sizes = []
    for n in cfg.sizes:
        members = [r for r in reports if r.metrics["n"] == n]
        sizes.append(
            {
                "n": n,
                "delta_n": describe([r.metrics["delta_n"] for r in members]),
                "scaled_error": describe([r.metrics["scaled_error"] for r in members]),
            }
        )
    medians = [entry["delta_n"]["median"] for entry in sizes]
    residuals = [entry["scaled_error"]["median"] for entry in sizes]
    summary = {
        "mode": cfg.mode,
        "trials_per_size": cfg.trials,
        "sizes": sizes,
        "delta_n_decreasing": all(a > b for a, b in zip(medians, medians[1:])),
        "delta_n_ratio": medians[-1] / medians[0] if medians[0] else None,
        "scaled_error_decreasing": all(a > b for a, b in zip(residuals, residuals[1:])),
    }
    return CampaignResult(cfg, reports, summary)


_CAMPAIGNS = {
    "gain_screening": run_gain_campaign,
    "correlation": run_correlation_campaign,
    "pareto": run_pareto_campaign,
    "discrepancy": run_discrepancy_sweep,
}


def trial_count(cfg: CampaignConfig) -> int:
    """Number of trials a campaign will run (per sweep value)."""
    return cfg.trials * len(cfg.sizes) if cfg.mode == "discrepancy" else cfg.trials


def run_campaign(
    cfg: CampaignConfig, workers: int = 1, progress: Optional[Callable[[], None]] = None
) -> CampaignResult:
    """Dispatch on cfg.mode (a sweep block is ignored here; see :func:`run_sweep`)."""
    logger.info(
        f"Campaign '{cfg.mode}': n={cfg.n}, range=[{cfg.conductance_lo}, {cfg.conductance_hi}], "
        f"trials={cfg.trials}, seed={cfg.master_seed}"
    )
    return _CAMPAIGNS[cfg.mode](cfg, workers=workers, progress=progress)


def sweep_settings(cfg: CampaignConfig) -> List[Tuple[str, CampaignConfig]]:
    """
    Expand a sweep block into (label, config) pairs; without one, a single unlabeled setting.
    """
    if cfg.sweep is None:
        return [("", cfg)]
    name = cfg.sweep["field"]
    settings = []
    for value in cfg.sweep["values"]:
        value = int(value) if name == "n" else float(value)
        settings.append((f"{name}_{value:g}", replace(cfg, sweep=None, **{name: value})))
    return settings


def run_sweep(
    cfg: CampaignConfig, workers: int = 1, progress: Optional[Callable[[], None]] = None
) -> List[Tuple[str, CampaignResult]]:
    """Run the campaign once per sweep value (heterogeneity or size tables)."""
    return [(label, run_campaign(setting, workers, progress)) for label, setting in sweep_settings(cfg)]
