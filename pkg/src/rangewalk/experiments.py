"""Monte Carlo harness: independent seeded trials, exact aggregation, theory targets.

Each trial i draws its own PCG64 stream from mix_seed(master_seed, i) and is
reduced in trial-index order, so a report is byte-identical whether trials run
serially or on a thread pool.  Per-trial metrics are kept as exact integers
(R_N, X_N, M_N); division by N happens once at aggregation.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .analysis import RangeTracker, _ExtremaTracker
from .core import WalkStream
from .generators import _parse_chain_preset, is_stochastic, make_walk, mix_seed

METRICS = ("range_speed", "walk_speed", "no_return", "max_speed")

#: Exhaustive enumeration refuses beyond 2^20 paths.
MAX_EXACT_N = 20


@dataclass(frozen=True)
class TrialSpec:
    """What to run: a generator config, a horizon, metrics, trials, master seed."""

    config: dict
    horizon: int
    metrics: tuple = METRICS
    trials: int = 1
    master_seed: int = 0

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        metrics = tuple(self.metrics)
        if not metrics:
            raise ValueError("metric set must be non-empty")
        for name in metrics:
            if name not in METRICS:
                raise ValueError(f"unknown metric {name!r}")
        object.__setattr__(self, "metrics", metrics)
        if not is_stochastic(self.config) and self.trials > 1:
            raise ValueError("deterministic generators are only allowed with trials=1")

    def to_json_doc(self) -> dict:
        return {
            "config": dict(self.config),
            "horizon": self.horizon,
            "metrics": list(self.metrics),
            "trials": self.trials,
            "master_seed": self.master_seed,
        }


@dataclass
class MetricAggregate:
    mean: float
    stddev: float
    ci95: float
    theory: Optional[float] = None
    delta: Optional[float] = None

    def to_json_doc(self) -> dict:
        doc = {"mean": self.mean, "stddev": self.stddev, "ci95": self.ci95}
        if self.theory is not None:
            doc["theory"] = self.theory
            doc["delta"] = self.delta
        return doc


@dataclass
class AggregateReport:
    """Aggregated trial metrics; per-trial values retained when requested."""

    spec: TrialSpec
    per_metric: dict
    per_trial: Optional[dict] = None

    def to_json_doc(self) -> dict:
        doc = {
            "spec": self.spec.to_json_doc(),
            "per_metric": {k: v.to_json_doc() for k, v in self.per_metric.items()},
        }
        if self.per_trial is not None:
            doc["trials"] = self.per_trial
        return doc

    def per_trial_csv_rows(self):
        """Rows for the optional CSV dump, header trial,metric,value."""
        if self.per_trial is None:
            raise ValueError("report was built without per-trial values")
        for metric, values in self.per_trial.items():
            for i, v in enumerate(values):
                yield i, metric, v

    def write_trials_csv(self, fh) -> None:
        """Dump per-trial values as CSV with header trial,metric,value."""
        fh.write("trial,metric,value\n")
        for trial, metric, value in self.per_trial_csv_rows():
            fh.write(f"{trial},{metric},{value}\n")


def _trial_counts(stream: WalkStream, horizon: int) -> dict:
    """One pass collecting R_N, X_N, M_N, and the no-return indicator."""
    tracker = RangeTracker("auto", d=stream.d, m=stream.m)
    extrema = _ExtremaTracker(stream.d)
    returned = False
    done = 0
    last = None
    for block in stream.blocks(horizon):
        tracker.update(block)
        extrema.update(block)
        if stream.d == 1:
            hits = block == 0
        else:
            hits = ~block.any(axis=1)
        if done == 0:
            hits[0] = False  # n = 0 does not count as a return
        returned = returned or bool(hits.any())
        done += block.shape[0]
        last = block[-1]
    if stream.d == 1:
        final_signed = int(last)
        final_abs = abs(final_signed)
        max_disp = extrema.peak
    else:
        final_signed = None
        final_abs = math.sqrt(float(np.dot(last, last)))
        max_disp = math.sqrt(extrema.peak)
    return {
        "range": tracker.count,
        "final_abs": final_abs,
        "final_signed": final_signed,
        "max_disp": max_disp,
        "no_return": 0 if returned else 1,
    }


def _aggregate(values: Sequence, denom: int) -> MetricAggregate:
    """Mean/stddev/ci95 of values / denom; exact integer sums when possible."""
    t = len(values)
    if all(isinstance(v, int) for v in values):
        s1 = sum(values)
        s2 = sum(v * v for v in values)
        mean = s1 / (t * denom)
        if t > 1:
            var_num = s2 * t - s1 * s1  # t*(t-1)*denom^2 * sample variance
            var = var_num / (t * (t - 1)) / (denom * denom)
        else:
            var = 0.0
    else:
        arr = np.asarray(values, dtype=np.float64) / denom
        mean = float(arr.mean())
        var = float(arr.var(ddof=1)) if t > 1 else 0.0
    var = max(var, 0.0)
    std = math.sqrt(var)
    ci95 = 1.96 * std / math.sqrt(t)
    return MetricAggregate(mean=mean, stddev=std, ci95=ci95)


def theory_value(config: dict) -> Optional[float]:
    """Closed-form speed target: |2p-1| for srw, |stationary mean| for chains."""
    gen = config.get("gen")
    if gen == "srw":
        return abs(2.0 * float(config["p"]) - 1.0)
    if gen == "ergodic":
        return abs(_parse_chain_preset(str(config["preset"])).drift)
    return None


def run_trials(spec: TrialSpec, workers: int = 1, keep_trials: bool = False) -> AggregateReport:
    """Run the spec's trials and aggregate in trial-index order.

    `workers` only changes how trials are scheduled (thread pool), never the
    report: reduction is sequential in trial index over exact counts.
    """
    cfg = dict(spec.config)
    cfg.pop("seed", None)

    def one(i: int) -> dict:
        stream = make_walk(cfg, seed=mix_seed(spec.master_seed, i))
        return _trial_counts(stream, spec.horizon)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(one, range(spec.trials)))
    else:
        counts = [one(i) for i in range(spec.trials)]

    n = spec.horizon
    series = {
        "range_speed": ([c["range"] for c in counts], n),
        "walk_speed": ([c["final_abs"] for c in counts], n),
        "no_return": ([c["no_return"] for c in counts], 1),
        "max_speed": ([c["max_disp"] for c in counts], n),
    }
    theory = theory_value(cfg)
    theory_metrics = ()
    if cfg.get("gen") == "srw":
        theory_metrics = ("range_speed", "walk_speed", "no_return")
    elif cfg.get("gen") == "ergodic":
        theory_metrics = ("range_speed", "walk_speed")

    per_metric = {}
    for name in spec.metrics:
        values, denom = series[name]
        agg = _aggregate(values, denom)
        if theory is not None and name in theory_metrics:
            agg.theory = theory
            agg.delta = abs(agg.mean - theory)
        per_metric[name] = agg

    per_trial = None
    if keep_trials:
        per_trial = {
            name: [v / series[name][1] for v in series[name][0]] for name in spec.metrics
        }
        if "walk_speed" in spec.metrics and counts and counts[0]["final_signed"] is not None:
            per_trial["walk_speed_signed"] = [c["final_signed"] / n for c in counts]
    return AggregateReport(spec=spec, per_metric=per_metric, per_trial=per_trial)


def compare(report: AggregateReport, tol: float) -> dict:
    """Per-metric pass/fail vs theory, plus the range-vs-walk cross check."""
    verdicts = {}
    has_theory = False
    for name, agg in report.per_metric.items():
        if agg.theory is None:
            continue
        has_theory = True
        delta = abs(agg.mean - agg.theory)
        verdicts[name] = {"pass": delta <= tol, "delta": delta, "theory": agg.theory}
    if not has_theory:
        raise ValueError("report has no theory target to compare against")
    pm = report.per_metric
    if "range_speed" in pm and "walk_speed" in pm:
        delta = abs(pm["range_speed"].mean - pm["walk_speed"].mean)
        verdicts["cross_range_walk"] = {"pass": delta <= tol, "delta": delta}
    return verdicts


# ---------------------------------------------------------------------------
# No-return frequency with explicit truncation-bias reporting
# ---------------------------------------------------------------------------

BIAS_NOTE = (
    "frequency over-estimates the never-return probability (a walk may return "
    "after the horizon); the bias is non-increasing in the horizon"
)


@dataclass(frozen=True)
class NoReturnEstimate:
    """No-return frequency at one horizon, optionally profiled over nested ones.

    With `horizons`, all frequencies come from the same per-trial paths
    (shared seeds), so each trial's indicator is literally non-increasing.
    """

    p: float
    horizon: int
    trials: int
    frequency: float
    bias_note: str
    horizons: Optional[tuple] = None
    frequencies: Optional[tuple] = None
    per_trial_monotone: Optional[bool] = None
    first_returns: Optional[tuple] = None

    def indicators(self, h: int) -> tuple:
        """Per-trial no-return indicators at horizon h (needs first_returns)."""
        if self.first_returns is None:
            raise ValueError("estimate was built without per-trial return times")
        return tuple(1 if t is None or t > h else 0 for t in self.first_returns)


def _first_return(stream: WalkStream, horizon: int) -> Optional[int]:
    done = 0
    for block in stream.blocks(horizon, block_size=4096):
        hits = block == 0
        if done == 0:
            hits[0] = False
        if hits.any():
            return done + int(np.argmax(hits))
        done += block.shape[0]
    return None


def estimate_no_return(
    p: float,
    horizon: int,
    trials: int,
    master_seed: int,
    horizons: Optional[Sequence[int]] = None,
) -> NoReturnEstimate:
    """Fraction of trials with no zero visit in [1, horizon].

    When `horizons` is given (each <= horizon) the same trials also yield the
    frequency at every nested horizon.
    """
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p must lie in [0, 1], got {p}")
    nested = tuple(sorted(int(h) for h in horizons)) if horizons else None
    if nested and nested[-1] > horizon:
        raise ValueError("nested horizons must not exceed the main horizon")
    first_returns = []
    for i in range(trials):
        stream = make_walk({"gen": "srw", "p": p, "steps": horizon}, seed=mix_seed(master_seed, i))
        first_returns.append(_first_return(stream, horizon))

    def freq_at(h: int) -> float:
        survived = sum(1 for t in first_returns if t is None or t > h)
        return survived / trials

    freqs = tuple(freq_at(h) for h in nested) if nested else None
    monotone = None
    if nested:
        monotone = all(a >= b for a, b in zip(freqs, freqs[1:]))
    return NoReturnEstimate(
        p=p,
        horizon=horizon,
        trials=trials,
        frequency=freq_at(horizon),
        bias_note=BIAS_NOTE,
        horizons=nested,
        frequencies=freqs,
        per_trial_monotone=monotone,
        first_returns=tuple(first_returns),
    )


# ---------------------------------------------------------------------------
# Exhaustive enumeration oracle (small N)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExactRangeStats:
    """Exact distribution summary of R_N/N for srw(p) over all 2^N paths."""

    p: float
    horizon: int
    mean: float
    var: float

    @property
    def std(self) -> float:
        return math.sqrt(self.var)


def exact_range_speed(p: float, horizon: int) -> ExactRangeStats:
    """E[R_N/N] and Var[R_N/N] by enumerating all 2^N increment sequences.

    Independent of the simulation pipeline: paths come from the binary
    expansion of 0..2^N-1, weighted p^(#up) (1-p)^(#down).
    """
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if not (1 <= horizon <= MAX_EXACT_N):
        raise ValueError(f"exact enumeration supports 1 <= N <= {MAX_EXACT_N}")
    n = horizon
    codes = np.arange(1 << n, dtype=np.uint32)
    bits = ((codes[:, None] >> np.arange(n, dtype=np.uint32)) & 1).astype(np.int64)
    paths = np.cumsum(2 * bits - 1, axis=1)
    hi = np.maximum(paths.max(axis=1), 0)
    lo = np.minimum(paths.min(axis=1), 0)
    r = (hi - lo + 1).astype(np.float64)
    ups = bits.sum(axis=1)
    weights = np.power(p, ups) * np.power(1.0 - p, n - ups)
    ratio = r / n
    mean = float(np.dot(weights, ratio))
    var = float(np.dot(weights, ratio * ratio) - mean * mean)
    return ExactRangeStats(p=p, horizon=n, mean=mean, var=max(var, 0.0))
