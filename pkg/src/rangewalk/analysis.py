"""Online trackers (range, extrema, return times) and inequality checkers.

Everything here consumes a :class:`~rangewalk.core.WalkStream` in numpy
blocks, so horizons of 10^6..10^9 steps stay cheap.  All inequality checks
are carried out in exact integer arithmetic (squared norms for d >= 2); no
float rounding can flip a verdict.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .core import WalkStream

#: Set-mode range tracking refuses to store more points than this by default.
DEFAULT_SET_CAP = 1 << 30


class MemoryGuardError(RuntimeError):
    """Set-mode range tracking exceeded its configured point cap."""


class ClassRAssumptionError(ValueError):
    """The stream did not revisit zero often enough for an excursion check."""


# ---------------------------------------------------------------------------
# Checkpoint schedules
# ---------------------------------------------------------------------------


def dyadic_checkpoints(horizon: int) -> np.ndarray:
    """{1, 2, 4, ...} up to and always including the horizon."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    cps = []
    n = 1
    while n < horizon:
        cps.append(n)
        n *= 2
    cps.append(horizon)
    return np.asarray(cps, dtype=np.int64)


def arith_checkpoints(horizon: int, step: int) -> np.ndarray:
    """{step, 2*step, ...} up to and always including the horizon."""
    if horizon < 1 or step < 1:
        raise ValueError("horizon and step must be >= 1")
    cps = list(range(step, horizon + 1, step))
    if not cps or cps[-1] != horizon:
        cps.append(horizon)
    return np.asarray(cps, dtype=np.int64)


# ---------------------------------------------------------------------------
# Range tracking
# ---------------------------------------------------------------------------


def _pack_keys(block: np.ndarray) -> np.ndarray:
    """Pack (N, d) integer coordinates into sortable scalar keys.

    d = 2 packs into one uint64 (fast path); higher d falls back to a
    structured row view, which numpy sorts and searches lexicographically.
    """
    if block.ndim == 1:
        return block
    if block.shape[1] == 2:
        if np.any(np.abs(block) >= 2**31):
            raise ValueError("coordinates beyond +-2^31 not supported in set mode")
        off = block.astype(np.int64) + 2**31
        return (off[:, 0].astype(np.uint64) << np.uint64(32)) | off[:, 1].astype(np.uint64)
    rows = np.ascontiguousarray(block)
    return rows.view([("", rows.dtype)] * rows.shape[1]).ravel()


class RangeTracker:
    """Online count of distinct visited points r_n = card{x_0, ..., x_n}.

    Interval mode (legal only for d = 1, m = 1, where no integer can be
    skipped) tracks min/max and uses r_n = max - min + 1.  Set mode stores
    the visited points; a memory guard aborts beyond `cap` stored points.
    """

    def __init__(self, mode: str = "auto", d: int = 1, m: int = 1, cap: int = DEFAULT_SET_CAP):
        if mode == "auto":
            mode = "interval" if (d == 1 and m == 1) else "set"
        if mode not in ("interval", "set"):
            raise ValueError(f"unknown range mode {mode!r}")
        if mode == "interval" and not (d == 1 and m == 1):
            raise ValueError("interval mode is only legal for d = 1, m = 1")
        self.mode = mode
        self.d = d
        self._cap = cap
        self._count = 0
        self._min: Optional[int] = None
        self._max: Optional[int] = None
        self._known: Optional[np.ndarray] = None  # sorted keys, set mode only

    @property
    def count(self) -> int:
        """Current r_n."""
        return self._count

    def update(self, block: np.ndarray) -> np.ndarray:
        """Consume the next positions; return r at each of them (int64)."""
        if block.shape[0] == 0:
            return np.empty(0, dtype=np.int64)
        if self.mode == "interval":
            return self._update_interval(block)
        return self._update_set(block)

    def _update_interval(self, block: np.ndarray) -> np.ndarray:
        mins = np.minimum.accumulate(block)
        maxs = np.maximum.accumulate(block)
        if self._min is not None:
            np.minimum(mins, self._min, out=mins)
            np.maximum(maxs, self._max, out=maxs)
        self._min = int(mins[-1])
        self._max = int(maxs[-1])
        r = maxs - mins + 1
        self._count = int(r[-1])
        return r

    def _update_set(self, block: np.ndarray) -> np.ndarray:
        keys = _pack_keys(block)
        order = np.argsort(keys, kind="stable")
        sk = keys[order]
        uniq = np.empty(len(keys), dtype=bool)
        uniq[0] = True
        uniq[1:] = sk[1:] != sk[:-1]
        first = np.empty(len(keys), dtype=bool)
        first[order] = uniq
        if self._known is not None and self._known.size:
            idx = np.minimum(np.searchsorted(self._known, keys), self._known.size - 1)
            new = first & (self._known[idx] != keys)
        else:
            new = first
        r = self._count + np.cumsum(new)
        self._count = int(r[-1])
        if self._count > self._cap:
            raise MemoryGuardError(
                f"range tracker exceeded its cap of {self._cap} stored points"
            )
        fresh = sk[uniq]
        self._known = fresh if self._known is None else np.union1d(self._known, fresh)
        return r.astype(np.int64)


class _ExtremaTracker:
    """Running M_n = max_{k<=n} ||x_k - x_0||; exact ints (squared for d >= 2)."""

    def __init__(self, d: int):
        self.d = d
        self._x0: Optional[np.ndarray] = None
        self._best = 0  # |x-x0| for d=1, squared norm otherwise

    @property
    def peak(self) -> int:
        """Current raw maximum: |x - x0| for d = 1, its square otherwise."""
        return self._best

    def update(self, block: np.ndarray) -> np.ndarray:
        """Return per-position running max (|disp| for d=1, disp^2 otherwise)."""
        if self._x0 is None:
            self._x0 = block[0].copy() if block.ndim > 1 else np.int64(block[0])
        if block.ndim == 1:
            disp = np.abs(block - self._x0)
        else:
            delta = block - self._x0
            disp = np.sum(delta * delta, axis=1)
        run = np.maximum.accumulate(disp)
        if self._best:
            np.maximum(run, self._best, out=run)
        self._best = int(run[-1])
        return run

    def norms(self, raw: np.ndarray) -> np.ndarray:
        """Convert tracked values to Euclidean norms as floats."""
        return raw.astype(np.float64) if self.d == 1 else np.sqrt(raw)


# ---------------------------------------------------------------------------
# Return times
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReturnTimes:
    """Strictly increasing indices n with x_n = 0 (n = 0 included when x_0 = 0)."""

    times: tuple

    def __post_init__(self):
        times = tuple(int(t) for t in self.times)
        for a, b in zip(times, times[1:]):
            if b <= a:
                raise ValueError("return times must be strictly increasing")
        object.__setattr__(self, "times", times)

    def __len__(self) -> int:
        return len(self.times)

    def gaps(self) -> np.ndarray:
        return np.diff(np.asarray(self.times, dtype=np.int64))


def return_times(stream: WalkStream, horizon: int) -> ReturnTimes:
    """All n <= horizon with x_n = 0, ascending.  d = 1 only."""
    if stream.d != 1:
        raise ValueError("return times are defined for d = 1 walks")
    found = []
    done = 0
    for block in stream.blocks(horizon):
        hits = np.flatnonzero(block == 0)
        if hits.size:
            found.append(hits + done)
        done += block.shape[0]
    if found:
        return ReturnTimes(tuple(np.concatenate(found).tolist()))
    return ReturnTimes(())


def ratio_series(rt: ReturnTimes) -> np.ndarray:
    """Consecutive ratios tau_k / tau_{k-1} over the positive return times.

    Relative error is one ulp (plain float division of exact integers).
    """
    positive = [t for t in rt.times if t > 0]
    if len(positive) < 2:
        raise ValueError("need at least two positive return times for ratios")
    arr = np.asarray(positive, dtype=np.float64)
    return arr[1:] / arr[:-1]


# ---------------------------------------------------------------------------
# Scalar trackers over checkpoints
# ---------------------------------------------------------------------------


def _as_checkpoints(horizon: int, checkpoints) -> np.ndarray:
    if checkpoints is None:
        return dyadic_checkpoints(horizon)
    cps = np.unique(np.asarray([int(c) for c in checkpoints], dtype=np.int64))
    if cps.size == 0:
        raise ValueError("empty checkpoint schedule")
    if cps[0] < 0 or cps[-1] > horizon:
        raise ValueError("checkpoints must lie in [0, horizon]")
    return cps


def _series_at_checkpoints(stream, horizon, checkpoints, per_block):
    """Run `per_block(block) -> values` over the stream, sampling checkpoints."""
    cps = _as_checkpoints(horizon, checkpoints)
    out = np.empty(cps.size, dtype=np.float64)
    ptr = 0
    done = 0
    for block in stream.blocks(horizon):
        values = per_block(block)
        hi = done + block.shape[0]
        while ptr < cps.size and cps[ptr] < hi:
            out[ptr] = values[cps[ptr] - done]
            ptr += 1
        done = hi
        if ptr == cps.size:
            break
    return cps, out


def track_range(stream: WalkStream, horizon: int, checkpoints=None):
    """Exact r_n at each checkpoint; returns (checkpoints, counts).

    Interval mode is selected automatically iff d = 1 and m = 1.
    """
    tracker = RangeTracker("auto", d=stream.d, m=stream.m)
    cps, values = _series_at_checkpoints(stream, horizon, checkpoints, tracker.update)
    return cps, values.astype(np.int64)


def track_extrema(stream: WalkStream, horizon: int, checkpoints=None):
    """Running max displacement M_n at each checkpoint; returns (checkpoints, M)."""
    tracker = _ExtremaTracker(stream.d)
    cps, raw = _series_at_checkpoints(
        stream, horizon, checkpoints, lambda b: tracker.update(b)
    )
    if stream.d == 1:
        return cps, raw.astype(np.int64)
    return cps, np.sqrt(raw)


# ---------------------------------------------------------------------------
# Inequality checkers (exact integer comparisons)
# ---------------------------------------------------------------------------


def check_maximal_range(stream: WalkStream, m: int, horizon: int) -> Optional[int]:
    """Verify M_n / m + 1 <= r_n for every n <= horizon (any d).

    Returns the first violating n, or None (the expected result: the bound
    is a theorem for every m-bounded path).
    """
    if m != stream.m:
        raise ValueError(f"declared m={m} does not match the stream's m={stream.m}")
    tracker = RangeTracker("auto", d=stream.d, m=m)
    extrema = _ExtremaTracker(stream.d)
    done = 0
    for block in stream.blocks(horizon):
        r = tracker.update(block)
        disp = extrema.update(block)
        if stream.d == 1:
            bad = disp > m * (r - 1)
        else:
            rhs = r - 1
            if rhs[-1] > 3_000_000_000 // m:
                raise ValueError("horizon too large for the exact d >= 2 range check")
            bad = disp > (m * m) * rhs * rhs
        if bad.any():
            return done + int(np.argmax(bad))
        done += block.shape[0]
    return None


def check_range_sandwich_1d(stream: WalkStream, horizon: int) -> Optional[int]:
    """Verify M_n + 1 <= r_n <= 2 M_n + 1 for every n <= horizon.

    Requires d = 1, m = 1, x_0 = 0; returns the first violating n or None.
    """
    if stream.d != 1 or stream.m != 1:
        raise ValueError("sandwich check requires d = 1 and m = 1")
    tracker = RangeTracker("interval")
    extrema = _ExtremaTracker(1)
    done = 0
    for block in stream.blocks(horizon):
        if done == 0 and block[0] != 0:
            raise ValueError("sandwich check requires x_0 = 0")
        r = tracker.update(block)
        disp = extrema.update(block)
        bad = (r < disp + 1) | (r > 2 * disp + 1)
        if bad.any():
            return done + int(np.argmax(bad))
        done += block.shape[0]
    return None


@dataclass(frozen=True)
class ExcursionCheck:
    """Outcome of the per-excursion bound check.

    Covers every complete excursion [tau_{k-1}, tau_k) inside the horizon;
    the tail after the last zero is reported via `coverage`, not checked.
    """

    first_violation: Optional[int]
    n_excursions: int
    peaks: tuple        # max |x| per excursion
    gaps: tuple         # tau_k - tau_{k-1} per excursion
    tight: int          # excursions attaining |x| = gap / 2 exactly
    last_zero: int
    horizon: int

    @property
    def holds(self) -> bool:
        return self.first_violation is None


def check_excursion_bound(stream: WalkStream, horizon: int) -> ExcursionCheck:
    """Check |x_n| <= (tau_k - tau_{k-1}) / 2 within each complete excursion.

    Also checks the chained form 2 |x_n| tau_{k-1} <= n (tau_k - tau_{k-1})
    for n >= tau_{k-1} >= 1.  Requires d = 1, x_0 = 0, and at least two zero
    visits within the horizon (else :class:`ClassRAssumptionError`).
    """
    if stream.d != 1:
        raise ValueError("excursion check requires d = 1")
    x = stream.path_array(horizon)
    if x[0] != 0:
        raise ValueError("excursion check requires x_0 = 0")
    zeros = np.flatnonzero(x == 0)
    if zeros.size < 2:
        raise ClassRAssumptionError(
            f"only {zeros.size} zero visit(s) within horizon {horizon}: "
            "class-R assumption not covered"
        )
    last = int(zeros[-1])
    gaps = np.diff(zeros)
    ids = np.repeat(np.arange(gaps.size), gaps)
    starts = zeros[:-1][ids]
    ends = zeros[1:][ids]
    n = np.arange(last, dtype=np.int64)
    absx = np.abs(x[:last])
    bad = 2 * absx > (ends - starts)
    chained_mask = starts >= 1
    bad |= chained_mask & (2 * absx * starts > n * (ends - starts))
    first = int(np.argmax(bad)) if bad.any() else None
    peaks = np.maximum.reduceat(absx, zeros[:-1])
    tight = int(np.count_nonzero(2 * peaks == gaps))
    return ExcursionCheck(
        first_violation=first,
        n_excursions=int(gaps.size),
        peaks=tuple(int(p) for p in peaks),
        gaps=tuple(int(g) for g in gaps),
        tight=tight,
        last_zero=last,
        horizon=horizon,
    )


# ---------------------------------------------------------------------------
# Tail estimates and the speed report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TailEstimate:
    """Window min/max of a checkpointed series over [N/2, N].

    An estimate of liminf/limsup, never asserted to equal a true limit;
    the window is reported alongside.
    """

    liminf_hat: float
    limsup_hat: float
    window: tuple
    n_points: int


def tail_limit_estimate(ns: Sequence[int], values: Sequence[float]) -> TailEstimate:
    """Estimate liminf/limsup of a series sampled at checkpoints `ns`."""
    ns = np.asarray(ns, dtype=np.int64)
    values = np.asarray(values, dtype=np.float64)
    if ns.size != values.size:
        raise ValueError("ns and values must have equal length")
    if ns.size < 4:
        raise ValueError("tail estimate needs at least 4 checkpoints")
    big_n = int(ns[-1])
    mask = 2 * ns >= big_n
    window_vals = values[mask]
    return TailEstimate(
        liminf_hat=float(window_vals.min()),
        limsup_hat=float(window_vals.max()),
        window=(big_n / 2, big_n),
        n_points=int(mask.sum()),
    )


@dataclass(frozen=True)
class SpeedSeries:
    """The three normalized series at checkpoints plus tail estimates.

    x_over_n is signed for d = 1 and the Euclidean norm over n for d >= 2.
    Theory deltas (vs the final checkpoint) are present when the stream's
    drift is known in closed form; delta_r only when m = 1, where the range
    speed has a point target.
    """

    checkpoints: np.ndarray
    x_over_n: np.ndarray
    M_over_n: np.ndarray
    r_over_n: np.ndarray
    tail_x: TailEstimate
    tail_M: TailEstimate
    tail_r: TailEstimate
    theory_drift: Optional[float] = None
    delta_x: Optional[float] = None
    delta_M: Optional[float] = None
    delta_r: Optional[float] = None


@dataclass(frozen=True)
class AnalysisReport:
    """Full single-pass analysis: per-checkpoint rows plus summary.

    Rows are dicts in the JSONL field order
    (n, x_over_n, M_over_n, r_over_n, tau_count, last_tau, violations).
    """

    rows: list
    horizon: int
    d: int
    m: int
    tails: dict
    theory: Optional[dict]
    provenance: dict

    def speed_series(self) -> SpeedSeries:
        cps = np.asarray([row["n"] for row in self.rows], dtype=np.int64)
        theory = self.theory or {}
        return SpeedSeries(
            checkpoints=cps,
            x_over_n=np.asarray([row["x_over_n"] for row in self.rows]),
            M_over_n=np.asarray([row["M_over_n"] for row in self.rows]),
            r_over_n=np.asarray([row["r_over_n"] for row in self.rows]),
            tail_x=self.tails["x_over_n"],
            tail_M=self.tails["M_over_n"],
            tail_r=self.tails["r_over_n"],
            theory_drift=theory.get("drift"),
            delta_x=theory.get("delta_x_over_n"),
            delta_M=theory.get("delta_M_over_n"),
            delta_r=theory.get("delta_r_over_n"),
        )

    def jsonl_lines(self) -> Iterator[str]:
        for row in self.rows:
            yield json.dumps(row)
        tails = {
            name: {
                "liminf_hat": est.liminf_hat,
                "limsup_hat": est.limsup_hat,
                "window": list(est.window),
            }
            for name, est in self.tails.items()
        }
        yield json.dumps(
            {"summary": {"horizon": self.horizon, "tail": tails, "theory": self.theory}}
        )
        yield json.dumps({"provenance": self.provenance})


def analyze_stream(
    stream: WalkStream,
    horizon: int,
    checkpoints=None,
    provenance: Optional[dict] = None,
) -> AnalysisReport:
    """One pass producing the checkpoint report, inline checks, and tails.

    The maximal-range inequality is checked at every position; the 1-D
    sandwich additionally when d = 1, m = 1, and x_0 = 0.  Violations are
    attached to the first checkpoint row at or after the offending index.
    """
    cps = _as_checkpoints(horizon, checkpoints)
    d, m = stream.d, stream.m
    tracker = RangeTracker("auto", d=d, m=m)
    extrema = _ExtremaTracker(d)
    rows = []
    zero_count = 0
    last_zero: Optional[int] = None
    pending_violations: list = []
    sandwich_applies = d == 1 and m == 1
    maximal_seen = False
    sandwich_seen = False
    ptr = 0
    done = 0
    for block in stream.blocks(horizon):
        if done == 0 and sandwich_applies:
            origin = int(block[0])
            sandwich_applies = origin == 0
        r = tracker.update(block)
        disp = extrema.update(block)
        if not maximal_seen:
            if d == 1:
                bad = disp > m * (r - 1)
            else:
                bad = disp > (m * m) * (r - 1) * (r - 1)
            if bad.any():
                maximal_seen = True
                pending_violations.append(
                    {"check": "maximal_range", "n": done + int(np.argmax(bad))}
                )
        if sandwich_applies and not sandwich_seen:
            bad = (r < disp + 1) | (r > 2 * disp + 1)
            if bad.any():
                sandwich_seen = True
                pending_violations.append(
                    {"check": "range_sandwich_1d", "n": done + int(np.argmax(bad))}
                )
        if d == 1:
            hits = np.flatnonzero(block == 0)
        else:
            hits = np.flatnonzero(~block.any(axis=1))
        hi = done + block.shape[0]
        while ptr < cps.size and cps[ptr] < hi:
            k = int(cps[ptr]) - done
            n = int(cps[ptr])
            upto = int(np.searchsorted(hits, k, side="right"))
            tau_count = zero_count + upto
            lz = last_zero
            if upto:
                lz = done + int(hits[upto - 1])
            if d == 1:
                x_over = float(block[k]) / n if n else float(block[k])
            else:
                x_over = math.sqrt(float(np.dot(block[k], block[k]))) / n if n else 0.0
            m_over = float(extrema.norms(disp[k : k + 1])[0]) / n if n else 0.0
            rows.append(
                {
                    "n": n,
                    "x_over_n": x_over,
                    "M_over_n": m_over,
                    "r_over_n": float(r[k]) / n if n else float(r[k]),
                    "tau_count": tau_count,
                    "last_tau": lz,
                    "violations": pending_violations,
                }
            )
            pending_violations = []
            ptr += 1
        zero_count += int(hits.size)
        if hits.size:
            last_zero = done + int(hits[-1])
        done = hi
    tails = {
        name: tail_limit_estimate(
            [row["n"] for row in rows], [row[name] for row in rows]
        )
        if len(rows) >= 4
        else TailEstimate(
            liminf_hat=min(row[name] for row in rows),
            limsup_hat=max(row[name] for row in rows),
            window=(rows[0]["n"], rows[-1]["n"]),
            n_points=len(rows),
        )
        for name in ("x_over_n", "M_over_n", "r_over_n")
    }
    theory = None
    drift = stream.metadata.theoretical_drift
    if drift is not None and rows:
        final = rows[-1]
        target_x = drift if d == 1 else abs(drift)
        theory = {
            "drift": drift,
            "delta_x_over_n": abs(final["x_over_n"] - target_x),
            "delta_M_over_n": abs(final["M_over_n"] - abs(drift)),
            "delta_r_over_n": abs(final["r_over_n"] - abs(drift)) if m == 1 else None,
        }
    prov = dict(provenance) if provenance else {}
    prov.setdefault("generator", stream.metadata.generator_name)
    prov.setdefault("params", stream.metadata.params)
    prov.setdefault("seed", stream.metadata.seed)
    prov.setdefault("m", m)
    prov.setdefault("d", d)
    return AnalysisReport(
        rows=rows,
        horizon=horizon,
        d=d,
        m=m,
        tails=tails,
        theory=theory,
        provenance=prov,
    )


def speed_report(stream: WalkStream, m: int, horizon: int, checkpoints=None) -> SpeedSeries:
    """The three normalized series with tail estimates and theory deltas."""
    if m != stream.m:
        raise ValueError(f"declared m={m} does not match the stream's m={stream.m}")
    return analyze_stream(stream, horizon, checkpoints).speed_series()
