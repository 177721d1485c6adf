"""Walk generators: seeded stochastic walks and deterministic counterexample builds.

Stochastic generators draw from numpy's PCG64 and consume exactly one uniform
per step (plus one for a chain's initial state), so replaying a stream with the
same seed is bit-exact no matter how it is blocked.  Deterministic generators
(zigzag tents, scheduled tents, the square spiral, cyclic drift patterns) use
exact integer/rational arithmetic throughout.

Per-trial seeds are derived from a master seed with the SplitMix64 finalizer,
a 64-bit bijection; changing it would break report reproducibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .core import WalkMetadata, WalkStream

_MASK64 = (1 << 64) - 1

#: Largest warm-up exponent for which Eq.-style rational checks stay exact.
_EXACT_EXP_CAP = 1 << 16


class DegeneratePlanError(ValueError):
    """A return-time schedule failed to be strictly increasing / well formed."""


class ReducibleChainError(ValueError):
    """The transition matrix has no unique stationary distribution."""


# ---------------------------------------------------------------------------
# Seeding
# ---------------------------------------------------------------------------


def splitmix64(x: int) -> int:
    """SplitMix64 finalizer; a bijection on 64-bit integers."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix_seed(master_seed: int, index: int) -> int:
    """Per-trial seed: splitmix64(splitmix64(master) + index).

    Injective in `index` for a fixed master seed, so trials never share a
    stream.  This mapping is part of the report-reproducibility contract.
    """
    return splitmix64((splitmix64(master_seed & _MASK64) + index) & _MASK64)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


# ---------------------------------------------------------------------------
# Markov increment chains
# ---------------------------------------------------------------------------


def _is_irreducible(transition: np.ndarray) -> bool:
    """Strong connectivity of the positive-probability transition graph."""
    n = transition.shape[0]
    reach = np.eye(n, dtype=bool) | (transition > 0)
    for _ in range(n):
        nxt = reach | (reach @ reach)
        if np.array_equal(nxt, reach):
            break
        reach = nxt
    return bool(reach.all())


def _validate_stochastic(transition: np.ndarray) -> np.ndarray:
    p = np.asarray(transition, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] != p.shape[1] or p.shape[0] < 1:
        raise ValueError("transition matrix must be square and non-empty")
    if p.shape[0] > 16:
        raise ValueError("transition matrix limited to 16 states")
    if np.any(p < 0) or np.any(p > 1):
        raise ValueError("transition entries must lie in [0, 1]")
    if np.any(np.abs(p.sum(axis=1) - 1.0) > 1e-12):
        raise ValueError("transition rows must sum to 1 within 1e-12")
    return p


def stationary_distribution(transition) -> np.ndarray:
    """Unique pi with pi P = pi and sum(pi) = 1, residual <= 1e-10.

    Solved directly (replace one balance equation by the normalization); a
    damped power iteration is kept as a fallback for ill-conditioned input.
    Raises :class:`ReducibleChainError` when the chain is reducible.
    """
    p = _validate_stochastic(transition)
    if not _is_irreducible(p):
        raise ReducibleChainError("chain is reducible: no unique stationary distribution")
    n = p.shape[0]

    def _residual(pi):
        return float(np.max(np.abs(pi @ p - pi)))

    a = p.T - np.eye(n)
    a[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    try:
        pi = np.linalg.solve(a, rhs)
    except np.linalg.LinAlgError:
        pi = None
    if pi is not None:
        pi = np.clip(pi, 0.0, None)
        total = pi.sum()
        if total > 0:
            pi = pi / total
            if _residual(pi) <= 1e-10 and abs(pi.sum() - 1.0) <= 1e-12:
                return pi
    # Damped iteration x <- x (P + I)/2 converges for any irreducible chain.
    pi = np.full(n, 1.0 / n)
    for _ in range(1_000_000):
        nxt = 0.5 * (pi + pi @ p)
        if np.max(np.abs(nxt - pi)) < 1e-15:
            pi = nxt
            break
        pi = nxt
    pi = np.clip(pi, 0.0, None)
    pi = pi / pi.sum()
    if _residual(pi) > 1e-10:
        raise RuntimeError("stationary distribution failed to reach residual 1e-10")
    return pi


@dataclass(frozen=True, eq=False)
class MarkovIncrementChain:
    """Finite-state chain whose states are walk increments in {-1, 0, +1}.

    Started from its stationary distribution (the default) the sampled
    increments form a stationary ergodic sequence with mean
    ``sum(pi[s] * state[s])``.
    """

    states: tuple
    transition: np.ndarray
    initial: Optional[np.ndarray] = None

    def __post_init__(self):
        states = tuple(int(s) for s in self.states)
        if not states:
            raise ValueError("chain needs at least one state")
        if any(s not in (-1, 0, 1) for s in states):
            raise ValueError("chain states must be increments in {-1, 0, +1}")
        p = _validate_stochastic(self.transition)
        if p.shape[0] != len(states):
            raise ValueError("transition size does not match the state list")
        if not _is_irreducible(p):
            raise ReducibleChainError("chain is reducible")
        init = self.initial
        if init is not None:
            init = np.asarray(init, dtype=np.float64)
            if init.shape != (len(states),):
                raise ValueError("initial distribution has wrong length")
            if np.any(init < 0) or abs(init.sum() - 1.0) > 1e-12:
                raise ValueError("initial distribution must be a probability vector")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "transition", p)
        object.__setattr__(self, "initial", init)

    @property
    def n_states(self) -> int:
        return len(self.states)

    @cached_property
    def stationary(self) -> np.ndarray:
        return stationary_distribution(self.transition)

    @property
    def drift(self) -> float:
        """Stationary mean increment."""
        return float(self.stationary @ np.asarray(self.states, dtype=np.float64))

    def start_distribution(self) -> np.ndarray:
        return self.stationary if self.initial is None else self.initial

    @classmethod
    def iid(cls, p_up: float, p_down: Optional[float] = None) -> "MarkovIncrementChain":
        """I.i.d. increments: every row equal, states (+1, -1)."""
        if p_down is None:
            p_down = 1.0 - p_up
        if not math.isclose(p_up + p_down, 1.0, abs_tol=1e-12):
            raise ValueError("iid weights must sum to 1")
        row = [p_up, p_down]
        return cls(states=(1, -1), transition=np.array([row, row]))

    @classmethod
    def two_state(cls, p_up_to_down: float, p_down_to_up: float) -> "MarkovIncrementChain":
        """States (+1, -1) with the given switch probabilities."""
        a, b = float(p_up_to_down), float(p_down_to_up)
        t = np.array([[1.0 - a, a], [b, 1.0 - b]])
        return cls(states=(1, -1), transition=t)


# State-sequence gather: s_{k+1} = nxt[s_k, k].  Inherently sequential; jitted
# through numba when available, with a pure-Python fallback that computes the
# identical integers.
_GATHER = None


def _build_gather():
    def gather(nxt, s0):  # pragma: no cover - replaced by jit when numba present
        n = nxt.shape[1]
        out = np.empty(n, dtype=np.int64)
        s = s0
        for k in range(n):
            s = nxt[s, k]
            out[k] = s
        return out

    try:
        from numba import njit

        return njit(cache=False, nogil=True)(gather)
    except ImportError:
        def gather_py(nxt, s0):
            rows = nxt.tolist()
            n = nxt.shape[1]
            out = [0] * n
            s = int(s0)
            for k in range(n):
                s = rows[s][k]
                out[k] = s
            return np.asarray(out, dtype=np.int64)

        return gather_py


def _gather_states(nxt: np.ndarray, s0: int) -> np.ndarray:
    global _GATHER
    if _GATHER is None:
        _GATHER = _build_gather()
    return _GATHER(nxt, s0)


# ---------------------------------------------------------------------------
# Increment sources
# ---------------------------------------------------------------------------


class _SimpleRWSource:
    def __init__(self, p: float, seed: int):
        self._p = p
        self._rng = _rng(seed)

    def take(self, k: int) -> np.ndarray:
        u = self._rng.random(k)
        return np.where(u < self._p, 1, -1).astype(np.int64)


class _LazyWalkSource:
    """Increments 0 with probability alpha, else +-1 equally; one uniform/step."""

    def __init__(self, alpha: float, seed: int):
        self._alpha = alpha
        self._rng = _rng(seed)

    def take(self, k: int) -> np.ndarray:
        u = self._rng.random(k)
        up = self._alpha + (1.0 - self._alpha) / 2.0
        out = np.where(u < self._alpha, 0, np.where(u < up, 1, -1))
        return out.astype(np.int64)


class _ReflectedSource:
    """Reflected-at-zero chain: from 0 step +1 surely, from x>0 step +-1 equally.

    Realized as |S_n| for a simple symmetric walk S_n, which is a Markov chain
    with exactly these transition probabilities.
    """

    def __init__(self, seed: int):
        self._rng = _rng(seed)
        self._s = 0

    def take(self, k: int) -> np.ndarray:
        u = self._rng.random(k)
        z = np.where(u < 0.5, 1, -1).astype(np.int64)
        s = np.cumsum(z)
        s += self._s
        prev_abs = abs(self._s)
        self._s = int(s[-1])
        a = np.abs(s)
        out = np.empty(k, dtype=np.int64)
        out[0] = a[0] - prev_abs
        np.subtract(a[1:], a[:-1], out=out[1:])
        return out


class _ChainSource:
    def __init__(self, chain: MarkovIncrementChain, seed: int):
        self._rng = _rng(seed)
        self._labels = np.asarray(chain.states, dtype=np.int64)
        self._cum = np.cumsum(chain.transition, axis=1)
        self._cum_init = np.cumsum(chain.start_distribution())
        self._state: Optional[int] = None

    def _pick(self, cum: np.ndarray, u: float) -> int:
        return int(min(np.searchsorted(cum, u, side="right"), len(cum) - 1))

    def take(self, k: int) -> np.ndarray:
        if self._state is None:
            self._state = self._pick(self._cum_init, float(self._rng.random()))
        u = self._rng.random(k)
        n_states = self._cum.shape[0]
        nxt = np.empty((n_states, k), dtype=np.int64)
        for s in range(n_states):
            nxt[s] = np.searchsorted(self._cum[s], u, side="right")
        np.minimum(nxt, n_states - 1, out=nxt)
        seq = _gather_states(nxt, self._state)
        self._state = int(seq[-1])
        return self._labels[seq]


class _TentSource:
    """Rise/flat/fall increments between scheduled zero times.

    `zero_time(j)` must return the j-th zero in a strictly increasing
    sequence with zero_time(0) == 0.  A gap g contributes g//2 rising steps,
    one flat step iff g is odd, and g//2 falling steps, so the walk is back
    at 0 exactly at each scheduled time.
    """

    def __init__(self, zero_time):
        self._zero_time = zero_time
        self._pos = 0
        self._j = 0
        self._a = self._expect_zero(0)
        if self._a != 0:
            raise DegeneratePlanError("schedule must start at time 0")
        self._b = self._expect_zero(1)

    def _expect_zero(self, j: int) -> int:
        return int(self._zero_time(j))

    def _advance_excursion(self):
        self._j += 1
        self._a = self._b
        self._b = self._expect_zero(self._j + 1)
        if self._b <= self._a:
            raise DegeneratePlanError(
                f"return-time schedule not strictly increasing at index {self._j + 1}"
            )

    def take(self, k: int) -> np.ndarray:
        out = np.empty(k, dtype=np.int64)
        filled = 0
        while filled < k:
            if self._pos >= self._b:
                self._advance_excursion()
            g = self._b - self._a
            half = g // 2
            local = self._pos - self._a
            n = min(k - filled, g - local)
            span = slice(filled, filled + n)
            j = np.arange(local, local + n)
            out[span] = np.where(j < half, 1, np.where(j < g - half, 0, -1))
            self._pos += n
            filled += n
        return out


class _SpiralSource:
    _DIRS = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=np.int64)

    def __init__(self):
        self._leg = 0          # counts completed legs; run length = leg // 2 + 1
        self._done_in_leg = 0

    def take(self, k: int) -> np.ndarray:
        out = np.empty((k, 2), dtype=np.int64)
        filled = 0
        while filled < k:
            run = self._leg // 2 + 1
            n = min(k - filled, run - self._done_in_leg)
            out[filled : filled + n] = self._DIRS[self._leg % 4]
            self._done_in_leg += n
            filled += n
            if self._done_in_leg == run:
                self._leg += 1
                self._done_in_leg = 0
        return out


class _CycleSource:
    def __init__(self, pattern: np.ndarray):
        self._pattern = pattern
        self._phase = 0

    def take(self, k: int) -> np.ndarray:
        idx = (self._phase + np.arange(k)) % len(self._pattern)
        self._phase = (self._phase + k) % len(self._pattern)
        return self._pattern[idx]


# ---------------------------------------------------------------------------
# Zigzag plans (recurrent-yet-fast tents)
# ---------------------------------------------------------------------------


def _eq1_holds(ell: Fraction, n: int) -> bool:
    """Exact test of ((1+l)/(1-l))^n * (2l/(1-l)) > 1."""
    a, b = ell.numerator, ell.denominator
    if n > _EXACT_EXP_CAP:
        # Beyond the exact cap the float-log form is decisive to far more
        # than one integer of slack.
        q = math.log1p(2 * a / (b - a))
        return n * q + math.log(2 * a) - math.log(b - a) > 0
    return (b + a) ** n * 2 * a > (b - a) ** (n + 1)


def compute_n0(ell: float) -> int:
    """Minimal integer n0 >= 0 with ((1+l)/(1-l))^n0 * (2l/(1-l)) > 1.

    Exact rational arithmetic on the binary value of `ell`.  Values of ell so
    small that n0 would exceed ~65000 are rejected: the resulting plan's
    first return time is astronomically large and exact floors become
    impractical.
    """
    if not (0.0 < ell < 1.0):
        raise ValueError(f"ell must lie in (0, 1), got {ell}")
    f = Fraction(ell)
    if _eq1_holds(f, 0):
        return 0
    q = (1 + f) / (1 - f)
    est = math.log((1 - ell) / (2 * ell)) / math.log(float(q))
    hi = max(1, math.ceil(est) + 2)
    if hi > _EXACT_EXP_CAP:
        raise ValueError(f"ell={ell} too small for a practical plan (n0 > {_EXACT_EXP_CAP})")
    while not _eq1_holds(f, hi):
        hi = hi * 2
        if hi > _EXACT_EXP_CAP:
            raise ValueError(f"ell={ell} too small for a practical plan (n0 > {_EXACT_EXP_CAP})")
    lo = 0  # known to fail
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _eq1_holds(f, mid):
            hi = mid
        else:
            lo = mid
    return hi


def _zigzag_tau_fn(ell: float, n0: int):
    """Exact tau_n for the plan: closed form 2*3^n at ell=1/2, else 2*floor(q^(n+n0))."""
    if ell == 0.5:
        return lambda n: 2 * 3**n
    f = Fraction(ell)
    q = (1 + f) / (1 - f)

    def tau(n: int) -> int:
        power = q ** (n + n0)
        return 2 * (power.numerator // power.denominator)

    return tau


@dataclass(frozen=True)
class ZigzagPlan:
    """Return times and peak times for a zigzag tent walk.

    tau lists the scheduled zeros tau_0 < tau_1 < ... (all even); t lists the
    peak times t_n = (tau_n + tau_{n-1}) / 2 with tau_{-1} = 0.  The warm-up
    exponent n0 satisfies the validity inequality exactly.
    """

    ell: float
    n0: int
    tau: tuple
    t: tuple

    def __post_init__(self):
        if not (0.0 < self.ell < 1.0):
            raise DegeneratePlanError("ell must lie in (0, 1)")
        tau = tuple(int(v) for v in self.tau)
        t = tuple(int(v) for v in self.t)
        if not tau or len(t) != len(tau):
            raise DegeneratePlanError("plan needs matching non-empty tau and t lists")
        prev = 0
        for i, v in enumerate(tau):
            if v % 2:
                raise DegeneratePlanError(f"tau[{i}] = {v} is odd")
            if i > 0 and v <= tau[i - 1]:
                raise DegeneratePlanError(f"tau not strictly increasing at index {i}")
            if t[i] != (v + prev) // 2:
                raise DegeneratePlanError(f"t[{i}] inconsistent with tau")
            if not (prev < t[i] < v):
                raise DegeneratePlanError(f"t[{i}] outside its excursion")
            prev = v
        if tau[0] < 2:
            raise DegeneratePlanError("tau_0 must be a positive even time")
        if not _eq1_holds(Fraction(self.ell), self.n0):
            raise DegeneratePlanError("(ell, n0) violates the validity inequality")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "t", t)

    # -- exact formula evaluation (no iteration) --------------------------

    def tau_at(self, n: int) -> int:
        """tau_n by direct formula (n = -1 gives the conventional 0)."""
        if n < 0:
            return 0
        return _zigzag_tau_fn(self.ell, self.n0)(n)

    def t_at(self, n: int) -> int:
        return (self.tau_at(n) + self.tau_at(n - 1)) // 2

    def position_at(self, k: int) -> int:
        """x_k evaluated from the piecewise formula, exact for any k >= 0."""
        if k < 0:
            raise ValueError("k must be >= 0")
        n = 0
        while self.tau_at(n) <= k:
            n += 1
        a, b = self.tau_at(n - 1), self.tau_at(n)
        t = (a + b) // 2
        return k - a if k < t else b - k

    def peak_ratio(self, n: int) -> Fraction:
        """x_{t_n} / t_n as an exact rational."""
        a, b = self.tau_at(n - 1), self.tau_at(n)
        return Fraction(b - a, b + a)


def zigzag_plan(ell: float, steps: int) -> ZigzagPlan:
    """Plan whose tau entries cover x_0..x_steps (always at least one entry)."""
    n0 = compute_n0(ell)
    tau_fn = _zigzag_tau_fn(ell, n0)
    tau = []
    t = []
    prev = 0
    n = 0
    while True:
        v = tau_fn(n)
        if v <= prev:
            raise DegeneratePlanError(
                f"tau not strictly increasing after flooring at n={n} (ell={ell})"
            )
        tau.append(v)
        t.append((v + prev) // 2)
        prev = v
        n += 1
        if v >= steps:
            break
    return ZigzagPlan(ell=ell, n0=n0, tau=tuple(tau), t=tuple(t))


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def gen_simple_rw(p: float, steps: int, seed: int) -> WalkStream:
    """Simple random walk on Z: +1 with probability p, else -1; x_0 = 0."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p must lie in [0, 1], got {p}")
    meta = WalkMetadata(
        generator_name="srw",
        params={"p": float(p), "steps": int(steps)},
        seed=int(seed),
        m=1,
        d=1,
        theoretical_drift=2.0 * p - 1.0,
    )
    return WalkStream(meta, lambda: _SimpleRWSource(p, seed))


def gen_ergodic_walk(chain: MarkovIncrementChain, steps: int, seed: int) -> WalkStream:
    """Partial sums of a stationary finite-state Markov increment chain.

    The chain starts from its stationary distribution unless an explicit
    initial distribution was supplied, and the drift metadata is the
    stationary mean increment either way.
    """
    meta = WalkMetadata(
        generator_name="ergodic",
        params={
            "states": list(chain.states),
            "transition": [list(map(float, row)) for row in chain.transition],
            "steps": int(steps),
        },
        seed=int(seed),
        m=1,
        d=1,
        theoretical_drift=chain.drift,
    )
    return WalkStream(meta, lambda: _ChainSource(chain, seed))


_BD_PRESETS = ("symmetric", "lazy", "reflected")


def gen_birth_death(preset: str, steps: int, seed: int, alpha: Optional[float] = None) -> WalkStream:
    """Birth-death style chain on Z with increments in {-1, 0, +1}; x_0 = 0.

    Presets: ``symmetric`` (+-1 equally), ``lazy`` (stay with probability
    alpha, else +-1 equally; alpha in [0, 1)), ``reflected`` (from 0 step +1
    surely, otherwise +-1 equally).  ``lazy:0.3`` style strings are accepted.
    """
    name = preset
    if ":" in preset:
        name, _, arg = preset.partition(":")
        if alpha is not None:
            raise ValueError("alpha given both inline and as a keyword")
        alpha = float(arg)
    if name not in _BD_PRESETS:
        raise ValueError(f"unknown birth-death preset {preset!r}")
    params = {"preset": name, "steps": int(steps)}
    if name == "lazy":
        if alpha is None:
            raise ValueError("lazy preset needs alpha")
        if not (0.0 <= alpha < 1.0):
            raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
        params["alpha"] = float(alpha)
        factory = lambda: _LazyWalkSource(alpha, seed)
    elif name == "symmetric":
        if alpha is not None:
            raise ValueError("symmetric preset takes no alpha")
        factory = lambda: _SimpleRWSource(0.5, seed)
    else:
        if alpha is not None:
            raise ValueError("reflected preset takes no alpha")
        factory = lambda: _ReflectedSource(seed)
    meta = WalkMetadata(
        generator_name="birth-death",
        params=params,
        seed=int(seed),
        m=1,
        d=1,
        theoretical_drift=0.0,
    )
    return WalkStream(meta, factory)


def gen_zigzag(ell: float, steps: int):
    """Deterministic tent walk returning to 0 at the plan's tau times.

    Returns (stream, plan).  Rises by +1 on [tau_{n-1}, t_n), falls by -1 on
    [t_n, tau_n); consuming the stream past `steps` extends the plan rule
    transparently.
    """
    plan = zigzag_plan(ell, steps)
    tau_fn = _zigzag_tau_fn(ell, plan.n0)

    def zero_time(j: int) -> int:
        return 0 if j == 0 else tau_fn(j - 1)

    meta = WalkMetadata(
        generator_name="zigzag",
        params={"ell": float(ell), "steps": int(steps), "n0": plan.n0},
        seed=None,
        m=1,
        d=1,
        theoretical_drift=None,
    )
    return WalkStream(meta, lambda: _TentSource(zero_time)), plan


def _parse_tau_rule(tau_rule: str, c: Optional[float]):
    name = tau_rule
    if ":" in tau_rule:
        name, _, arg = tau_rule.partition(":")
        if c is not None:
            raise ValueError("c given both inline and as a keyword")
        c = float(arg)
    if name == "squares":
        if c is not None:
            raise ValueError("squares rule takes no parameter")
        return "squares", None
    if name == "geometric":
        if c is None:
            raise ValueError("geometric rule needs c")
        if not c > 1.0:
            raise ValueError(f"geometric c must exceed 1, got {c}")
        return "geometric", float(c)
    raise ValueError(f"unknown tau rule {tau_rule!r}")


def gen_tau_tent(tau_rule: str, steps: int, c: Optional[float] = None) -> WalkStream:
    """Tent excursions between scheduled zeros.

    ``squares`` pins zeros at 0, 1, 4, 9, ...; ``geometric:<c>`` at 0 and
    2*ceil(c^k) for k >= 0.  Odd gaps get one flat step at the peak so the
    walk still returns to 0 exactly on schedule with increments in {-1,0,+1}.
    """
    name, cc = _parse_tau_rule(tau_rule, c)
    if name == "squares":
        zero_time = lambda j: j * j
    else:
        frac_c = Fraction(cc)

        def zero_time(j: int) -> int:
            if j == 0:
                return 0
            power = frac_c ** (j - 1)
            return 2 * (-((-power.numerator) // power.denominator))  # 2*ceil

    # Validate the schedule over the declared horizon up front.
    prev = 0
    j = 1
    while True:
        v = zero_time(j)
        if v <= prev:
            raise DegeneratePlanError(
                f"return-time schedule not strictly increasing at index {j}"
            )
        prev = v
        j += 1
        if v >= steps:
            break
    params = {"tau_rule": name, "steps": int(steps)}
    if cc is not None:
        params["c"] = cc
    meta = WalkMetadata(
        generator_name="tau-tent",
        params=params,
        seed=None,
        m=1,
        d=1,
        theoretical_drift=0.0 if name == "squares" else None,
    )
    return WalkStream(meta, lambda: _TentSource(zero_time))


def gen_spiral2d(steps: int) -> WalkStream:
    """Square spiral on Z^2 with unit axis steps and no repeated vertex."""
    meta = WalkMetadata(
        generator_name="spiral2d",
        params={"steps": int(steps)},
        seed=None,
        m=1,
        d=2,
        theoretical_drift=0.0,
    )
    return WalkStream(meta, _SpiralSource)


def gen_linear_drift(m: int, pattern: Sequence[int], steps: int) -> WalkStream:
    """Cyclic repetition of a fixed step pattern; drift is the pattern mean."""
    if m < 1:
        raise ValueError("m must be >= 1")
    pat = [int(v) for v in pattern]
    if not pat:
        raise ValueError("pattern must be non-empty")
    for v in pat:
        if abs(v) > m:
            raise ValueError(f"pattern entry {v} exceeds the bound m={m}")
    meta = WalkMetadata(
        generator_name="linear-drift",
        params={"m": int(m), "pattern": pat, "steps": int(steps)},
        seed=None,
        m=int(m),
        d=1,
        theoretical_drift=sum(pat) / len(pat),
    )
    arr = np.asarray(pat, dtype=np.int64)
    return WalkStream(meta, lambda: _CycleSource(arr))


# ---------------------------------------------------------------------------
# Flat-config factory (CLI / experiment provenance records)
# ---------------------------------------------------------------------------


def _parse_chain_preset(preset: str) -> MarkovIncrementChain:
    name, _, arg = preset.partition(":")
    if name == "switch":
        a, b = (float(v) for v in arg.split(","))
        return MarkovIncrementChain.two_state(a, b)
    if name == "iid":
        return MarkovIncrementChain.iid(float(arg))
    raise ValueError(f"unknown ergodic preset {preset!r}")


def make_walk(config: dict, seed: Optional[int] = None) -> WalkStream:
    """Build a stream from a flat generator-config record.

    Recognized keys: gen, steps, seed, and per-generator parameters (p, ell,
    preset, tau_rule, pattern, m).  `seed` overrides the record's seed, which
    is how the Monte Carlo harness injects per-trial seeds.
    """
    cfg = dict(config)
    gen = cfg.get("gen")
    steps = int(cfg.get("steps", 0) or 0)
    if steps < 1:
        raise ValueError("config needs steps >= 1")
    if seed is None:
        seed = cfg.get("seed")
    if gen == "srw":
        return gen_simple_rw(float(cfg["p"]), steps, _need_seed(seed))
    if gen == "ergodic":
        chain = _parse_chain_preset(str(cfg["preset"]))
        return gen_ergodic_walk(chain, steps, _need_seed(seed))
    if gen == "birth-death":
        return gen_birth_death(str(cfg["preset"]), steps, _need_seed(seed))
    if gen == "zigzag":
        stream, _ = gen_zigzag(float(cfg["ell"]), steps)
        return stream
    if gen == "tau-tent":
        return gen_tau_tent(str(cfg["tau_rule"]), steps)
    if gen == "spiral2d":
        return gen_spiral2d(steps)
    if gen == "linear-drift":
        pattern = cfg["pattern"]
        if isinstance(pattern, str):
            pattern = [int(v) for v in pattern.split(",")]
        return gen_linear_drift(int(cfg.get("m", 1)), pattern, steps)
    raise ValueError(f"unknown generator {gen!r}")


def is_stochastic(config: dict) -> bool:
    return config.get("gen") in ("srw", "ergodic", "birth-death")


def _need_seed(seed) -> int:
    if seed is None:
        raise ValueError("stochastic generator needs a seed")
    return int(seed)
