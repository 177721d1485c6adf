"""Core lattice-walk types: points, stream metadata, and the increment-bound contract.

Positions live on the integer lattice Z^d.  A walk is a sequence x_0, x_1, ...
whose consecutive steps are bounded in Euclidean norm by a declared integer m.
Streams are produced in numpy blocks so that million-step horizons stay cheap,
but the block size never changes the emitted sequence: replaying a stream with
the same metadata is bit-exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Protocol, Sequence, Union

import numpy as np

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

#: Default number of positions per block yielded by :meth:`WalkStream.blocks`.
DEFAULT_BLOCK = 1 << 16


class DimensionMismatchError(ValueError):
    """Operands live on lattices of different dimension."""


class CoordinateOverflowError(OverflowError):
    """A coordinate left the signed 64-bit range; refusing to wrap."""


class StreamConsumedError(RuntimeError):
    """A single-consumer stream was advanced twice."""


def _checked_i64(value: int) -> int:
    if not (INT64_MIN <= value <= INT64_MAX):
        raise CoordinateOverflowError(f"coordinate {value} outside signed 64-bit range")
    return value


# ---------------------------------------------------------------------------
# Lattice points
# ---------------------------------------------------------------------------

PointLike = Union["LatticePoint", int, Sequence[int]]


@dataclass(frozen=True)
class LatticePoint:
    """A position in Z^d, d >= 1.

    Coordinates are plain Python integers constrained to the signed 64-bit
    range; arithmetic that would leave that range raises
    :class:`CoordinateOverflowError` instead of wrapping.
    """

    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) < 1:
            raise ValueError("LatticePoint needs dimension >= 1")
        object.__setattr__(
            self, "coords", tuple(_checked_i64(int(c)) for c in self.coords)
        )

    @property
    def d(self) -> int:
        return len(self.coords)

    @classmethod
    def origin(cls, d: int = 1) -> "LatticePoint":
        return cls((0,) * d)

    def _require_same_d(self, other: "LatticePoint") -> None:
        if self.d != other.d:
            raise DimensionMismatchError(
                f"dimension mismatch: {self.d} vs {other.d}"
            )

    def __add__(self, other: "LatticePoint") -> "LatticePoint":
        self._require_same_d(other)
        return LatticePoint(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "LatticePoint") -> "LatticePoint":
        self._require_same_d(other)
        return LatticePoint(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def norm_sq(self) -> int:
        """Exact squared Euclidean norm (Python int, never overflows)."""
        return sum(c * c for c in self.coords)

    def __iter__(self):
        return iter(self.coords)


def as_point(value: PointLike) -> LatticePoint:
    """Coerce an int (d=1), coordinate sequence, or LatticePoint to a point."""
    if isinstance(value, LatticePoint):
        return value
    if isinstance(value, (int, np.integer)):
        return LatticePoint((int(value),))
    return LatticePoint(tuple(int(c) for c in value))


def step_norm(a: PointLike, b: PointLike):
    """Euclidean norm of b - a.

    For d = 1 the result is the exact integer |b - a|; for d >= 2 it is a
    float (sqrt of the exact integer squared norm).  Raises
    :class:`DimensionMismatchError` when the points disagree on d.
    """
    pa, pb = as_point(a), as_point(b)
    pa._require_same_d(pb)
    if pa.d == 1:
        return abs(pb.coords[0] - pa.coords[0])
    return math.sqrt((pb - pa).norm_sq())


def step_norm_sq(a: PointLike, b: PointLike) -> int:
    """Exact squared Euclidean norm of b - a (used by the inequality checkers)."""
    pa, pb = as_point(a), as_point(b)
    pa._require_same_d(pb)
    return (pb - pa).norm_sq()


# ---------------------------------------------------------------------------
# Increment-bound validation
# ---------------------------------------------------------------------------


def path_to_array(path) -> np.ndarray:
    """Normalize a path (array, ints, tuples, or LatticePoints) to an int64 array.

    Returns shape (N,) for d = 1 walks and (N, d) otherwise.
    """
    if isinstance(path, np.ndarray):
        arr = path
        if arr.dtype != np.int64:
            if not np.issubdtype(arr.dtype, np.integer):
                raise ValueError("path array must be integer-valued")
            arr = arr.astype(np.int64)
        if arr.ndim not in (1, 2):
            raise ValueError("path array must be 1-D or (N, d)")
        return arr
    points = [as_point(p) for p in path]
    if not points:
        raise ValueError("empty path")
    d = points[0].d
    for p in points[1:]:
        if p.d != d:
            raise DimensionMismatchError("points in path have mixed dimensions")
    if d == 1:
        return np.array([p.coords[0] for p in points], dtype=np.int64)
    return np.array([p.coords for p in points], dtype=np.int64)


def validate_increment_bound(path, m: int) -> Optional[int]:
    """Check that every step of `path` has Euclidean norm <= m.

    Returns None when the bound holds everywhere (confirmation), otherwise
    the smallest index k with ||x_{k+1} - x_k|| > m.

    Raises on an empty path, mixed dimensions, or m < 1.
    """
    if m < 1:
        raise ValueError("increment bound m must be >= 1")
    arr = path_to_array(path)
    if arr.shape[0] == 0:
        raise ValueError("empty path")
    if arr.shape[0] == 1:
        return None
    diffs = np.diff(arr, axis=0)
    if arr.ndim == 1:
        bad = np.abs(diffs) > m
    else:
        d = arr.shape[1]
        # Largest per-coordinate step whose squared sum still fits int64.
        guard = math.isqrt((2**63 - 1) // d)
        if m > guard:
            raise ValueError(f"increment bound m={m} outside the supported range")
        huge = (np.abs(diffs) > guard).any(axis=1)
        sq = np.sum(diffs * diffs, axis=1)
        bad = huge | (sq > m * m)
    if not bad.any():
        return None
    return int(np.argmax(bad))


# ---------------------------------------------------------------------------
# Stream metadata and the stream itself
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WalkMetadata:
    """Provenance and contract data for a walk stream.

    theoretical_drift is only set for generators whose speed
    lim x_n / n is known in closed form (signed for d = 1).
    """

    generator_name: str
    params: dict
    seed: Optional[int]
    m: int
    d: int
    theoretical_drift: Optional[float] = None

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("increment bound m must be >= 1")
        if self.d < 1:
            raise ValueError("dimension d must be >= 1")
        if self.seed is not None and not (0 <= self.seed < 2**64):
            raise ValueError("seed must be an unsigned 64-bit integer")


class IncrementSource(Protocol):
    def take(self, k: int) -> np.ndarray:
        """Return the next k increments, shape (k,) for d=1 else (k, d)."""
        ...


class WalkStream:
    """A single-consumer producer of positions x_0, x_1, x_2, ...

    The stream is defined by its metadata plus a factory for the increment
    source; `clone()` returns a fresh unconsumed stream that replays the
    identical sequence.  Consumption happens through `blocks` (numpy arrays
    whose concatenation is x_0..x_horizon), `positions` (scalars/tuples), or
    `path_array` (one array for the whole prefix).
    """

    def __init__(
        self,
        metadata: WalkMetadata,
        source_factory: Callable[[], IncrementSource],
        origin: Optional[PointLike] = None,
    ):
        self.metadata = metadata
        self._source_factory = source_factory
        self._origin = as_point(origin) if origin is not None else LatticePoint.origin(metadata.d)
        if self._origin.d != metadata.d:
            raise DimensionMismatchError("origin dimension differs from metadata.d")
        self._consumed = False

    @property
    def d(self) -> int:
        return self.metadata.d

    @property
    def m(self) -> int:
        return self.metadata.m

    def clone(self) -> "WalkStream":
        """Fresh unconsumed stream over the identical sequence."""
        return WalkStream(self.metadata, self._source_factory, self._origin)

    def default_horizon(self) -> Optional[int]:
        steps = self.metadata.params.get("steps")
        return int(steps) if steps is not None else None

    # -- consumption ------------------------------------------------------

    def _mark_consumed(self):
        if self._consumed:
            raise StreamConsumedError(
                "stream already consumed; call clone() for a fresh replay"
            )
        self._consumed = True

    def blocks(self, horizon: int, block_size: int = DEFAULT_BLOCK) -> Iterator[np.ndarray]:
        """Yield consecutive position blocks covering x_0 .. x_horizon.

        The first block starts with x_0; concatenating all yielded arrays
        gives the full prefix of horizon + 1 positions.  Block size does not
        affect the values produced.
        """
        if horizon < 0:
            raise ValueError("horizon must be >= 0")
        if block_size < 2:
            raise ValueError("block_size must be >= 2")
        self._mark_consumed()
        source = self._source_factory()
        m = self.metadata.m
        if self.d == 1:
            carry = np.int64(self._origin.coords[0])
        else:
            carry = np.array(self._origin.coords, dtype=np.int64)
        first = True
        remaining = horizon
        while first or remaining > 0:
            n_inc = min(remaining, block_size - 1 if first else block_size)
            # Conservative overflow guard: increments are bounded by m, so the
            # block cannot move farther than n_inc * m from the carry.  Exact
            # Python ints here; numpy abs would wrap on INT64_MIN itself.
            if self.d == 1:
                extent = abs(int(carry))
            else:
                extent = max(abs(int(c)) for c in carry)
            if extent + n_inc * m > INT64_MAX:
                raise CoordinateOverflowError(
                    "walk left the signed 64-bit coordinate range"
                )
            if n_inc > 0:
                inc = source.take(n_inc)
                pos = np.cumsum(inc, axis=0)
                pos += carry
            else:
                pos = np.empty((0,) if self.d == 1 else (0, self.d), dtype=np.int64)
            if first:
                head = np.empty((n_inc + 1,) if self.d == 1 else (n_inc + 1, self.d), dtype=np.int64)
                head[0] = carry
                head[1:] = pos
                pos = head
                first = False
            if pos.shape[0]:
                carry = pos[-1].copy() if self.d > 1 else np.int64(pos[-1])
            remaining -= n_inc
            yield pos

    def positions(self, horizon: int) -> Iterator:
        """Iterate positions as ints (d=1) or coordinate tuples (d>=2)."""
        for block in self.blocks(horizon):
            if self.d == 1:
                yield from (int(v) for v in block)
            else:
                yield from (tuple(int(c) for c in row) for row in block)

    def path_array(self, horizon: int) -> np.ndarray:
        """Materialize x_0..x_horizon as one int64 array."""
        parts = list(self.blocks(horizon))
        return parts[0] if len(parts) == 1 else np.concatenate(parts, axis=0)


# ---------------------------------------------------------------------------
# Array-backed streams (CSV replay, explicit test paths)
# ---------------------------------------------------------------------------


class _ArraySource:
    def __init__(self, diffs: np.ndarray):
        self._diffs = diffs
        self._at = 0

    def take(self, k: int) -> np.ndarray:
        if self._at + k > self._diffs.shape[0]:
            raise ValueError("array-backed stream exhausted beyond its stored path")
        out = self._diffs[self._at : self._at + k]
        self._at += k
        return out


def walk_from_path(
    path,
    m: Optional[int] = None,
    name: str = "path",
    metadata: Optional[WalkMetadata] = None,
) -> WalkStream:
    """Wrap an explicit finite path as a replayable WalkStream.

    If m is omitted it is inferred as the smallest integer bound the data
    satisfies.  The stored path's actual increments are validated against m.
    An explicit `metadata` (e.g. the generator config that produced a CSV)
    replaces the synthesized one; its m must hold for the data.
    """
    arr = path_to_array(path)
    if arr.shape[0] == 0:
        raise ValueError("empty path")
    d = 1 if arr.ndim == 1 else arr.shape[1]
    if arr.shape[0] > 1:
        diffs = np.diff(arr, axis=0)
        if d == 1:
            observed = int(np.max(np.abs(diffs))) if diffs.size else 0
        else:
            worst = int(np.max(np.sum(diffs * diffs, axis=1)))
            observed = math.isqrt(worst)
            if observed * observed < worst:
                observed += 1
    else:
        diffs = np.zeros((0,) if d == 1 else (0, d), dtype=np.int64)
        observed = 0
    if metadata is not None:
        if m is not None and m != metadata.m:
            raise ValueError("m argument conflicts with the supplied metadata")
        bound = metadata.m
        if metadata.d != d:
            raise DimensionMismatchError(
                f"metadata declares d={metadata.d} but the path has d={d}"
            )
    else:
        bound = m if m is not None else max(observed, 1)
    violation = validate_increment_bound(arr, bound)
    if violation is not None:
        raise ValueError(
            f"stored path violates declared increment bound m={bound} at step {violation}"
        )
    meta = metadata or WalkMetadata(
        generator_name=name,
        params={"steps": int(arr.shape[0] - 1)},
        seed=None,
        m=bound,
        d=d,
    )
    origin = int(arr[0]) if d == 1 else tuple(int(c) for c in arr[0])
    return WalkStream(meta, lambda: _ArraySource(diffs), origin=origin)
