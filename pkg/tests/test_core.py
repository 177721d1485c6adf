"""Core types: points, norms, increment bounds, stream replay contracts."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rangewalk.core import (
    INT64_MAX,
    CoordinateOverflowError,
    DimensionMismatchError,
    LatticePoint,
    StreamConsumedError,
    WalkMetadata,
    WalkStream,
    step_norm,
    step_norm_sq,
    validate_increment_bound,
    walk_from_path,
)
from rangewalk.generators import gen_simple_rw, gen_spiral2d


class TestLatticePoint:
    def test_construction_and_d(self):
        p = LatticePoint((3, -4))
        assert p.d == 2
        assert p.coords == (3, -4)
        assert LatticePoint.origin(3).coords == (0, 0, 0)

    def test_zero_dimension_rejected(self):
        with pytest.raises(ValueError):
            LatticePoint(())

    def test_arithmetic(self):
        a = LatticePoint((1, 2))
        b = LatticePoint((3, -1))
        assert (a + b).coords == (4, 1)
        assert (b - a).coords == (2, -3)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            LatticePoint((1,)) + LatticePoint((1, 2))

    def test_overflow_is_an_error_not_a_wrap(self):
        big = LatticePoint((INT64_MAX,))
        with pytest.raises(CoordinateOverflowError):
            big + LatticePoint((1,))
        with pytest.raises(CoordinateOverflowError):
            LatticePoint((INT64_MAX + 1,))


class TestStepNorm:
    def test_d1_exact_integer(self):
        assert step_norm(0, -3) == 3
        assert isinstance(step_norm(0, -3), int)

    def test_345_triangle(self):
        assert step_norm((0, 0), (3, 4)) == 5.0

    def test_identity(self):
        assert step_norm((1, 1), (1, 1)) == 0

    def test_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            step_norm(0, (1, 2))

    @given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
    def test_symmetric_1d(self, a, b):
        assert step_norm(a, b) == step_norm(b, a)

    @given(
        st.tuples(st.integers(-1000, 1000), st.integers(-1000, 1000)),
        st.tuples(st.integers(-1000, 1000), st.integers(-1000, 1000)),
        st.tuples(st.integers(-1000, 1000), st.integers(-1000, 1000)),
    )
    def test_triangle_inequality_2d(self, a, b, c):
        assert step_norm(a, c) <= step_norm(a, b) + step_norm(b, c) + 1e-9

    @given(st.integers(-1000, 1000), st.integers(-1000, 1000))
    def test_norm_sq_consistent(self, a, b):
        assert step_norm_sq(a, b) == step_norm(a, b) ** 2


class TestValidateIncrementBound:
    def test_unit_steps_confirmed(self):
        assert validate_increment_bound([0, 1, 0, -1], 1) is None

    def test_violation_index(self):
        assert validate_increment_bound([0, 2, 5], 2) == 1

    def test_2d_unit_steps(self):
        assert validate_increment_bound([(0, 0), (1, 0), (1, 1)], 1) is None

    def test_empty_path(self):
        with pytest.raises(ValueError):
            validate_increment_bound([], 1)

    def test_mixed_dimensions(self):
        with pytest.raises(DimensionMismatchError):
            validate_increment_bound([LatticePoint((0,)), LatticePoint((0, 0))], 1)

    def test_single_point_holds(self):
        assert validate_increment_bound([5], 1) is None

    def test_numpy_2d_violation(self):
        path = np.array([[0, 0], [1, 1], [4, 4]])
        assert validate_increment_bound(path, 2) == 1


class TestWalkStream:
    def test_replay_identical_prefixes_100k(self):
        a = gen_simple_rw(0.5, 10**5, 20240101).path_array(10**5)
        b = gen_simple_rw(0.5, 10**5, 20240101).path_array(10**5)
        assert np.array_equal(a, b)

    def test_block_size_never_changes_the_sequence(self):
        ref = gen_simple_rw(0.5, 0, 99).path_array(5000)
        for bs in (2, 7, 64, 4096):
            got = np.concatenate(list(gen_simple_rw(0.5, 0, 99).blocks(5000, block_size=bs)))
            assert np.array_equal(ref, got)

    def test_single_consumer(self):
        s = gen_simple_rw(0.5, 10, 1)
        s.path_array(10)
        with pytest.raises(StreamConsumedError):
            s.path_array(10)
        assert s.clone().path_array(10).shape == (11,)

    def test_blocks_cover_horizon(self):
        s = gen_spiral2d(100)
        blocks = list(s.blocks(100, block_size=17))
        total = sum(b.shape[0] for b in blocks)
        assert total == 101
        assert blocks[0][0].tolist() == [0, 0]

    def test_horizon_zero(self):
        s = gen_simple_rw(0.5, 0, 1)
        assert s.path_array(0).tolist() == [0]

    def test_overflow_guard_trips(self):
        class Up:
            def take(self, k):
                return np.ones(k, dtype=np.int64)

        meta = WalkMetadata("up", {}, None, m=1, d=1)
        s = WalkStream(meta, Up, origin=INT64_MAX - 3)
        with pytest.raises(CoordinateOverflowError):
            s.path_array(10)


class TestWalkFromPath:
    def test_infers_bound(self):
        s = walk_from_path([0, 2, 4, 1])
        assert s.m == 3
        assert s.d == 1

    def test_declared_bound_validated(self):
        with pytest.raises(ValueError, match="step 1"):
            walk_from_path([0, 1, 5], m=1)

    def test_replays_the_data(self):
        s = walk_from_path([(0, 0), (1, 0), (1, 1)], m=1)
        assert s.path_array(2).tolist() == [[0, 0], [1, 0], [1, 1]]

    def test_nonzero_origin(self):
        s = walk_from_path([5, 6, 5], m=1)
        assert s.path_array(2).tolist() == [5, 6, 5]

    def test_metadata_conflict(self):
        meta = WalkMetadata("x", {}, None, m=2, d=1)
        with pytest.raises(ValueError):
            walk_from_path([0, 1], m=1, metadata=meta)


class TestWalkMetadata:
    def test_validation(self):
        with pytest.raises(ValueError):
            WalkMetadata("g", {}, None, m=0, d=1)
        with pytest.raises(ValueError):
            WalkMetadata("g", {}, None, m=1, d=0)
        with pytest.raises(ValueError):
            WalkMetadata("g", {}, seed=2**64, m=1, d=1)
