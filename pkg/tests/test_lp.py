import numpy as np
import pytest

from l1fixed.errors import InputError, ResourceError
from l1fixed import lp as lpmod
from l1fixed.lp import (LinearProgram, Status, build_chebyshev_lp, duality_violation, primal_violation,
                        solve_lp)
from l1fixed.oracles import grid_minimax_l1
from l1fixed.spaces import SpaceSpec


def _lp(c, A, rel, b, free=None):
    c = np.asarray(c, dtype=float)
    return LinearProgram(c, A, rel, b, np.zeros(c.shape, bool) if free is None else free)


def test_textbook_lp():
    # max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
    p = _lp([-3, -5], [[1, 0], [0, 2], [3, 2]], ("<=",) * 3, [4, 12, 18])
    sol = solve_lp(p)
    assert sol.status is Status.OPTIMAL
    assert sol.value == pytest.approx(-36.0, abs=1e-12)
    np.testing.assert_allclose(sol.primal, [2.0, 6.0], atol=1e-12)
    assert duality_violation(p, sol) <= 1e-9


def test_equality_and_free_variables():
    # min x + y with x - y = 1, x free, y >= 0 -> y = 0? x + y = 1 + 2y, so y = 0, value 1
    p = _lp([1, 1], [[1, -1]], ("=",), [1.0], free=np.array([True, False]))
    sol = solve_lp(p)
    assert sol.value == pytest.approx(1.0)
    np.testing.assert_allclose(sol.primal, [1.0, 0.0], atol=1e-12)
    assert duality_violation(p, sol) <= 1e-9


def test_negative_rhs_needs_phase_one():
    # min x s.t. -x <= -3
    p = _lp([1.0], [[-1.0]], ("<=",), [-3.0])
    sol = solve_lp(p)
    assert sol.value == pytest.approx(3.0)


def test_infeasible_and_unbounded():
    p = _lp([1.0], [[1.0], [-1.0]], ("<=", "<="), [1.0, -2.0])
    assert solve_lp(p).status is Status.INFEASIBLE
    q = _lp([-1.0], [[-1.0]], ("<=",), [0.0])
    assert solve_lp(q).status is Status.UNBOUNDED


def test_redundant_equalities():
    p = _lp([1.0, 2.0], [[1.0, 1.0], [2.0, 2.0]], ("=", "="), [1.0, 2.0])
    sol = solve_lp(p)
    assert sol.status is Status.OPTIMAL and sol.value == pytest.approx(1.0)


def test_bad_shapes_rejected():
    with pytest.raises(InputError):
        _lp([1.0, 2.0], [[1.0]], ("<=",), [1.0])
    with pytest.raises(InputError):
        _lp([1.0], [[1.0]], ("<",), [1.0])
    with pytest.raises(InputError):
        _lp([np.inf], [[1.0]], ("<=",), [1.0])


def test_chebyshev_lp_two_point_example():
    space = SpaceSpec.weighted_l1([0.5, 0.5])
    p = build_chebyshev_lp(space, [[0.0, 0.0], [1.0, 1.0]])
    sol = solve_lp(p)
    assert sol.value == pytest.approx(0.5, abs=1e-12)
    assert primal_violation(p, sol.primal) <= 1e-12
    assert duality_violation(p, sol) <= 1e-9


def test_chebyshev_lp_frozen_value():
    # computed once and frozen; the grid oracle agrees to 1e-10
    space = SpaceSpec.weighted_l1([1.0, 2.0, 0.5])
    A = [[0.0, 0.0, 0.0], [3.0, 1.0, -2.0], [-1.0, 2.0, 4.0], [2.0, -1.0, 1.0]]
    sol = solve_lp(build_chebyshev_lp(space, A))
    assert sol.value == pytest.approx(5.25, abs=1e-12)
    assert grid_minimax_l1(space.weights, A) == pytest.approx(5.25, abs=1e-10)


def test_random_instances_against_grid_oracle(rng):
    for _ in range(50):
        n = int(rng.integers(1, 4))
        space = SpaceSpec.weighted_l1(rng.uniform(0.2, 3.0, size=n))
        A = rng.normal(size=(int(rng.integers(2, 7)), n)) * 3
        p = build_chebyshev_lp(space, A)
        sol = solve_lp(p)
        assert sol.value == pytest.approx(grid_minimax_l1(space.weights, A), abs=1e-6)
        assert duality_violation(p, sol) <= 1e-8 * max(1.0, sol.value)


def test_scale_equivariance(rng):
    space = SpaceSpec.weighted_l1([1.0, 0.7, 2.0])
    A = rng.normal(size=(6, 3))
    base = solve_lp(build_chebyshev_lp(space, A)).value
    for s in (0.5, 2.0, 10.0):
        assert solve_lp(build_chebyshev_lp(space, s * A)).value == pytest.approx(s * base, rel=1e-10)


def test_deterministic(rng):
    space = SpaceSpec.weighted_l1([1.0, 0.7, 2.0, 1.5])
    A = rng.normal(size=(8, 4))
    p = build_chebyshev_lp(space, A)
    a, b = solve_lp(p), solve_lp(p)
    np.testing.assert_array_equal(a.primal, b.primal)
    assert a.basis == b.basis and a.iterations == b.iterations


def test_iteration_cap(monkeypatch):
    monkeypatch.setattr(lpmod, "MAX_ITER", 1)
    space = SpaceSpec.weighted_l1([1.0, 2.0])
    with pytest.raises(ResourceError):
        solve_lp(build_chebyshev_lp(space, [[0, 0], [1, 2], [3, -1]]))


def test_dump_lists_every_row():
    p = build_chebyshev_lp(SpaceSpec.weighted_l1([1.0]), [[0.0], [2.0]])
    text = p.dump()
    lines = text.splitlines()
    assert lines[0] == "minimize +1 r"
    assert len(lines) == 1 + p.shape[0] + 1
    assert lines[-1] == "free v0 r"
    assert p.dump() == text
