import numpy as np
import pytest

from l1fixed.errors import InputError
from l1fixed.oracles import random_unitary, singular_values_charpoly
from l1fixed.spaces import (SpaceSpec, diameter, distances, embed_direct_sum, matrix_to_point, norm,
                            norms, point_to_matrix, singular_values, split_direct_sum, svd,
                            trace_norm)


def test_weighted_l1_norm_example():
    space = SpaceSpec.weighted_l1([0.5, 2.0, 1.0])
    assert norm(space, [1.0, -1.0, 3.0]) == pytest.approx(5.5, abs=1e-15)


def test_trace_norm_of_diagonal_example():
    m = np.diag([3.0, -4.0j])
    assert trace_norm(m) == pytest.approx(7.0, abs=1e-12)
    space = SpaceSpec.trace_class(2)
    assert norm(space, matrix_to_point(m)) == pytest.approx(7.0, abs=1e-12)


def test_trace_norm_rank_one():
    x = np.array([1.0, 2.0j])
    y = np.array([3.0, 0.0, 4.0])
    m = np.zeros((3, 3), dtype=complex)
    m[:2, :] = np.outer(x, y.conj())
    assert trace_norm(m) == pytest.approx(np.sqrt(5.0) * 5.0, abs=1e-12)


def test_direct_sum_norm_is_additive(rng):
    a = SpaceSpec.weighted_l1([1.0, 3.0])
    b = SpaceSpec.trace_class(2)
    w = SpaceSpec.direct_sum(a, b)
    for _ in range(200):
        p = rng.normal(size=a.dim)
        q = rng.normal(size=b.dim)
        total = norm(w, np.concatenate([p, q]))
        assert total == pytest.approx(norm(a, p) + norm(b, q), abs=1e-12)


@pytest.mark.parametrize("space", [SpaceSpec.weighted_l1([0.3, 1.0, 2.5]), SpaceSpec.trace_class(3),
                                   SpaceSpec.direct_sum(SpaceSpec.l1(2), SpaceSpec.trace_class(2))],
                         ids=["l1", "trace", "sum"])
def test_triangle_and_homogeneity(space, rng):
    x = rng.normal(size=(1000, space.dim))
    y = rng.normal(size=(1000, space.dim))
    s = rng.normal(size=1000) * 3
    nx, ny, nxy = norms(space, x), norms(space, y), norms(space, x + y)
    assert np.all(nxy <= nx + ny + 1e-12 * (nx + ny))
    scaled = norms(space, x * s[:, None])
    np.testing.assert_allclose(scaled, np.abs(s) * nx, rtol=1e-12, atol=1e-12)
    assert np.all(nx >= 0)
    assert norm(space, space.zero()) == 0.0


def test_unitary_invariance(rng):
    for d in (1, 2, 3, 4):
        for _ in range(20):
            m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            u, v = random_unitary(rng, d), random_unitary(rng, d)
            assert trace_norm(u @ m @ v) == pytest.approx(trace_norm(m), rel=1e-12)


def test_singular_values_match_charpoly_oracle(rng):
    for d in (1, 2, 3):
        for _ in range(200):
            m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            np.testing.assert_allclose(singular_values(d, m), singular_values_charpoly(m), atol=1e-8)


def test_prescribed_singular_values(rng):
    u, v = random_unitary(rng, 3), random_unitary(rng, 3)
    m = u @ np.diag([5.0, 2.0, 1.0]) @ v.conj().T
    np.testing.assert_allclose(singular_values(3, m), [5.0, 2.0, 1.0], atol=1e-12)
    uu, s, vv = svd(m)
    np.testing.assert_allclose(uu @ np.diag(s) @ vv.conj().T, m, atol=1e-12)
    np.testing.assert_allclose(uu.conj().T @ uu, np.eye(3), atol=1e-12)


def test_singular_values_rank_deficient():
    m = np.array([[1.0, 2.0], [2.0, 4.0]], dtype=complex)
    np.testing.assert_allclose(singular_values(2, m), [5.0, 0.0], atol=1e-12)


def test_singular_values_reject_bad_input():
    with pytest.raises(InputError):
        singular_values(2, np.eye(3))
    with pytest.raises(InputError):
        singular_values(2, np.array([[np.nan, 0], [0, 1]]))


def test_matrix_point_round_trip(rng):
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    p = matrix_to_point(m)
    assert p[0] == m[0, 0].real and p[1] == m[0, 0].imag and p[2] == m[0, 1].real
    np.testing.assert_array_equal(point_to_matrix(p, 3), m)


def test_embed_split_round_trip(rng):
    w = SpaceSpec.direct_sum(SpaceSpec.weighted_l1([1.0, 2.0]), SpaceSpec.trace_class(2))
    p = rng.normal(size=2)
    q = embed_direct_sum(w, 0, p)
    blocks = split_direct_sum(w, q)
    np.testing.assert_array_equal(blocks[0], p)
    np.testing.assert_array_equal(blocks[1], np.zeros(8))
    assert norm(w, q) == pytest.approx(norm(w.summands[0], p))
    with pytest.raises(InputError):
        embed_direct_sum(w, 2, p)
    with pytest.raises(InputError):
        embed_direct_sum(w.summands[0], 0, p)


def test_space_validation():
    with pytest.raises(InputError):
        SpaceSpec.weighted_l1([1.0, 0.0])
    with pytest.raises(InputError):
        SpaceSpec.weighted_l1([])
    with pytest.raises(InputError):
        SpaceSpec.trace_class(0)
    with pytest.raises(InputError):
        SpaceSpec.direct_sum(SpaceSpec.l1(1))
    inner = SpaceSpec.direct_sum(SpaceSpec.l1(1), SpaceSpec.l1(1))
    with pytest.raises(InputError):
        SpaceSpec.direct_sum(inner, SpaceSpec.l1(1))
    with pytest.raises(InputError):
        SpaceSpec.l1(2).point([1.0, 2.0, 3.0])


def test_structural_equality_and_flattening():
    a = SpaceSpec.direct_sum(SpaceSpec.weighted_l1([1.0]), SpaceSpec.weighted_l1([2.0, 3.0]))
    b = SpaceSpec.direct_sum(SpaceSpec.weighted_l1([1.0]), SpaceSpec.weighted_l1([2.0, 3.0]))
    assert a == b and hash(a) == hash(b)
    assert a.is_polyhedral
    assert a.as_l1() == SpaceSpec.weighted_l1([1.0, 2.0, 3.0])
    assert a.dim == 3
    assert not SpaceSpec.direct_sum(SpaceSpec.l1(1), SpaceSpec.trace_class(1)).is_polyhedral


def test_distances_and_diameter():
    space = SpaceSpec.l1(2)
    pts = [[0.0, 0.0], [1.0, 1.0], [2.0, 0.0]]
    np.testing.assert_allclose(distances(space, [1.0, 0.0], pts), [1.0, 1.0, 1.0])
    assert diameter(space, pts) == 2.0
    assert diameter(space, [[1.0, 2.0]]) == 0.0
