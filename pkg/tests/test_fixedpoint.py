import numpy as np
import pytest

from l1fixed.chebyshev import circumradius
from l1fixed.errors import InputError, PreconditionError
from l1fixed.fixedpoint import (Derivation, check_embedded_centre, derivation_to_cocycle,
                                extend_linear, invariant_point, leibniz_residuals,
                                linearity_residual, solve_derivation, trivialize_cocycle,
                                unitary_decomposition)
from l1fixed.groups import (AffineIsometry, Cocycle, SignedPermutation, UnitaryConjugation, coboundary,
                            generate_closure, pauli_group, transposition, weyl_group)
from l1fixed.spaces import SpaceSpec, distances, norm, operator_norm, trace_norm

TWO_POINT = SpaceSpec.weighted_l1([0.5, 0.5])


def test_two_point_swap_fixed_point():
    G = generate_closure(TWO_POINT, [transposition(2, 0, 1)])
    res = invariant_point(TWO_POINT, [[0, 0], [1, 1]], G)
    np.testing.assert_allclose(res.point, [0.5, 0.5], atol=1e-12)
    assert res.residual <= 1e-12
    assert res.radius == pytest.approx(0.5)


def test_s3_orbit_fixed_point_is_on_the_diagonal():
    space = SpaceSpec.l1(3)
    G = generate_closure(space, [transposition(3, 0, 1), transposition(3, 1, 2)])
    A = G.orbit([3.0, 0.0, 1.0])
    res = invariant_point(space, A, G)
    assert res.residual <= 1e-12
    assert np.ptp(res.point) <= 1e-12
    assert res.radius <= circumradius(space, A) + 1e-9


def test_affine_group_fixed_point_is_the_conjugating_translation():
    space = SpaceSpec.l1(2)
    t = np.array([2.0, -1.0])
    minus = SignedPermutation((0, 1), (-1, -1))
    G = generate_closure(space, [AffineIsometry(minus, t - minus.apply(t))])
    A = G.orbit([3.0, 3.0])
    res = invariant_point(space, A, G)
    np.testing.assert_allclose(res.point, t, atol=1e-12)


def test_non_invariant_set_names_the_culprit():
    G = generate_closure(TWO_POINT, [transposition(2, 0, 1)])
    with pytest.raises(PreconditionError, match=r"g=1 maps point a=1"):
        invariant_point(TWO_POINT, [[0, 0], [1, 2]], G)


def test_group_space_mismatch():
    G = generate_closure(SpaceSpec.l1(2), [transposition(2, 0, 1)])
    with pytest.raises(InputError):
        invariant_point(TWO_POINT, [[0, 0]], G)


def test_swap_cocycle_trivialization():
    G = generate_closure(TWO_POINT, [transposition(2, 0, 1)])
    b = Cocycle(G, [[0.0, 0.0], [1.0, -1.0]])
    res = trivialize_cocycle(TWO_POINT, b)
    np.testing.assert_allclose(res.point, [0.5, -0.5], atol=1e-12)
    assert res.extra["reconstruction"] <= 1e-12
    assert res.norm_bound_ok


def test_coboundary_trivialization_recovers_up_to_fixed_vectors(rng):
    space = SpaceSpec.weighted_l1([1.0, 1.0, 1.0, 2.0])
    G = generate_closure(space, [transposition(4, 0, 1), SignedPermutation((1, 2, 0, 3), (1, 1, 1, -1))])
    v0 = rng.normal(size=4)
    res = trivialize_cocycle(space, coboundary(G, v0))
    # v - v0 must be fixed by every element
    diff = res.point - v0
    for g in G.elements:
        np.testing.assert_allclose(g.apply_many(diff[None])[0], diff, atol=1e-10)
    assert res.extra["norm"] <= res.extra["sup_b"] + 1e-9


def test_non_cocycle_rejected():
    G = generate_closure(TWO_POINT, [transposition(2, 0, 1)])
    with pytest.raises(PreconditionError, match="not a cocycle"):
        trivialize_cocycle(TWO_POINT, Cocycle(G, [[0.0, 0.0], [1.0, 1.0]]))


def test_embedded_centre_has_zero_second_block(rng):
    v = SpaceSpec.weighted_l1([1.0, 2.0])
    v0 = SpaceSpec.weighted_l1([0.5])
    rep = check_embedded_centre(v, v0, [[0, 0], [1, 1]])
    assert rep.v0_norm <= 1e-12
    assert rep.radius_gap <= 1e-12
    assert rep.radius_w == pytest.approx(1.5)
    with pytest.raises(InputError):
        check_embedded_centre(v, v0, [[0, 0, 1.0], [1, 1, 0.0]])


def test_inner_derivation_of_pauli_z():
    G = pauli_group()
    w = np.diag([1.0, -1.0]).astype(complex)
    D = Derivation.inner(G, w)
    res = solve_derivation(D)
    v = res.extra["matrix"]
    # ad_v = ad_w forces v - w to commute with everything
    diff = v - w
    np.testing.assert_allclose(diff - diff[0, 0] * np.eye(2), 0.0, atol=1e-7)
    assert res.extra["derivation_residual"] <= 1e-9
    assert res.norm_bound_ok


def test_derivation_from_generators_matches_inner(rng):
    G = weyl_group(3)
    w = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    full = Derivation.inner(G, w)
    gens = [1, 2]
    partial = Derivation.from_generators(G, gens, full.values[gens])
    np.testing.assert_allclose(partial.values, full.values, atol=1e-12)
    assert leibniz_residuals(partial).max() <= 1e-12


def test_leibniz_violation_is_reported():
    G = pauli_group()
    vals = Derivation.inner(G, np.diag([1.0, 0.0])).values.copy()
    vals[1] += 0.1
    with pytest.raises(PreconditionError, match="Leibniz"):
        derivation_to_cocycle(Derivation(G, vals))


def test_derivation_needs_conjugation_group():
    G = generate_closure(TWO_POINT, [transposition(2, 0, 1)])
    with pytest.raises(InputError):
        Derivation(G, np.zeros((2, 1, 1)))


def test_unitary_decomposition_reconstructs(rng):
    for d in (1, 2, 3):
        for scale in (0.3, 5.0):
            a = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) * scale
            parts = unitary_decomposition(d, a)
            assert len(parts) == 4
            total = sum(c * u for c, u in parts)
            np.testing.assert_allclose(total, a, atol=1e-12 * max(1, scale))
            for _, u in parts:
                np.testing.assert_allclose(u @ u.conj().T, np.eye(d), atol=1e-12)


def test_unitary_decomposition_frozen_example():
    parts = unitary_decomposition(2, np.diag([0.5, -0.5]))
    u = parts[0][1]
    np.testing.assert_allclose(np.diag(u), [0.5 + np.sqrt(0.75) * 1j, -0.5 + np.sqrt(0.75) * 1j],
                               atol=1e-14)
    assert parts[0][0] == 0.5
    with pytest.raises(InputError):
        unitary_decomposition(2, np.eye(3))


def test_linearity_on_random_elements(rng):
    G = pauli_group()
    w = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    D = Derivation.inner(G, w)
    v = solve_derivation(D).extra["matrix"]
    for _ in range(10):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        assert linearity_residual(D, v, a) <= 1e-6
        np.testing.assert_allclose(extend_linear(D, a), w @ a - a @ w, atol=1e-12)


def test_extend_linear_outside_span():
    space_group = generate_closure(SpaceSpec.trace_class(2), [UnitaryConjugation(np.diag([1.0, -1.0]))])
    D = Derivation.inner(space_group, np.eye(2))
    with pytest.raises(PreconditionError):
        extend_linear(D, np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_norm_helpers_consistent(rng):
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert operator_norm(m) <= trace_norm(m)
    assert trace_norm(m) == pytest.approx(np.linalg.norm(m, "nuc"), rel=1e-12)
    assert norm(TWO_POINT, [2.0, -2.0]) == 2.0
    assert distances(TWO_POINT, [0, 0], [[1, 1]])[0] == 1.0


def test_averaging_does_not_increase_the_objective(rng):
    from l1fixed.acceptance import random_invariant_instance

    for k in range(20):
        space, G, A, _ = random_invariant_instance(rng, ["l1", "sum", "trace"][k % 3])
        res = invariant_point(space, A, G)
        f_c = float(distances(space, res.extra["centre"], A).max())
        assert res.radius <= f_c + 1e-9 * max(1.0, f_c)
        assert res.residual <= 1e-9


def test_norm_estimate_when_origin_in_set(rng):
    space = SpaceSpec.weighted_l1([1.0, 1.0, 3.0])
    G = generate_closure(space, [transposition(3, 0, 1), SignedPermutation((0, 1, 2), (-1, -1, 1))])
    A = np.vstack([np.zeros(3), G.orbit(rng.normal(size=3))])
    res = invariant_point(space, A, G)
    rho = circumradius(space, A)
    assert norm(space, res.point) <= rho + res.gap + 1e-6
    assert rho <= max(norm(space, a) for a in A) + 1e-12
