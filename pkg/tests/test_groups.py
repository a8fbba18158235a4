import numpy as np
import pytest

from l1fixed.errors import InputError, PreconditionError, ResourceError
from l1fixed.groups import (AffineIsometry, BlockDiagonal, Cocycle, SignedPermutation,
                            UnitaryConjugation, apply_affine, clock_and_shift, coboundary,
                            cocycle_residuals, compose, generate_closure, pauli_group, pauli_matrices,
                            transposition, translation_cocycle, verify_cocycle, weyl_group)
from l1fixed.spaces import SpaceSpec, matrix_to_point, norms, point_to_matrix


def test_signed_permutation_convention():
    g = SignedPermutation((1, 2, 0), (1, -1, 1))
    np.testing.assert_array_equal(g.apply([1.0, 2.0, 3.0]), [3.0, 1.0, -2.0])
    np.testing.assert_array_equal(g.inverse().apply(g.apply([1.0, 2.0, 3.0])), [1.0, 2.0, 3.0])
    h = SignedPermutation((0, 2, 1), (-1, 1, 1))
    x = np.array([0.5, -1.0, 4.0])
    np.testing.assert_array_equal(g.compose(h).apply(x), g.apply(h.apply(x)))


def test_signed_permutation_validation():
    with pytest.raises(InputError):
        SignedPermutation((0, 0), (1, 1))
    with pytest.raises(InputError):
        SignedPermutation((0, 1), (1, 2))
    with pytest.raises(InputError):
        transposition(2, 0, 1).validate(SpaceSpec.weighted_l1([1.0, 2.0]))
    transposition(3, 0, 2).validate(SpaceSpec.weighted_l1([2.0, 1.0, 2.0]))


def test_unitary_conjugation_is_isometric(rng):
    space = SpaceSpec.trace_class(2)
    x, _, _ = pauli_matrices()
    g = UnitaryConjugation(x)
    g.validate(space)
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    out = point_to_matrix(g.apply(matrix_to_point(m)), 2)
    np.testing.assert_allclose(out, x @ m @ x.conj().T, atol=1e-15)
    with pytest.raises(InputError):
        UnitaryConjugation(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_affine_composition_order(rng):
    space = SpaceSpec.l1(3)
    g = AffineIsometry(SignedPermutation((1, 0, 2), (1, 1, -1)), np.array([1.0, 0.0, 2.0]))
    h = AffineIsometry(SignedPermutation((2, 1, 0), (-1, 1, 1)), np.array([0.0, -3.0, 0.5]))
    x = rng.normal(size=3)
    np.testing.assert_allclose(apply_affine(compose(g, h), x), apply_affine(g, apply_affine(h, x)))
    np.testing.assert_allclose(apply_affine(compose(g, g.inverse()), x), x, atol=1e-15)
    g.validate(space)


def test_pauli_group_order_and_table():
    G = pauli_group()
    assert len(G) == 4
    assert sorted(G.table[1]) == [0, 1, 2, 3]
    assert np.all(G.table[np.arange(4), G.inverses] == 0)


def test_weyl_and_hyperoctahedral_orders():
    assert len(weyl_group(3)) == 9
    assert len(weyl_group(4)) == 16
    space = SpaceSpec.l1(3)
    gens = [transposition(3, 0, 1), transposition(3, 1, 2), SignedPermutation((0, 1, 2), (-1, 1, 1))]
    assert len(generate_closure(space, gens)) == 48
    s3 = generate_closure(space, gens[:2])
    assert len(s3) == 6


def test_table_is_associative_with_identity():
    G = generate_closure(SpaceSpec.l1(3), [transposition(3, 0, 1), SignedPermutation((1, 2, 0), ())])
    T = G.table
    k = len(G)
    assert np.all(T[0] == np.arange(k)) and np.all(T[:, 0] == np.arange(k))
    for i in range(k):
        for j in range(k):
            assert np.all(T[T[i, j]] == T[i][T[j]])


def test_closure_is_deterministic():
    gens = [transposition(4, 0, 1), SignedPermutation((1, 2, 3, 0), (1, -1, 1, 1))]
    a = generate_closure(SpaceSpec.l1(4), gens)
    b = generate_closure(SpaceSpec.l1(4), gens)
    np.testing.assert_array_equal(a.table, b.table)
    np.testing.assert_array_equal(a.linear_matrices, b.linear_matrices)


def test_closure_cap_raises():
    with pytest.raises(ResourceError):
        generate_closure(SpaceSpec.trace_class(3), [UnitaryConjugation(m) for m in clock_and_shift(3)],
                         cap=5)


def test_near_coincident_elements_are_rejected():
    delta = 5e-9
    theta = np.pi / 2 + delta
    u = np.diag([1.0, np.exp(1j * theta)])
    with pytest.raises(PreconditionError):
        generate_closure(SpaceSpec.trace_class(2), [UnitaryConjugation(u)])


def test_infinite_order_generator_hits_cap():
    u = np.diag([1.0, np.exp(1j * np.sqrt(2.0))])
    with pytest.raises(ResourceError):
        generate_closure(SpaceSpec.trace_class(2), [UnitaryConjugation(u)], cap=100)


def test_translations_make_groups_infinite():
    g = AffineIsometry(SignedPermutation((0, 1), ()), np.array([1.0, 0.0]))
    with pytest.raises(ResourceError):
        generate_closure(SpaceSpec.l1(2), [g], cap=50)


def test_block_diagonal_acts_blockwise(rng):
    space = SpaceSpec.direct_sum(SpaceSpec.l1(2), SpaceSpec.trace_class(2))
    _, _, z = pauli_matrices()
    g = BlockDiagonal((transposition(2, 0, 1), UnitaryConjugation(z)))
    g.validate(space)
    p = rng.normal(size=space.dim)
    out = g.apply(p)
    np.testing.assert_array_equal(out[:2], p[1::-1])
    np.testing.assert_allclose(point_to_matrix(out[2:], 2), z @ point_to_matrix(p[2:], 2) @ z, atol=1e-15)
    with pytest.raises(InputError):
        BlockDiagonal((transposition(2, 0, 1),)).validate(space)


def test_coboundary_is_a_cocycle_with_bounded_norm(rng):
    G = generate_closure(SpaceSpec.weighted_l1([1.0, 1.0, 2.0]),
                         [transposition(3, 0, 1), SignedPermutation((0, 1, 2), (1, 1, -1))])
    v0 = rng.normal(size=3)
    b = coboundary(G, v0)
    ok, worst = verify_cocycle(b)
    assert ok and worst <= 1e-12
    assert b.sup_norm() <= 2 * float(norms(G.space, v0[None])[0]) + 1e-12


def test_verify_cocycle_detects_corruption(rng):
    G = pauli_group()
    b = coboundary(G, rng.normal(size=8))
    vals = b.values.copy()
    vals[2, 3] += 1e-3
    ok, worst = verify_cocycle(Cocycle(G, vals))
    assert not ok and worst >= 1e-3 - 1e-12
    assert cocycle_residuals(Cocycle(G, vals)).shape == (4, 4)


def test_cocycle_needs_one_value_per_element():
    with pytest.raises(InputError):
        Cocycle(pauli_group(), np.zeros((3, 8)))


def test_translation_cocycle_of_affine_group():
    space = SpaceSpec.l1(2)
    t = np.array([1.0, 3.0])
    swap = transposition(2, 0, 1)
    g = AffineIsometry(swap, t - swap.apply(t))
    G = generate_closure(space, [g])
    b = translation_cocycle(G)
    assert len(G) == 2
    assert verify_cocycle(b)[0]
    np.testing.assert_allclose(b.values[1], [-2.0, 2.0])


def test_associativity_exhaustive_on_small_random_groups(rng):
    from l1fixed.acceptance import random_invariant_instance

    for k in range(10):
        _, G, _, _ = random_invariant_instance(rng, ["l1", "sum"][k % 2])
        assert len(G) <= 24
        T = G.table
        # (ab)c == a(bc) for every triple
        left = T[T[:, :, None], np.arange(len(G))[None, None, :]]
        right = T[np.arange(len(G))[:, None, None], T[None, :, :]]
        np.testing.assert_array_equal(left, right)


def test_isometries_preserve_norm_on_many_points(rng):
    space = SpaceSpec.trace_class(3)
    pts = rng.normal(size=(1000, space.dim))
    for m in clock_and_shift(3):
        g = UnitaryConjugation(m)
        np.testing.assert_allclose(norms(space, g.apply_many(pts)), norms(space, pts), rtol=1e-9)
