"""Isometries, finite groups generated by them, and cocycles.

Linear isometries come in three shapes: weight-preserving signed
permutations (weighted l1), unitary conjugations ``v -> u v u*`` (trace
class), and block-diagonal combinations (l1-sums).  Each one also exposes its
real matrix on the flat coordinates; group bookkeeping compares those.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import block_diag

from .errors import InputError, PreconditionError, ResourceError
from .spaces import Kind, SpaceSpec, matrix_to_point, norms, point_to_matrix

EQUAL_TOL = 1e-9
AMBIGUOUS_TOL = 1e-6
DEFAULT_CAP = 10_000


class LinearIsometry:
    dim: int

    def apply_many(self, pts) -> np.ndarray:
        raise NotImplementedError

    def apply(self, p) -> np.ndarray:
        return self.apply_many(np.asarray(p, dtype=float)[None, :])[0]

    @cached_property
    def matrix(self) -> np.ndarray:
        """Real matrix acting on flat coordinates (column convention)."""
        return self.apply_many(np.eye(self.dim)).T

    def validate(self, space: SpaceSpec, samples: int = 1000, tol: float = 1e-9):
        """Structural checks, then norm preservation on seeded random points."""
        self._check_structure(space)
        rng = np.random.default_rng(12345)
        pts = rng.normal(size=(samples, space.dim))
        before = norms(space, pts)
        after = norms(space, self.apply_many(pts))
        worst = float(np.max(np.abs(before - after) / np.maximum(1.0, before)))
        if worst > tol:
            raise InputError(f"{self!r} does not preserve the norm (relative error {worst:.3g})")
        return self

    def _check_structure(self, space):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class SignedPermutation(LinearIsometry):
    """``out[perm[i]] = signs[i] * p[i]``."""

    perm: tuple
    signs: tuple

    def __post_init__(self):
        perm = tuple(int(i) for i in self.perm)
        signs = tuple(float(s) for s in self.signs) if self.signs else (1.0,) * len(perm)
        if sorted(perm) != list(range(len(perm))):
            raise InputError(f"{list(perm)} is not a permutation of 0..{len(perm) - 1}")
        if len(signs) != len(perm) or any(s not in (1.0, -1.0) for s in signs):
            raise InputError("signs must be a list of +1/-1 matching the permutation")
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "signs", signs)

    @property
    def dim(self):
        return len(self.perm)

    def apply_many(self, pts):
        pts = np.asarray(pts, dtype=float)
        out = np.empty_like(pts)
        out[:, list(self.perm)] = pts * np.asarray(self.signs)
        return out

    def compose(self, other: "SignedPermutation") -> "SignedPermutation":
        p, s = np.asarray(self.perm), np.asarray(self.signs)
        q, t = np.asarray(other.perm), np.asarray(other.signs)
        return SignedPermutation(tuple(p[q]), tuple(s[q] * t))

    def inverse(self) -> "SignedPermutation":
        inv = np.argsort(self.perm)
        return SignedPermutation(tuple(inv), tuple(np.asarray(self.signs)[inv]))

    def _check_structure(self, space):
        if space.kind is not Kind.WEIGHTED_L1 or space.n != self.dim:
            raise InputError(f"signed permutation of size {self.dim} does not act on {space!r}")
        w = np.asarray(space.weights)
        if np.any(np.abs(w[list(self.perm)] - w) > 1e-12 * w):
            raise InputError(f"permutation {list(self.perm)} does not preserve the weights")

    def __repr__(self):
        return f"SignedPermutation(perm={list(self.perm)}, signs={[int(s) for s in self.signs]})"


@dataclass(frozen=True, eq=False)
class UnitaryConjugation(LinearIsometry):
    """``v -> u v u*`` on ``d x d`` complex matrices."""

    u: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=np.complex128)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise InputError("unitary must be a square matrix")
        if np.abs(u @ u.conj().T - np.eye(u.shape[0])).max() > 1e-10:
            raise InputError("matrix is not unitary within 1e-10")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @property
    def d(self):
        return self.u.shape[0]

    @property
    def dim(self):
        return 2 * self.d * self.d

    def apply_many(self, pts):
        ms = point_to_matrix(np.asarray(pts, dtype=float), self.d)
        out = self.u @ ms @ self.u.conj().T
        return matrix_to_point(out).reshape(len(ms), -1)

    def compose(self, other):
        return UnitaryConjugation(self.u @ other.u)

    def inverse(self):
        return UnitaryConjugation(self.u.conj().T)

    def _check_structure(self, space):
        if space.kind is not Kind.TRACE_CLASS or space.d != self.d:
            raise InputError(f"unitary of size {self.d} does not act on {space!r}")

    def __repr__(self):
        return f"UnitaryConjugation(d={self.d})"


@dataclass(frozen=True, eq=False)
class BlockDiagonal(LinearIsometry):
    blocks: tuple

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))

    @property
    def dim(self):
        return sum(b.dim for b in self.blocks)

    def apply_many(self, pts):
        pts = np.asarray(pts, dtype=float)
        out = np.empty_like(pts)
        off = 0
        for b in self.blocks:
            out[:, off:off + b.dim] = b.apply_many(pts[:, off:off + b.dim])
            off += b.dim
        return out

    @cached_property
    def matrix(self):
        return block_diag(*[b.matrix for b in self.blocks])

    def compose(self, other):
        return BlockDiagonal(tuple(a.compose(b) for a, b in zip(self.blocks, other.blocks)))

    def inverse(self):
        return BlockDiagonal(tuple(b.inverse() for b in self.blocks))

    def _check_structure(self, space):
        if space.kind is not Kind.DIRECT_SUM or len(space.summands) != len(self.blocks):
            raise InputError(f"block-diagonal isometry does not match {space!r}")
        for b, s in zip(self.blocks, space.summands):
            b._check_structure(s)

    def __repr__(self):
        return f"BlockDiagonal({', '.join(map(repr, self.blocks))})"


def identity_linear(space: SpaceSpec) -> LinearIsometry:
    if space.kind is Kind.WEIGHTED_L1:
        return SignedPermutation(tuple(range(space.n)), (1.0,) * space.n)
    if space.kind is Kind.TRACE_CLASS:
        return UnitaryConjugation(np.eye(space.d))
    return BlockDiagonal(tuple(identity_linear(s) for s in space.summands))


@dataclass(frozen=True, eq=False)
class AffineIsometry:
    linear: LinearIsometry
    translation: np.ndarray

    def __post_init__(self):
        t = np.array(self.translation, dtype=float).reshape(-1)
        if t.shape[0] != self.linear.dim:
            raise InputError(f"translation has {t.shape[0]} coordinates, expected {self.linear.dim}")
        t.setflags(write=False)
        object.__setattr__(self, "translation", t)

    @classmethod
    def from_linear(cls, linear: LinearIsometry):
        return cls(linear, np.zeros(linear.dim))

    @classmethod
    def identity(cls, space: SpaceSpec):
        return cls.from_linear(identity_linear(space))

    @property
    def dim(self):
        return self.linear.dim

    @cached_property
    def signature(self) -> np.ndarray:
        return np.concatenate([self.linear.matrix.ravel(), self.translation])

    def apply_many(self, pts):
        return self.linear.apply_many(pts) + self.translation

    def inverse(self) -> "AffineIsometry":
        inv = self.linear.inverse()
        return AffineIsometry(inv, -inv.apply(self.translation))

    def validate(self, space: SpaceSpec):
        self.linear.validate(space)
        space.point(self.translation)
        return self


def apply_affine(g: AffineIsometry, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (g.dim,):
        raise InputError(f"point has shape {p.shape}, isometry acts on dimension {g.dim}")
    return g.apply_many(p[None, :])[0]


def compose(g: AffineIsometry, h: AffineIsometry) -> AffineIsometry:
    """``g o h``: apply ``h`` first."""
    if g.dim != h.dim or type(g.linear) is not type(h.linear):
        raise InputError("cannot compose isometries of different spaces")
    return AffineIsometry(g.linear.compose(h.linear), g.linear.apply(h.translation) + g.translation)


class _Index:
    """Element lookup by rounded signature with an exact-distance fallback."""

    def __init__(self):
        self.keys = {}
        self.sigs = []
        self._stack = None

    @staticmethod
    def _key(sig):
        return (np.round(sig, 6) + 0.0).tobytes()  # + 0.0 folds -0.0 into 0.0

    def find(self, sig):
        """Index of an element within EQUAL_TOL, ``None`` when new.
        Raises when the nearest element is ambiguous."""
        k = self.keys.get(self._key(sig))
        if k is not None and np.abs(self.sigs[k] - sig).max() <= EQUAL_TOL:
            return k
        if not self.sigs:
            return None
        if self._stack is None or len(self._stack) != len(self.sigs):
            self._stack = np.asarray(self.sigs)
        dist = np.abs(self._stack - sig).max(axis=1)
        j = int(np.argmin(dist))
        if dist[j] <= EQUAL_TOL:
            return j
        if dist[j] <= AMBIGUOUS_TOL:
            raise PreconditionError(
                f"ambiguous closure: two group elements differ by {dist[j]:.3g}, "
                f"between the equality tolerance {EQUAL_TOL:g} and {AMBIGUOUS_TOL:g}")
        return None

    def find_many(self, sigs) -> np.ndarray:
        """Vectorized :meth:`find`; ``-1`` marks new elements."""
        sigs = np.asarray(sigs)
        rounded = np.round(sigs, 6) + 0.0
        hits = np.array([self.keys.get(r.tobytes(), -1) for r in rounded], dtype=np.int64)
        if self._stack is None or len(self._stack) != len(self.sigs):
            self._stack = np.asarray(self.sigs)
        ok = hits >= 0
        ok[ok] = np.abs(self._stack[hits[ok]] - sigs[ok]).max(axis=1) <= EQUAL_TOL
        for j in np.flatnonzero(~ok):
            found = self.find(sigs[j])
            hits[j] = -1 if found is None else found
        return hits

    def add(self, sig):
        self.keys.setdefault(self._key(sig), len(self.sigs))
        self.sigs.append(sig)
        return len(self.sigs) - 1


@dataclass(eq=False)
class GroupElements:
    """A finite group of affine isometries in BFS discovery order (identity first)."""

    space: SpaceSpec
    elements: list
    table: np.ndarray
    inverses: np.ndarray

    def __len__(self):
        return len(self.elements)

    @property
    def order(self):
        return len(self.elements)

    @cached_property
    def linear_matrices(self) -> np.ndarray:
        return np.stack([g.linear.matrix for g in self.elements])

    @cached_property
    def translations(self) -> np.ndarray:
        return np.stack([g.translation for g in self.elements])

    def act(self, i: int, pts) -> np.ndarray:
        return self.elements[i].apply_many(np.atleast_2d(pts))

    def orbit(self, p) -> np.ndarray:
        p = self.space.point(p)
        return np.stack([g.apply_many(p[None, :])[0] for g in self.elements])

    @property
    def is_linear(self) -> bool:
        return bool(np.all(self.translations == 0.0))

    def linear_part(self) -> "GroupElements":
        """The group of linear parts, with the same indexing.

        Only meaningful when the linear parts are pairwise distinct, which
        holds whenever the translations form a cocycle of a faithful action.
        """
        elems = [AffineIsometry.from_linear(g.linear) for g in self.elements]
        return GroupElements(self.space, elems, self.table, self.inverses)


def generate_closure(space: SpaceSpec, generators, cap: int = DEFAULT_CAP) -> GroupElements:
    """Breadth-first closure of ``generators`` under composition.

    Elements are compared by the max-coordinate difference of their linear
    matrix and translation.  New elements are ``s o e`` for generator ``s``
    and a known element ``e``, in queue order, so the ordering is
    deterministic.
    """
    if cap < 1:
        raise InputError("cap must be >= 1")
    gens = [g if isinstance(g, AffineIsometry) else AffineIsometry.from_linear(g) for g in generators]
    if not gens:
        raise InputError("need at least one generator")
    for g in gens:
        g.validate(space)
    elements = [AffineIsometry.identity(space)]
    index = _Index()
    index.add(elements[0].signature)
    queue = deque([0])
    while queue:
        e = elements[queue.popleft()]
        for s in gens:
            cand = compose(s, e)
            if index.find(cand.signature) is None:
                if len(elements) >= cap:
                    raise ResourceError(f"group closure exceeds the cap of {cap} elements")
                elements.append(cand)
                index.add(cand.signature)
                queue.append(len(elements) - 1)
    k = len(elements)
    dim = space.dim
    mats = np.stack([g.linear.matrix for g in elements])
    trans = np.stack([g.translation for g in elements])
    table = np.empty((k, k), dtype=np.int64)
    for i in range(k):
        # signatures of g_i o g_j for every j at once
        prod = np.einsum("ab,jbc->jac", mats[i], mats).reshape(k, dim * dim)
        sigs = np.hstack([prod, trans @ mats[i].T + trans[i]])
        row = index.find_many(sigs)
        if np.any(row < 0):  # pragma: no cover - closure guarantees membership
            raise PreconditionError("group is not closed under composition")
        table[i] = row
    inverses = np.argmax(table == 0, axis=1)
    return GroupElements(space, elements, table, inverses)


def group_from_table(space, elements, table) -> GroupElements:
    table = np.asarray(table, dtype=np.int64)
    return GroupElements(space, list(elements), table, np.argmax(table == 0, axis=1))


@dataclass(eq=False)
class Cocycle:
    """``b(g)`` for every element of ``group``; the linear parts act."""

    group: GroupElements
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (len(self.group), self.group.space.dim):
            raise InputError(f"cocycle needs {len(self.group)} values of dimension {self.group.space.dim}")
        self.values = vals

    @property
    def space(self):
        return self.group.space

    def sup_norm(self) -> float:
        return float(norms(self.space, self.values).max())


def cocycle_residuals(c: Cocycle) -> np.ndarray:
    """``||b(gh) - b(g) - pi(g) b(h)||`` for all pairs, shape ``(|G|, |G|)``."""
    G = c.group
    k = len(G)
    out = np.empty((k, k))
    for i, g in enumerate(G.elements):
        moved = g.linear.apply_many(c.values)
        diff = c.values[G.table[i]] - c.values[i] - moved
        out[i] = norms(c.space, diff)
    return out


def verify_cocycle(c: Cocycle, tol: float = 1e-9):
    """``(ok, worst)``: the cocycle identity on every pair, plus ``b(e) = 0``."""
    worst = float(cocycle_residuals(c).max())
    worst = max(worst, float(norms(c.space, c.values[:1])[0]))
    return worst <= tol, worst


def coboundary(group: GroupElements, v0) -> Cocycle:
    v0 = group.space.point(v0)
    vals = np.stack([v0 - g.linear.apply(v0) for g in group.elements])
    return Cocycle(group, vals)


def translation_cocycle(group: GroupElements) -> Cocycle:
    """The orbit map of 0 of an affine action: ``b(g) = g(0)``."""
    return Cocycle(group.linear_part(), group.translations.copy())


# standard generators ---------------------------------------------------------------

def transposition(n: int, i: int, j: int) -> SignedPermutation:
    perm = list(range(n))
    perm[i], perm[j] = perm[j], perm[i]
    return SignedPermutation(tuple(perm), (1.0,) * n)


def pauli_matrices():
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    y = np.array([[0, -1j], [1j, 0]])
    z = np.diag([1.0 + 0j, -1.0])
    return x, y, z


def clock_and_shift(d: int):
    omega = np.exp(2j * np.pi / d)
    shift = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    clock = np.diag(omega ** np.arange(d))
    return clock, shift


def pauli_group() -> GroupElements:
    return generate_closure(SpaceSpec.trace_class(2), [UnitaryConjugation(m) for m in pauli_matrices()])


def weyl_group(d: int) -> GroupElements:
    return generate_closure(SpaceSpec.trace_class(d), [UnitaryConjugation(m) for m in clock_and_shift(d)])
