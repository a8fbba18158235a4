"""Finite-dimensional L1-type spaces: weighted l1, trace class, and their l1-sums.

Points are flat float64 arrays.  A ``d x d`` complex matrix occupies ``2 d^2``
real coordinates, row-major, with real and imaginary parts interleaved.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels
from .errors import InputError


class Kind(str, enum.Enum):
    WEIGHTED_L1 = "weighted_l1"
    TRACE_CLASS = "trace_class"
    DIRECT_SUM = "direct_sum"


@dataclass(frozen=True, eq=False)
class SpaceSpec:
    kind: Kind
    n: int = 0
    weights: tuple = ()
    d: int = 0
    summands: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.WEIGHTED_L1:
            w = tuple(float(x) for x in self.weights)
            if self.n != len(w) or self.n < 1:
                raise InputError(f"weighted_l1 needs n >= 1 weights, got n={self.n}, {len(w)} weights")
            if not all(np.isfinite(x) and x > 0 for x in w):
                raise InputError("weights must be finite and strictly positive")
            object.__setattr__(self, "weights", w)
        elif self.kind is Kind.TRACE_CLASS:
            if self.d < 1:
                raise InputError("trace_class needs d >= 1")
        else:
            if len(self.summands) < 2:
                raise InputError("direct_sum needs at least two summands")
            if any(s.kind is Kind.DIRECT_SUM for s in self.summands):
                raise InputError("direct_sum summands may not themselves be direct sums")
            object.__setattr__(self, "summands", tuple(self.summands))

    # constructors -----------------------------------------------------------------
    @classmethod
    def weighted_l1(cls, weights):
        weights = tuple(weights)
        return cls(Kind.WEIGHTED_L1, n=len(weights), weights=weights)

    @classmethod
    def l1(cls, n):
        return cls.weighted_l1([1.0] * n)

    @classmethod
    def trace_class(cls, d):
        return cls(Kind.TRACE_CLASS, d=int(d))

    @classmethod
    def direct_sum(cls, *summands):
        return cls(Kind.DIRECT_SUM, summands=tuple(summands))

    # structure --------------------------------------------------------------------
    @cached_property
    def dim(self) -> int:
        """Real dimension."""
        if self.kind is Kind.WEIGHTED_L1:
            return self.n
        if self.kind is Kind.TRACE_CLASS:
            return 2 * self.d * self.d
        return sum(s.dim for s in self.summands)

    @property
    def blocks(self) -> tuple:
        return self.summands if self.kind is Kind.DIRECT_SUM else (self,)

    @cached_property
    def offsets(self) -> tuple:
        offs, acc = [], 0
        for b in self.blocks:
            offs.append(acc)
            acc += b.dim
        return tuple(offs)

    @property
    def is_polyhedral(self) -> bool:
        """True when the norm is a weighted l1 norm on the real coordinates."""
        return all(b.kind is Kind.WEIGHTED_L1 for b in self.blocks)

    @cached_property
    def flat_weights(self) -> np.ndarray:
        """Coordinate weights of the flattened l1 norm (ones for matrix blocks)."""
        parts = [np.asarray(b.weights) if b.kind is Kind.WEIGHTED_L1 else np.ones(b.dim)
                 for b in self.blocks]
        return np.concatenate(parts)

    @cached_property
    def layout(self):
        kinds = np.array([kernels.L1 if b.kind is Kind.WEIGHTED_L1 else kernels.TRACE
                          for b in self.blocks], dtype=np.int64)
        sizes = np.array([b.n if b.kind is Kind.WEIGHTED_L1 else b.d for b in self.blocks],
                         dtype=np.int64)
        return kinds, np.array(self.offsets, dtype=np.int64), sizes, self.flat_weights

    def as_l1(self) -> "SpaceSpec":
        """The same space viewed as one weighted l1 space (polyhedral spaces only)."""
        if not self.is_polyhedral:
            raise InputError("only weighted l1 blocks can be flattened to a single l1 space")
        if self.kind is Kind.WEIGHTED_L1:
            return self
        return SpaceSpec.weighted_l1(self.flat_weights)

    # equality is structural
    def _key(self):
        if self.kind is Kind.WEIGHTED_L1:
            return (self.kind.value, self.weights)
        if self.kind is Kind.TRACE_CLASS:
            return (self.kind.value, self.d)
        return (self.kind.value, tuple(s._key() for s in self.summands))

    def __eq__(self, other):
        return isinstance(other, SpaceSpec) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.kind is Kind.WEIGHTED_L1:
            return f"WeightedL1(n={self.n})"
        if self.kind is Kind.TRACE_CLASS:
            return f"TraceClass(d={self.d})"
        return "DirectSum(" + ", ".join(map(repr, self.summands)) + ")"

    # points -----------------------------------------------------------------------
    def point(self, coords) -> np.ndarray:
        p = np.asarray(coords, dtype=float).reshape(-1)
        if p.shape[0] != self.dim:
            raise InputError(f"point has {p.shape[0]} coordinates, {self!r} needs {self.dim}")
        if not np.all(np.isfinite(p)):
            raise InputError("point coordinates must be finite")
        return p

    def points(self, pts) -> np.ndarray:
        arr = np.asarray(pts, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2 or arr.shape[0] == 0:
            raise InputError("point set must be a non-empty list of points")
        if arr.shape[1] != self.dim:
            raise InputError(f"points have {arr.shape[1]} coordinates, {self!r} needs {self.dim}")
        if not np.all(np.isfinite(arr)):
            raise InputError("point coordinates must be finite")
        return arr

    def zero(self) -> np.ndarray:
        return np.zeros(self.dim)


def matrix_to_point(m) -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    out = np.empty(2 * m.size)
    out[0::2] = m.real.reshape(-1)
    out[1::2] = m.imag.reshape(-1)
    return out


def point_to_matrix(p, d: int) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != 2 * d * d:
        raise InputError(f"expected {2 * d * d} coordinates for a {d}x{d} matrix")
    return (p[..., 0::2] + 1j * p[..., 1::2]).reshape(p.shape[:-1] + (d, d))


def singular_values(d: int, m) -> np.ndarray:
    """Singular values of a complex ``d x d`` matrix, non-increasing."""
    m = np.asarray(m, dtype=np.complex128)
    if m.shape != (d, d):
        raise InputError(f"expected a {d}x{d} matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError("matrix entries must be finite")
    return kernels.svd_jacobi(m)[1]


def svd(m):
    """``(u, s, v)`` with ``m = u diag(s) v*`` by one-sided Jacobi."""
    return kernels.svd_jacobi(np.ascontiguousarray(m, dtype=np.complex128))


def trace_norm(m) -> float:
    m = np.asarray(m, dtype=np.complex128)
    return float(singular_values(m.shape[0], m).sum())


def operator_norm(m) -> float:
    m = np.asarray(m, dtype=np.complex128)
    return float(singular_values(m.shape[0], m)[0])


def norm(space: SpaceSpec, p) -> float:
    p = space.point(p)
    kinds, offs, sizes, w = space.layout
    return float(kernels.batch_norms(kinds, offs, sizes, w, p[None, :])[0])


def norms(space: SpaceSpec, pts) -> np.ndarray:
    """Row-wise norms of a stack of points."""
    pts = np.ascontiguousarray(space.points(pts))
    kinds, offs, sizes, w = space.layout
    return kernels.batch_norms(kinds, offs, sizes, w, pts)


def distances(space: SpaceSpec, x, pts) -> np.ndarray:
    return norms(space, space.point(x)[None, :] - space.points(pts))


def diameter(space: SpaceSpec, pts) -> float:
    pts = space.points(pts)
    if len(pts) == 1:
        return 0.0
    i, j = np.triu_indices(len(pts), k=1)
    return float(norms(space, pts[i] - pts[j]).max())


def embed_direct_sum(w: SpaceSpec, index: int, p) -> np.ndarray:
    if w.kind is not Kind.DIRECT_SUM:
        raise InputError("embed_direct_sum needs a direct_sum space")
    if not 0 <= index < len(w.summands):
        raise InputError(f"summand index {index} out of range for {len(w.summands)} summands")
    p = w.summands[index].point(p)
    out = np.zeros(w.dim)
    off = w.offsets[index]
    out[off:off + p.shape[0]] = p
    return out


def split_direct_sum(w: SpaceSpec, q) -> list:
    if w.kind is not Kind.DIRECT_SUM:
        raise InputError("split_direct_sum needs a direct_sum space")
    q = w.point(q)
    return [q[off:off + s.dim].copy() for s, off in zip(w.summands, w.offsets)]
