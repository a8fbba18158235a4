"""Invariant centres, cocycle trivialization and inner derivations.

For a finite group ``G`` of isometries preserving a bounded set ``A`` the
function ``x -> max_a ||x - a||`` is ``G``-invariant and convex, so averaging
any centre over ``G`` yields a centre that every element fixes.  A cocycle
``b`` is trivialized by running this on ``A = b(G)`` for the affine action
``x -> pi(g) x + b(g)``; since ``0 = b(e)`` lies in ``A`` the fixed point has
norm at most ``sup_g ||b(g)||``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .chebyshev import DEFAULT_ITERS, Selection, chebyshev_centre
from .errors import InputError, PreconditionError
from .groups import (AffineIsometry, Cocycle, GroupElements, UnitaryConjugation, group_from_table,
                     verify_cocycle)
from .spaces import (Kind, SpaceSpec, distances, embed_direct_sum, matrix_to_point, norm, norms,
                     operator_norm, point_to_matrix, split_direct_sum, trace_norm)

SET_TOL = 1e-9


@dataclass
class FixedPointResult:
    point: np.ndarray
    radius: float
    residual: float
    norm_bound_ok: bool | None = None
    centre_radius: float = float("nan")
    gap: float = 0.0
    extra: dict = field(default_factory=dict)


def _dedupe(pts, tol):
    keep = []
    for p in pts:
        if not any(np.abs(p - q).max() <= tol for q in keep):
            keep.append(p)
    return np.array(keep)


def _check_invariant(G: GroupElements, pts, tol):
    """Greedy matching of ``g(A)`` against ``A`` for every ``g``."""
    for gi, g in enumerate(G.elements):
        imgs = g.apply_many(pts)
        used = np.zeros(len(pts), dtype=bool)
        for ai, img in enumerate(imgs):
            dist = np.abs(pts - img).max(axis=1)
            dist[used] = np.inf
            j = int(np.argmin(dist))
            if dist[j] > tol:
                raise PreconditionError(
                    f"point set is not invariant: element g={gi} maps point a={ai} outside A "
                    f"(nearest point at max-coordinate distance {dist[j]:.3g})")
            used[j] = True


def invariant_point(space: SpaceSpec, A, G: GroupElements, selection=Selection.MIN_L2, *,
                    iters: int = DEFAULT_ITERS, seed: int = 0) -> FixedPointResult:
    """A Chebyshev centre of ``A`` fixed by every element of ``G``."""
    if G.space != space:
        raise InputError(f"group acts on {G.space!r}, not {space!r}")
    pts = space.points(A)
    scale = 1.0 + float(np.abs(pts).max())
    pts = _dedupe(pts, SET_TOL * scale)
    _check_invariant(G, pts, SET_TOL * scale)
    cres = chebyshev_centre(space, pts, selection, iters=iters, seed=seed)
    images = np.stack([g.apply_many(cres.centre[None, :])[0] for g in G.elements])
    v = images.mean(axis=0)
    moved = np.stack([g.apply_many(v[None, :])[0] for g in G.elements])
    residual = float(norms(space, moved - v).max())
    radius = float(distances(space, v, pts).max())
    return FixedPointResult(v, radius, residual, None, cres.radius, cres.gap,
                            {"method": cres.method.value, "centre": cres.centre})


def trivialize_cocycle(space: SpaceSpec, b: Cocycle, selection=Selection.MIN_L2, *,
                       iters: int = DEFAULT_ITERS, seed: int = 0) -> FixedPointResult:
    """``v`` with ``b(g) = v - pi(g) v`` for all ``g`` and ``||v|| <= sup ||b||``."""
    ok, worst = verify_cocycle(b, 1e-8)
    if not ok:
        raise PreconditionError(f"not a cocycle: worst identity residual {worst:.3g} > 1e-8")
    G = b.group
    affine = [AffineIsometry(g.linear, b.values[i]) for i, g in enumerate(G.elements)]
    H = group_from_table(space, affine, G.table)
    res = invariant_point(space, b.values, H, selection, iters=iters, seed=seed)
    v = res.point
    recon = np.stack([v - g.linear.apply(v) for g in G.elements])
    res.extra["reconstruction"] = float(norms(space, recon - b.values).max())
    sup_b = b.sup_norm()
    res.extra["norm"] = norm(space, v)
    res.extra["sup_b"] = sup_b
    res.norm_bound_ok = res.extra["norm"] <= sup_b + 1e-6
    return res


@dataclass
class EmbeddedCentreReport:
    centre: np.ndarray
    v_block: np.ndarray
    v0_norm: float
    radius_w: float
    radius_v: float

    @property
    def radius_gap(self):
        return abs(self.radius_w - self.radius_v)


def check_embedded_centre(v_space: SpaceSpec, v0_space: SpaceSpec, A, selection=Selection.MIN_L2, *,
                          iters: int = DEFAULT_ITERS, seed: int = 0) -> EmbeddedCentreReport:
    """Solve for a centre of ``A`` inside ``V (+)_1 V0`` and measure its ``V0`` block.

    ``A`` may be given in ``V`` coordinates or already embedded in the sum (in
    which case its ``V0`` block must vanish).
    """
    W = SpaceSpec.direct_sum(v_space, v0_space)
    pts = np.atleast_2d(np.asarray(A, dtype=float))
    if pts.shape[1] == W.dim:
        tail = pts[:, v_space.dim:]
        if np.any(tail != 0.0):
            raise InputError("points must have a zero V0 block")
        pts = pts[:, :v_space.dim]
    pts = v_space.points(pts)
    emb = np.stack([embed_direct_sum(W, 0, p) for p in pts])
    cw = chebyshev_centre(W, emb, selection, iters=iters, seed=seed)
    cv = chebyshev_centre(v_space, pts, selection, iters=iters, seed=seed)
    c_v, c_v0 = split_direct_sum(W, cw.centre)
    return EmbeddedCentreReport(cw.centre, c_v, norm(v0_space, c_v0), cw.radius, cv.radius)


# derivations on matrix algebras ------------------------------------------------------

@dataclass(eq=False)
class Derivation:
    """Values ``D(u_g)`` on the unitaries of a conjugation group.

    The algebra ``M_d`` acts on trace-class ``d x d`` matrices by left and
    right multiplication.  ``values[i]`` is ``D`` applied to the stored
    representative unitary of element ``i``.
    """

    group: GroupElements
    values: np.ndarray

    def __post_init__(self):
        if self.group.space.kind is not Kind.TRACE_CLASS:
            raise InputError("derivations need a group of unitary conjugations")
        if not all(isinstance(g.linear, UnitaryConjugation) and not g.translation.any()
                   for g in self.group.elements):
            raise InputError("derivation group must consist of linear unitary conjugations")
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (len(self.group), self.d, self.d):
            raise InputError(f"need {len(self.group)} values of shape {self.d}x{self.d}")
        self.values = vals

    @property
    def d(self):
        return self.group.space.d

    @property
    def unitaries(self) -> np.ndarray:
        return np.stack([g.linear.u for g in self.group.elements])

    @classmethod
    def inner(cls, group: GroupElements, w) -> "Derivation":
        """``D = ad_w``: ``u -> w u - u w``."""
        w = np.asarray(w, dtype=np.complex128)
        us = np.stack([g.linear.u for g in group.elements])
        return cls(group, w @ us - us @ w)

    @classmethod
    def from_generators(cls, group: GroupElements, gen_indices, gen_values) -> "Derivation":
        """Extend values given on generators to the whole group by the Leibniz rule."""
        d = group.space.d
        us = np.stack([g.linear.u for g in group.elements])
        vals = np.full((len(group), d, d), np.nan, dtype=np.complex128)
        vals[0] = 0.0
        for gi, val in zip(gen_indices, gen_values):
            vals[gi] = np.asarray(val, dtype=np.complex128)
        known = [0] + list(gen_indices)
        progress = True
        while progress and np.isnan(vals.real).any():
            progress = False
            for s in list(gen_indices):
                for e in list(known):
                    k = group.table[s, e]
                    if not np.isnan(vals[k].real).any():
                        continue
                    lam = _phase(us[s] @ us[e], us[k])
                    vals[k] = (vals[s] @ us[e] + us[s] @ vals[e]) / lam
                    known.append(k)
                    progress = True
        if np.isnan(vals.real).any():
            raise InputError("generators do not generate the group")
        return cls(group, vals)


def _phase(prod, rep):
    """Scalar ``lam`` with ``prod = lam rep`` for unitaries equal up to phase."""
    return np.trace(rep.conj().T @ prod) / rep.shape[0]


def leibniz_residuals(D: Derivation) -> np.ndarray:
    us = D.unitaries
    G = D.group
    k = len(G)
    out = np.empty((k, k))
    for i in range(k):
        for j in range(k):
            m = G.table[i, j]
            lam = _phase(us[i] @ us[j], us[m])
            diff = lam * D.values[m] - (D.values[i] @ us[j] + us[i] @ D.values[j])
            out[i, j] = trace_norm(diff)
    return out


def derivation_to_cocycle(D: Derivation, tol: float = 1e-9) -> Cocycle:
    """``g -> D(g) g^-1`` for the conjugation module."""
    res = leibniz_residuals(D)
    scale = max(1.0, max(trace_norm(v) for v in D.values))
    if res.max() > tol * scale:
        i, j = np.unravel_index(int(np.argmax(res)), res.shape)
        raise PreconditionError(
            f"Leibniz rule fails: worst pair (g={i}, h={j}) with residual {res.max():.3g}")
    us = D.unitaries
    vals = D.values @ np.conj(np.transpose(us, (0, 2, 1)))
    return Cocycle(D.group, matrix_to_point(vals).reshape(len(D.group), -1))


def solve_derivation(D: Derivation, *, iters: int = DEFAULT_ITERS, seed: int = 0) -> FixedPointResult:
    """``v`` with ``D(u_g) = v u_g - u_g v`` for every group element.

    ``extra['norm_D']`` is ``max_g ||D(g)||_tr``, a lower bound for the
    operator norm of ``D``; the norm bound is checked against it.
    """
    space = D.group.space
    c = derivation_to_cocycle(D)
    res = trivialize_cocycle(space, c, iters=iters, seed=seed)
    v = point_to_matrix(res.point, D.d)
    us = D.unitaries
    resid = max(trace_norm(D.values[i] - (v @ u - u @ v)) for i, u in enumerate(us))
    norm_d = max(trace_norm(x) for x in D.values)
    norm_v = trace_norm(v)
    res.extra.update({"matrix": v, "derivation_residual": resid, "norm_D": norm_d, "norm_v": norm_v})
    res.norm_bound_ok = norm_v <= norm_d + 1e-6
    return res


def extend_linear(D: Derivation, a) -> np.ndarray:
    """``D(a)`` for ``a`` in the span of the group unitaries, by linearity."""
    a = np.asarray(a, dtype=np.complex128)
    us = D.unitaries
    basis = us.reshape(len(us), -1).T
    coef, *_ = np.linalg.lstsq(basis, a.reshape(-1), rcond=None)
    if np.abs(basis @ coef - a.reshape(-1)).max() > 1e-9 * max(1.0, np.abs(a).max()):
        raise PreconditionError("element is not in the span of the group unitaries")
    return np.tensordot(coef, D.values, axes=1)


def unitary_decomposition(d: int, a) -> list:
    """Four ``(coefficient, unitary)`` pairs with ``a = sum coef * u``.

    ``a`` is scaled into the unit ball of the operator norm when needed; each
    Hermitian part ``h`` is written as ``(u + u*) / 2`` with
    ``u = h + i sqrt(1 - h^2)``, built on the eigenbasis of ``h``.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.shape != (d, d) or not np.all(np.isfinite(a)):
        raise InputError(f"expected a finite {d}x{d} matrix")
    s = max(1.0, operator_norm(a))
    b = a / s
    h1 = (b + b.conj().T) / 2
    h2 = (b - b.conj().T) / 2j
    out = []
    for lam, h in ((s / 2, h1), (1j * s / 2, h2)):
        w, q = kernels.herm_eig_jacobi(np.ascontiguousarray(h))
        w = np.clip(w, -1.0, 1.0)
        u = (q * (w + 1j * np.sqrt(1.0 - w * w))) @ q.conj().T
        out.append((complex(lam), u))
        out.append((complex(lam), u.conj().T))
    return out


def linearity_residual(D: Derivation, v, a) -> float:
    """``||(v a - a v) - D(a)||_tr`` where ``D(a)`` is assembled from a
    four-unitary decomposition of ``a``."""
    v = np.asarray(v, dtype=np.complex128)
    a = np.asarray(a, dtype=np.complex128)
    da = sum(lam * extend_linear(D, u) for lam, u in unitary_decomposition(D.d, a))
    return trace_norm((v @ a - a @ v) - da)
