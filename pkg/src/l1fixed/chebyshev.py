"""Circumradius and Chebyshev centres.

Polyhedral spaces (weighted l1 and l1-sums of them) are solved exactly by the
LP in :mod:`l1fixed.lp`.  Spaces with a trace-class block go through
restarted subgradient descent, which reports an explicit suboptimality gap.
The subgradient path doubles as an independent oracle for the LP.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy.optimize import nnls

from . import kernels
from .errors import InputError, PreconditionError
from .lp import Status, build_chebyshev_lp, solve_lp
from .spaces import SpaceSpec, diameter, distances

DEFAULT_ITERS = 20_000
# 2^n facets per sign pattern; beyond this use AnyVertex
MAX_TIEBREAK_DIM = 14


class Selection(str, enum.Enum):
    ANY_VERTEX = "any_vertex"
    MIN_L2 = "min_l2"


class Method(str, enum.Enum):
    LP = "lp"
    SUBGRADIENT = "subgradient"


@dataclass
class CentreResult:
    radius: float
    centre: np.ndarray
    active: tuple
    method: Method
    gap: float = 0.0
    meta: dict = field(default_factory=dict)


@dataclass
class CentreCheck:
    ok: bool
    max_distance: float
    violations: list

    def __bool__(self):
        return self.ok


def _active(space, pts, c, radius, slack):
    d = distances(space, c, pts)
    return tuple(int(i) for i in np.flatnonzero(d >= radius - slack))


def _trivial(space, pts):
    if np.all(pts == pts[0]):
        c = pts[0].copy()
        return CentreResult(0.0, c, tuple(range(len(pts))), Method.LP, 0.0, {"selection": "trivial"})
    return None


def chebyshev_centre(space: SpaceSpec, A, selection=Selection.MIN_L2, *,
                     iters: int = DEFAULT_ITERS, seed: int = 0) -> CentreResult:
    """A point of the Chebyshev centre of ``A`` and the circumradius.

    Centres are rarely unique; ``selection`` picks one.  ``MIN_L2`` returns the
    centre closest in Euclidean distance to the barycentre of ``A`` (exact
    projection onto the centre polytope), ``ANY_VERTEX`` the simplex vertex.
    On non-polyhedral spaces the subgradient result is returned either way.
    """
    selection = Selection(selection)
    pts = space.points(A)
    triv = _trivial(space, pts)
    if triv is not None:
        return triv
    if not space.is_polyhedral:
        return subgradient_centre(space, pts, iters=iters, seed=seed)

    flat = space.as_l1()
    n = flat.dim
    lp = build_chebyshev_lp(flat, pts)
    sol = solve_lp(lp)
    if sol.status is not Status.OPTIMAL:  # pragma: no cover - the LP is always feasible and bounded
        raise PreconditionError(f"Chebyshev LP returned {sol.status.value}")
    radius = max(sol.value, 0.0)
    c = sol.primal[:n].copy()
    meta = {"selection": selection.value, "lp_iterations": sol.iterations}
    if selection is Selection.MIN_L2:
        c = min_l2_centre(flat, pts, c, radius)
    slack = 1e-9 * max(1.0, radius)
    return CentreResult(radius, c, _active(space, pts, c, radius, slack), Method.LP, 0.0, meta)


def min_l2_centre(space: SpaceSpec, pts, feasible, radius):
    """Euclidean projection of the barycentre onto the centre polytope.

    The centre set of a weighted l1 space is
    ``{v : s.(w*v) <= r + min_a s.(w*a)  for every sign vector s}``;
    the projection is a least-distance program solved through NNLS.
    ``feasible`` is any known member (the LP vertex); the radius used is
    relaxed to that vertex's own value so the polytope is never empty.
    """
    n = space.dim
    if n > MAX_TIEBREAK_DIM:
        raise InputError(f"min_l2 selection supports dimension <= {MAX_TIEBREAK_DIM}; use any_vertex")
    w = np.asarray(space.weights)
    r_eff = max(radius, float(distances(space, feasible, pts).max()))
    z = pts.mean(axis=0)
    if distances(space, z, pts).max() <= r_eff:
        return z
    signs = np.array(list(product((1.0, -1.0), repeat=n)))
    ws = signs * w
    bound = r_eff + (ws @ pts.T).min(axis=1)
    # least-distance form: G y >= h with v = z + y
    G = -ws
    h = -bound + ws @ z
    E = np.vstack([G.T, h[None, :]])
    f = np.zeros(n + 1)
    f[n] = 1.0
    u, _ = nnls(E, f, maxiter=50 * E.shape[1])
    res = E @ u - f
    if abs(res[n]) < 1e-300:  # pragma: no cover - excluded by r_eff
        return feasible
    v = z - res[:n] / res[n]
    over = distances(space, v, pts).max() - r_eff
    if over > 1e-9 * max(1.0, r_eff):
        # pull back towards the known feasible vertex just enough
        lo, hi = 0.0, 1.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if distances(space, feasible + mid * (v - feasible), pts).max() <= r_eff:
                lo = mid
            else:
                hi = mid
        v = feasible + lo * (v - feasible)
    return v


def subgradient_centre(space: SpaceSpec, A, iters: int = DEFAULT_ITERS, seed: int = 0, *,
                       epochs: int | None = None, jitter: float = 0.0) -> CentreResult:
    """Restarted subgradient descent on ``f(v) = max_a ||v - a||`` from the barycentre.

    The step along the normalized subgradient is ``h / sqrt(k)`` where ``h``
    starts at the Euclidean diameter of ``A`` and halves at each restart.
    Restarts resume from the best iterate, optionally jittered by a
    ``seed``-driven Gaussian of relative size ``jitter``.  The returned centre
    is the best point seen (points of ``A`` included); ``gap`` bounds the
    suboptimality using ``diam(A) / 2 <= rho``.
    """
    if iters < 1:
        raise InputError("iters must be >= 1")
    pts = np.ascontiguousarray(space.points(A))
    diam = diameter(space, pts)
    bary = pts.mean(axis=0)
    meta = {"iters": int(iters), "seed": int(seed)}
    if diam == 0.0:
        return CentreResult(0.0, pts[0].copy(), tuple(range(len(pts))), Method.SUBGRADIENT, 0.0, meta)
    diffs = pts[:, None, :] - pts[None, :, :]
    h0 = float(np.sqrt((diffs ** 2).sum(axis=2)).max())
    if epochs is None:
        epochs = int(np.clip(iters // 2000, 1, 40))
    epochs = min(epochs, iters)
    rng = np.random.default_rng(seed)
    noise = np.zeros((epochs, space.dim))
    if jitter > 0.0:
        noise = rng.normal(size=noise.shape) * jitter * h0 * 0.5 ** np.arange(epochs)[:, None]
        noise[0] = 0.0
    kinds, offs, sizes, w = space.layout
    x, fx = kernels.subgradient_minimax(kinds, offs, sizes, w, pts, bary.copy(), int(iters), h0, noise)
    x = np.asarray(x)
    fx = float(fx)
    # a point of A is a feasible candidate with value <= diam
    own = np.array([distances(space, p, pts).max() for p in pts])
    k = int(np.argmin(own))
    if own[k] < fx:
        x, fx = pts[k].copy(), float(own[k])
    gap = max(fx - diam / 2.0, 0.0)
    meta["epochs"] = epochs
    slack = 1e-9 * max(1.0, fx)
    return CentreResult(fx, x, _active(space, pts, x, fx, slack), Method.SUBGRADIENT, gap, meta)


def circumradius(space: SpaceSpec, A, **kwargs) -> float:
    return chebyshev_centre(space, A, Selection.ANY_VERTEX, **kwargs).radius


def verify_centre(space: SpaceSpec, A, c, r: float, tol: float = 1e-9) -> CentreCheck:
    """Is ``c`` in the intersection of the closed balls ``B(a, r + tol)``?"""
    if tol <= 0:
        raise InputError("tol must be positive")
    pts = space.points(A)
    d = distances(space, c, pts)
    bad = [(int(i), float(d[i])) for i in np.flatnonzero(d > r + tol)]
    return CentreCheck(not bad, float(d.max()), bad)
