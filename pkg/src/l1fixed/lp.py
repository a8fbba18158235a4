"""Dense two-phase simplex and the minimax-l1 reduction.

The Chebyshev problem ``min_v max_a sum_i w_i |v_i - a_i|`` becomes

    minimize r
    subject to  v_i - t_ai <= a_i,  -v_i - t_ai <= -a_i,  sum_i w_i t_ai - r <= 0
                t >= 0,  v and r free.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InputError, ResourceError
from .spaces import Kind, SpaceSpec

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-9
MAX_ITER = 10 ** 6


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class LinearProgram:
    """``minimize c.x`` subject to ``A x (<= | =) b``; ``free[j]`` marks unbounded variables,
    the rest are non-negative."""

    c: np.ndarray
    A: np.ndarray
    rel: tuple
    b: np.ndarray
    free: np.ndarray
    names: tuple = ()

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float)
        free = np.asarray(self.free, dtype=bool)
        if A.shape != (b.shape[0], c.shape[0]) or free.shape != c.shape:
            raise InputError(f"inconsistent LP shapes: A {A.shape}, b {b.shape}, c {c.shape}")
        if len(self.rel) != b.shape[0] or any(r not in ("<=", "=") for r in self.rel):
            raise InputError("each row needs a relation '<=' or '='")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise InputError("LP data must be finite")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "free", free)
        object.__setattr__(self, "rel", tuple(self.rel))

    @property
    def shape(self):
        return self.A.shape

    def dump(self) -> str:
        """Debug text: objective line, then one constraint per line."""
        names = self.names or tuple(f"x{j}" for j in range(self.c.shape[0]))

        def expr(coefs):
            terms = [f"{v:+.17g} {names[j]}" for j, v in enumerate(coefs) if v != 0.0]
            return " ".join(terms) if terms else "0"

        lines = [f"minimize {expr(self.c)}"]
        for i in range(self.b.shape[0]):
            lines.append(f"c{i}: {expr(self.A[i])} {self.rel[i]} {self.b[i]:.17g}")
        lines.append("free " + " ".join(n for n, f in zip(names, self.free) if f))
        return "\n".join(lines) + "\n"


@dataclass
class LpSolution:
    status: Status
    value: float
    primal: np.ndarray
    basis: list
    iterations: int
    dual: np.ndarray = field(default=None, repr=False)


def build_chebyshev_lp(space: SpaceSpec, A) -> LinearProgram:
    if space.kind is not Kind.WEIGHTED_L1:
        raise InputError(f"the LP route needs a weighted_l1 space, got {space!r}")
    pts = space.points(A)
    m, n = pts.shape
    w = np.asarray(space.weights)
    nvar = n + m * n + 1
    rows = 2 * m * n + m
    M = np.zeros((rows, nvar))
    b = np.zeros(rows)
    r_col = nvar - 1
    row = 0
    for k in range(m):
        for i in range(n):
            t_col = n + k * n + i
            M[row, i], M[row, t_col], b[row] = 1.0, -1.0, pts[k, i]
            M[row + 1, i], M[row + 1, t_col], b[row + 1] = -1.0, -1.0, -pts[k, i]
            row += 2
    for k in range(m):
        M[row, n + k * n:n + (k + 1) * n] = w
        M[row, r_col] = -1.0
        row += 1
    c = np.zeros(nvar)
    c[r_col] = 1.0
    free = np.zeros(nvar, dtype=bool)
    free[:n] = True
    free[r_col] = True
    names = tuple([f"v{i}" for i in range(n)]
                  + [f"t{k}_{i}" for k in range(m) for i in range(n)] + ["r"])
    return LinearProgram(c, M, ("<=",) * rows, b, free, names)


def _standard_form(lp: LinearProgram):
    """Columns: split structurals, then one slack per '<=' row.  Rows are
    sign-normalized so that ``b >= 0``."""
    m, n = lp.shape
    cols, cost, colmap = [], [], []
    for j in range(n):
        cols.append(lp.A[:, j])
        cost.append(lp.c[j])
        if lp.free[j]:
            cols.append(-lp.A[:, j])
            cost.append(-lp.c[j])
            colmap.append((len(cols) - 2, len(cols) - 1))
        else:
            colmap.append((len(cols) - 1, -1))
    n_struct = len(cols)
    slack_row = []
    for i, rel in enumerate(lp.rel):
        if rel == "<=":
            e = np.zeros(m)
            e[i] = 1.0
            cols.append(e)
            cost.append(0.0)
            slack_row.append(i)
    S = np.column_stack(cols) if cols else np.zeros((m, 0))
    b = lp.b.copy()
    sign = np.where(b < 0, -1.0, 1.0)
    S = S * sign[:, None]
    b = b * sign
    slack_of_row = {i: n_struct + k for k, i in enumerate(slack_row)}
    return S, np.array(cost), b, sign, colmap, slack_of_row


def _run(t, basis, ncols):
    status, it = kernels.simplex_pivots(t, basis, ncols, PIVOT_TOL, MAX_ITER)
    if status == 2:
        raise ResourceError(f"simplex exceeded the iteration cap of {MAX_ITER}")
    return status, it


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Two-phase dense simplex with Bland's rule."""
    S, cost, b, sign, colmap, slack_of_row = _standard_form(lp)
    m, N = S.shape
    n = lp.shape[1]

    basis = np.full(m, -1, dtype=np.int64)
    for i, j in slack_of_row.items():
        if sign[i] > 0:
            basis[i] = j
    art_rows = np.flatnonzero(basis < 0)
    n_art = art_rows.shape[0]

    t = np.zeros((m + 1, N + n_art + 1))
    t[:m, :N] = S
    t[:m, -1] = b
    for k, i in enumerate(art_rows):
        t[i, N + k] = 1.0
        basis[i] = N + k
    iterations = 0
    if n_art:
        t[m, :N] = -S[art_rows].sum(axis=0)
        t[m, -1] = -b[art_rows].sum()
        _, it = _run(t, basis, N)
        iterations += it
        if -t[m, -1] > FEAS_TOL * (1.0 + np.abs(b).max()):
            return LpSolution(Status.INFEASIBLE, np.nan, np.full(n, np.nan), basis.tolist(), iterations)
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if basis[i] >= N:
                cand = np.flatnonzero(np.abs(t[i, :N]) > PIVOT_TOL)
                if cand.size == 0:
                    keep[i] = False
                    continue
                j = cand[0]
                t[i] /= t[i, j]
                f = t[:, j].copy()
                f[i] = 0.0
                t -= np.outer(f, t[i])
                basis[i] = j
        rows = np.flatnonzero(keep)
        t = np.vstack([t[rows][:, list(range(N)) + [t.shape[1] - 1]], np.zeros((1, N + 1))])
        basis = basis[rows].copy()
    else:
        rows = np.arange(m)
    mm = rows.shape[0]
    cb = cost[basis]
    t[mm, :N] = cost - cb @ t[:mm, :N]
    t[mm, -1] = -cb @ t[:mm, -1]
    status, it = _run(t, basis, N)
    iterations += it
    if status == 1:
        return LpSolution(Status.UNBOUNDED, -np.inf, np.full(n, np.nan), basis.tolist(), iterations)

    xs = np.zeros(N)
    xs[basis] = t[:mm, -1]
    x = np.array([xs[p] - (xs[q] if q >= 0 else 0.0) for p, q in colmap])

    # dual of the standard form, mapped back to the original rows
    B = S[rows][:, basis]
    y_std = np.linalg.solve(B.T, cost[basis])
    y = np.zeros(m)
    y[rows] = y_std * sign[rows]
    return LpSolution(Status.OPTIMAL, float(lp.c @ x), x, basis.tolist(), iterations, y)


def duality_violation(lp: LinearProgram, sol: LpSolution) -> float:
    """Worst violation among dual feasibility, complementary slackness and the
    duality gap for an optimal solution's dual certificate."""
    x, y = sol.primal, sol.dual
    viol = 0.0
    le = np.array([r == "<=" for r in lp.rel])
    if le.any():
        viol = max(viol, float(np.max(y[le], initial=0.0)))
    red = lp.c - lp.A.T @ y
    if lp.free.any():
        viol = max(viol, float(np.abs(red[lp.free]).max()))
    nonneg = ~lp.free
    if nonneg.any():
        viol = max(viol, float(np.max(-red[nonneg], initial=0.0)))
        viol = max(viol, float(np.abs(x[nonneg] * red[nonneg]).max()))
    slack = lp.A @ x - lp.b
    viol = max(viol, float(np.abs(y * slack).max(initial=0.0)))
    viol = max(viol, abs(float(lp.b @ y) - float(lp.c @ x)))
    return viol


def primal_violation(lp: LinearProgram, x) -> float:
    slack = lp.A @ x - lp.b
    le = np.array([r == "<=" for r in lp.rel])
    v = np.where(le, np.maximum(slack, 0.0), np.abs(slack))
    neg = np.where(lp.free, 0.0, np.maximum(-x, 0.0))
    return float(max(v.max(initial=0.0), neg.max(initial=0.0)))
