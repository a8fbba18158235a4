"""Loop kernels compiled with numba.

Every function here has a vectorized twin in ``_numpy`` with the same
signature and semantics; the two are cross-checked in the test suite.

Space layouts are passed as three int arrays ``kinds, offs, sizes`` (one entry
per block, kind 0 = weighted l1 with ``sizes`` coordinates, kind 1 = complex
``sizes`` x ``sizes`` matrices stored as interleaved (re, im) pairs) plus a
flat ``weights`` array aligned with the real coordinates.
"""
import numpy as np
from numba import njit

from .._config import JACOBI_MAX_SWEEPS, JACOBI_THRESHOLD, numba_default

L1 = 0
TRACE = 1


@njit(**numba_default)
def svd_jacobi(m):
    """One-sided (Hestenes) Jacobi SVD of a square complex matrix.

    Each rotation zeroes one off-diagonal entry of ``m* m``.  Returns
    ``(u, s, v)`` with ``s`` non-increasing and ``m = u diag(s) v*``; columns
    of ``u`` belonging to zero singular values are left as zero vectors.
    """
    d = m.shape[0]
    a = m.copy()
    v = np.eye(d, dtype=np.complex128)
    for _ in range(JACOBI_MAX_SWEEPS):
        rotated = False
        for p in range(d - 1):
            for q in range(p + 1, d):
                alpha = 0.0
                beta = 0.0
                gamma = 0.0 + 0.0j
                for i in range(d):
                    alpha += a[i, p].real ** 2 + a[i, p].imag ** 2
                    beta += a[i, q].real ** 2 + a[i, q].imag ** 2
                    gamma += np.conj(a[i, p]) * a[i, q]
                g = abs(gamma)
                if g == 0.0 or g <= JACOBI_THRESHOLD * np.sqrt(alpha * beta):
                    continue
                rotated = True
                phase = np.conj(gamma) / g
                zeta = (beta - alpha) / (2.0 * g)
                sgn = 1.0 if zeta >= 0.0 else -1.0
                t = sgn / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                for i in range(d):
                    ap = a[i, p]
                    aq = a[i, q] * phase
                    a[i, p] = c * ap - s * aq
                    a[i, q] = s * ap + c * aq
                    vp = v[i, p]
                    vq = v[i, q] * phase
                    v[i, p] = c * vp - s * vq
                    v[i, q] = s * vp + c * vq
        if not rotated:
            break
    sv = np.empty(d)
    for j in range(d):
        acc = 0.0
        for i in range(d):
            acc += a[i, j].real ** 2 + a[i, j].imag ** 2
        sv[j] = np.sqrt(acc)
    order = np.argsort(-sv)
    u = np.zeros((d, d), dtype=np.complex128)
    s_out = np.empty(d)
    v_out = np.empty((d, d), dtype=np.complex128)
    for k in range(d):
        j = order[k]
        s_out[k] = sv[j]
        for i in range(d):
            v_out[i, k] = v[i, j]
            if sv[j] > 0.0:
                u[i, k] = a[i, j] / sv[j]
    return u, s_out, v_out


@njit(**numba_default)
def herm_eig_jacobi(h):
    """Cyclic two-sided Jacobi for a Hermitian matrix: ``h = q diag(w) q*``.

    Eigenvalues are returned in ascending order.
    """
    d = h.shape[0]
    a = h.copy()
    q = np.eye(d, dtype=np.complex128)
    for _ in range(JACOBI_MAX_SWEEPS):
        off = 0.0
        diag = 0.0
        for i in range(d):
            diag += a[i, i].real ** 2
            for j in range(d):
                if i != j:
                    off += a[i, j].real ** 2 + a[i, j].imag ** 2
        if off <= (JACOBI_THRESHOLD ** 2) * max(diag, 1e-300):
            break
        for p in range(d - 1):
            for r in range(p + 1, d):
                g = abs(a[p, r])
                if g == 0.0:
                    continue
                phase = np.conj(a[p, r]) / g
                tau = (a[r, r].real - a[p, p].real) / (2.0 * g)
                sgn = 1.0 if tau >= 0.0 else -1.0
                t = sgn / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                # columns: scale column r by phase, then rotate
                for i in range(d):
                    xp = a[i, p]
                    xr = a[i, r] * phase
                    a[i, p] = c * xp - s * xr
                    a[i, r] = s * xp + c * xr
                    yp = q[i, p]
                    yr = q[i, r] * phase
                    q[i, p] = c * yp - s * yr
                    q[i, r] = s * yp + c * yr
                # rows: scale row r by conj(phase), then rotate
                cp = np.conj(phase)
                for j in range(d):
                    xp = a[p, j]
                    xr = a[r, j] * cp
                    a[p, j] = c * xp - s * xr
                    a[r, j] = s * xp + c * xr
                a[p, r] = 0.0
                a[r, p] = 0.0
                a[p, p] = a[p, p].real
                a[r, r] = a[r, r].real
    w = np.empty(d)
    for i in range(d):
        w[i] = a[i, i].real
    order = np.argsort(w)
    w_out = np.empty(d)
    q_out = np.empty((d, d), dtype=np.complex128)
    for k in range(d):
        w_out[k] = w[order[k]]
        for i in range(d):
            q_out[i, k] = q[i, order[k]]
    return w_out, q_out


@njit(**numba_default)
def _unflatten(x, off, d):
    m = np.empty((d, d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            k = off + 2 * (i * d + j)
            m[i, j] = x[k] + 1j * x[k + 1]
    return m


@njit(**numba_default)
def norm_and_subgrad(kinds, offs, sizes, weights, x, grad, want_grad):
    """Norm of ``x``; writes the minimal-norm subgradient into ``grad``."""
    total = 0.0
    for b in range(kinds.shape[0]):
        off = offs[b]
        n = sizes[b]
        if kinds[b] == L1:
            for i in range(off, off + n):
                xi = x[i]
                total += weights[i] * abs(xi)
                if want_grad:
                    if xi > 0.0:
                        grad[i] = weights[i]
                    elif xi < 0.0:
                        grad[i] = -weights[i]
                    else:
                        grad[i] = 0.0
        else:
            m = _unflatten(x, off, n)
            u, s, v = svd_jacobi(m)
            for k in range(n):
                total += s[k]
            if want_grad:
                cut = 1e-12 * max(s[0], 1e-300)
                for i in range(n):
                    for j in range(n):
                        acc = 0.0 + 0.0j
                        for k in range(n):
                            if s[k] > cut:
                                acc += u[i, k] * np.conj(v[j, k])
                        idx = off + 2 * (i * n + j)
                        grad[idx] = acc.real
                        grad[idx + 1] = acc.imag
    return total


@njit(**numba_default)
def batch_norms(kinds, offs, sizes, weights, pts):
    out = np.empty(pts.shape[0])
    scratch = np.empty(pts.shape[1])
    for k in range(pts.shape[0]):
        out[k] = norm_and_subgrad(kinds, offs, sizes, weights, pts[k], scratch, False)
    return out


@njit(**numba_default)
def _max_distance(kinds, offs, sizes, weights, pts, x, diff, grad, want_grad):
    best = -1.0
    arg = 0
    for k in range(pts.shape[0]):
        for i in range(x.shape[0]):
            diff[i] = x[i] - pts[k, i]
        val = norm_and_subgrad(kinds, offs, sizes, weights, diff, grad, False)
        if val > best:
            best = val
            arg = k
    if want_grad:
        for i in range(x.shape[0]):
            diff[i] = x[i] - pts[arg, i]
        norm_and_subgrad(kinds, offs, sizes, weights, diff, grad, True)
    return best, arg


@njit(**numba_default)
def subgradient_minimax(kinds, offs, sizes, weights, pts, x0, iters, h0, noise):
    """Subgradient descent on ``f(x) = max_k ||x - pts[k]||`` with restarts.

    ``iters`` steps are split into ``noise.shape[0]`` epochs.  Epoch ``e``
    restarts from the best iterate (plus ``noise[e]``) and uses step
    ``h0 2^-e / sqrt(j)`` along the normalized subgradient.
    Returns ``(best_x, best_f)``.
    """
    dim = x0.shape[0]
    epochs = noise.shape[0]
    diff = np.empty(dim)
    grad = np.zeros(dim)
    best_x = x0.copy()
    best_f, _ = _max_distance(kinds, offs, sizes, weights, pts, best_x, diff, grad, False)
    x = x0.copy()
    per_epoch = max(iters // epochs, 1)
    done = 0
    for e in range(epochs):
        if done >= iters:
            break
        h = h0 * 0.5 ** e
        for i in range(dim):
            x[i] = best_x[i] + noise[e, i]
        for j in range(1, per_epoch + 1):
            if done >= iters:
                break
            done += 1
            f, _ = _max_distance(kinds, offs, sizes, weights, pts, x, diff, grad, True)
            if f < best_f:
                best_f = f
                for i in range(dim):
                    best_x[i] = x[i]
            gn = 0.0
            for i in range(dim):
                gn += grad[i] * grad[i]
            if gn == 0.0:
                break
            step = h / np.sqrt(j) / np.sqrt(gn)
            for i in range(dim):
                x[i] -= step * grad[i]
    f, _ = _max_distance(kinds, offs, sizes, weights, pts, x, diff, grad, False)
    if f < best_f:
        best_f = f
        best_x[:] = x
    return best_x, best_f


@njit(**numba_default)
def _pivot(t, r, j):
    rows, cols = t.shape
    piv = t[r, j]
    for k in range(cols):
        t[r, k] /= piv
    for i in range(rows):
        if i == r:
            continue
        f = t[i, j]
        if f != 0.0:
            for k in range(cols):
                t[i, k] -= f * t[r, k]
        t[i, j] = 0.0
    t[r, j] = 1.0


@njit(**numba_default)
def simplex_pivots(t, basis, ncols, tol, max_iter):
    """Primal simplex on a dense tableau with Bland's rule.

    ``t`` is ``(m+1, N+1)``: constraint rows ``[A | b]`` followed by the
    reduced-cost row ``[c | -z]``.  Only columns ``< ncols`` may enter.
    Status: 0 optimal, 1 unbounded, 2 iteration cap.
    """
    m = t.shape[0] - 1
    rhs = t.shape[1] - 1
    it = 0
    while True:
        j = -1
        for k in range(ncols):
            if t[m, k] < -tol:
                j = k
                break
        if j < 0:
            return 0, it
        best = np.inf
        for i in range(m):
            if t[i, j] > tol:
                ratio = t[i, rhs] / t[i, j]
                if ratio < best:
                    best = ratio
        r = -1
        if best < np.inf:
            cut = best + 1e-12 * (1.0 + abs(best))
            for i in range(m):
                if t[i, j] > tol and t[i, rhs] / t[i, j] <= cut:
                    if r < 0 or basis[i] < basis[r]:
                        r = i
        if r < 0:
            return 1, it
        if it >= max_iter:
            return 2, it
        _pivot(t, r, j)
        basis[r] = j
        it += 1
