"""Pure-numpy twins of the numba kernels.

Same algorithms, vectorized along whatever axis the algorithm allows
(rows of a rotation, all points of a set, all rows of a pivot).
"""
import numpy as np

from .._config import JACOBI_MAX_SWEEPS, JACOBI_THRESHOLD

L1 = 0
TRACE = 1


def svd_jacobi(m):
    d = m.shape[0]
    a = np.array(m, dtype=np.complex128)
    v = np.eye(d, dtype=np.complex128)
    for _ in range(JACOBI_MAX_SWEEPS):
        rotated = False
        for p in range(d - 1):
            for q in range(p + 1, d):
                alpha = np.vdot(a[:, p], a[:, p]).real
                beta = np.vdot(a[:, q], a[:, q]).real
                gamma = np.vdot(a[:, p], a[:, q])
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
                for mat in (a, v):
                    cp = mat[:, p].copy()
                    cq = mat[:, q] * phase
                    mat[:, p] = c * cp - s * cq
                    mat[:, q] = s * cp + c * cq
        if not rotated:
            break
    sv = np.sqrt(np.sum(a.real ** 2 + a.imag ** 2, axis=0))
    order = np.argsort(-sv, kind="stable")
    sv = sv[order]
    a = a[:, order]
    v = v[:, order]
    u = np.zeros_like(a)
    nz = sv > 0.0
    u[:, nz] = a[:, nz] / sv[nz]
    return u, sv, v


def herm_eig_jacobi(h):
    d = h.shape[0]
    a = np.array(h, dtype=np.complex128)
    q = np.eye(d, dtype=np.complex128)
    for _ in range(JACOBI_MAX_SWEEPS):
        diag = np.sum(np.diag(a).real ** 2)
        off = np.sum(np.abs(a[~np.eye(d, dtype=bool)]) ** 2)
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
                for mat in (a, q):
                    xp = mat[:, p].copy()
                    xr = mat[:, r] * phase
                    mat[:, p] = c * xp - s * xr
                    mat[:, r] = s * xp + c * xr
                xp = a[p, :].copy()
                xr = a[r, :] * np.conj(phase)
                a[p, :] = c * xp - s * xr
                a[r, :] = s * xp + c * xr
                a[p, r] = a[r, p] = 0.0
                a[p, p] = a[p, p].real
                a[r, r] = a[r, r].real
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], q[:, order]


def _block_matrices(pts, off, d):
    block = pts[:, off:off + 2 * d * d]
    return (block[:, 0::2] + 1j * block[:, 1::2]).reshape(-1, d, d)


def _svd_batch(ms):
    """Batched one-sided Jacobi: the rotation for pair (p, q) is computed
    per matrix and applied to the whole stack at once."""
    k, d, _ = ms.shape
    a = ms.astype(np.complex128, copy=True)
    v = np.broadcast_to(np.eye(d, dtype=np.complex128), (k, d, d)).copy()
    for _ in range(JACOBI_MAX_SWEEPS):
        rotated = False
        for p in range(d - 1):
            for q in range(p + 1, d):
                alpha = np.sum(np.abs(a[:, :, p]) ** 2, axis=1)
                beta = np.sum(np.abs(a[:, :, q]) ** 2, axis=1)
                gamma = np.sum(np.conj(a[:, :, p]) * a[:, :, q], axis=1)
                g = np.abs(gamma)
                act = (g > 0.0) & (g > JACOBI_THRESHOLD * np.sqrt(alpha * beta))
                if not act.any():
                    continue
                rotated = True
                gs = np.where(act, g, 1.0)
                phase = np.where(act, np.conj(gamma) / gs, 1.0)
                zeta = (beta - alpha) / (2.0 * gs)
                sgn = np.where(zeta >= 0.0, 1.0, -1.0)
                t = np.where(act, sgn / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta)), 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                for mat in (a, v):
                    cp = mat[:, :, p].copy()
                    cq = mat[:, :, q] * phase[:, None]
                    mat[:, :, p] = c[:, None] * cp - s[:, None] * cq
                    mat[:, :, q] = s[:, None] * cp + c[:, None] * cq
        if not rotated:
            break
    sv = np.sqrt(np.sum(np.abs(a) ** 2, axis=1))
    order = np.argsort(-sv, axis=1, kind="stable")
    sv = np.take_along_axis(sv, order, axis=1)
    a = np.take_along_axis(a, order[:, None, :], axis=2)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    safe = np.where(sv > 0.0, sv, 1.0)
    u = np.where(sv[:, None, :] > 0.0, a / safe[:, None, :], 0.0)
    return u, sv, v


def _norms_and_grads(kinds, offs, sizes, weights, pts, want_grad):
    vals = np.zeros(pts.shape[0])
    grads = np.zeros_like(pts) if want_grad else None
    for kind, off, n in zip(kinds, offs, sizes):
        if kind == L1:
            blk = pts[:, off:off + n]
            w = weights[off:off + n]
            vals += np.abs(blk) @ w
            if want_grad:
                grads[:, off:off + n] = np.sign(blk) * w
        else:
            u, s, v = _svd_batch(_block_matrices(pts, off, n))
            vals += s.sum(axis=1)
            if want_grad:
                cut = 1e-12 * np.maximum(s[:, :1], 1e-300)
                keep = (s > cut).astype(float)
                g = np.einsum("bik,bk,bjk->bij", u, keep, np.conj(v))
                flat = grads[:, off:off + 2 * n * n]
                flat[:, 0::2] = g.real.reshape(-1, n * n)
                flat[:, 1::2] = g.imag.reshape(-1, n * n)
    return vals, grads


def batch_norms(kinds, offs, sizes, weights, pts):
    return _norms_and_grads(kinds, offs, sizes, weights, np.asarray(pts, dtype=float), False)[0]


def norm_and_subgrad(kinds, offs, sizes, weights, x, grad, want_grad):
    vals, grads = _norms_and_grads(kinds, offs, sizes, weights, x[None, :], want_grad)
    if want_grad:
        grad[:] = grads[0]
    return float(vals[0])


def subgradient_minimax(kinds, offs, sizes, weights, pts, x0, iters, h0, noise):
    def fmax(x):
        return batch_norms(kinds, offs, sizes, weights, x[None, :] - pts).max()

    dim = x0.shape[0]
    grad = np.zeros(dim)
    best_x = x0.copy()
    best_f = fmax(best_x)
    epochs = noise.shape[0]
    per_epoch = max(iters // epochs, 1)
    done = 0
    x = x0.copy()
    for e in range(epochs):
        if done >= iters:
            break
        h = h0 * 0.5 ** e
        x = best_x + noise[e]
        for j in range(1, per_epoch + 1):
            if done >= iters:
                break
            done += 1
            dists = batch_norms(kinds, offs, sizes, weights, x[None, :] - pts)
            k = int(np.argmax(dists))
            f = dists[k]
            if f < best_f:
                best_f = f
                best_x = x.copy()
            norm_and_subgrad(kinds, offs, sizes, weights, x - pts[k], grad, True)
            gn = float(grad @ grad)
            if gn == 0.0:
                break
            x = x - (h / np.sqrt(j) / np.sqrt(gn)) * grad
    f = fmax(x)
    if f < best_f:
        best_f = f
        best_x = x.copy()
    return best_x, best_f


def simplex_pivots(t, basis, ncols, tol, max_iter):
    m = t.shape[0] - 1
    it = 0
    while True:
        neg = np.flatnonzero(t[m, :ncols] < -tol)
        if neg.size == 0:
            return 0, it
        j = neg[0]
        col = t[:m, j]
        rows = np.flatnonzero(col > tol)
        if rows.size == 0:
            return 1, it
        ratios = t[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * (1.0 + abs(best))]
        r = ties[np.argmin(basis[ties])]
        if it >= max_iter:
            return 2, it
        t[r] /= t[r, j]
        f = t[:, j].copy()
        f[r] = 0.0
        t -= np.outer(f, t[r])
        t[:, j] = 0.0
        t[r, j] = 1.0
        basis[r] = j
        it += 1
