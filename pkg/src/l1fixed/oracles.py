"""Independent reference computations used to cross-check the solvers.

Nothing here shares code with the simplex, Jacobi or subgradient paths.
"""
import numpy as np


def grid_minimax_l1(weights, pts, points_per_dim=11, rounds=60):
    """``min_v max_a sum_i w_i |v_i - a_i|`` by nested grid refinement.

    Starts on the bounding box of the points (which contains a minimizer,
    since clipping coordinates never increases any distance) and halves the
    box around the best grid point each round.  Meant for dimension <= 3.
    """
    w = np.asarray(weights, dtype=float)
    pts = np.asarray(pts, dtype=float)
    n = pts.shape[1]
    centre = (pts.min(axis=0) + pts.max(axis=0)) / 2
    half = np.maximum((pts.max(axis=0) - pts.min(axis=0)) / 2, 1e-12)
    best = np.inf
    for _ in range(rounds):
        axes = [np.linspace(c - h, c + h, points_per_dim) for c, h in zip(centre, half)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
        vals = (np.abs(grid[:, None, :] - pts[None, :, :]) @ w).max(axis=1)
        k = int(np.argmin(vals))
        best = min(best, float(vals[k]))
        centre = grid[k]
        half = half * 0.5
    return best


def singular_values_charpoly(m):
    """Singular values of a ``d x d`` matrix (``d <= 3``) from the roots of the
    characteristic polynomial of ``m* m``."""
    m = np.asarray(m, dtype=np.complex128)
    d = m.shape[0]
    h = m.conj().T @ m
    tr = np.trace(h).real
    if d == 1:
        eig = np.array([tr])
    elif d == 2:
        det = np.linalg.det(h).real
        eig = np.roots([1.0, -tr, det])
    elif d == 3:
        c2 = 0.5 * (tr ** 2 - np.trace(h @ h).real)
        det = np.linalg.det(h).real
        eig = np.roots([1.0, -tr, c2, -det])
    else:
        raise ValueError("charpoly oracle handles d <= 3")
    eig = np.clip(np.real(eig), 0.0, None)
    return np.sort(np.sqrt(eig))[::-1]


def random_unitary(rng, d):
    """Haar-distributed unitary via QR with phase correction."""
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
