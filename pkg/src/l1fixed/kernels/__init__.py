"""Hot kernels, numba-compiled unless ``L1FIXED_DISABLE_NUMBA`` is set."""
from .._config import DISABLE_NUMBA

BACKEND = "numpy"
if not DISABLE_NUMBA:
    try:
        from . import _numba as _impl

        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba missing
        _impl = None
if BACKEND == "numpy":
    from . import _numpy as _impl

L1 = _impl.L1
TRACE = _impl.TRACE
svd_jacobi = _impl.svd_jacobi
herm_eig_jacobi = _impl.herm_eig_jacobi
batch_norms = _impl.batch_norms
norm_and_subgrad = _impl.norm_and_subgrad
subgradient_minimax = _impl.subgradient_minimax
simplex_pivots = _impl.simplex_pivots


def backends():
    """Importable kernel modules keyed by name (for tests and benchmarks)."""
    from . import _numpy

    mods = {"numpy": _numpy}
    try:
        from . import _numba

        mods["numba"] = _numba
    except ImportError:  # pragma: no cover
        pass
    return mods


def warmup():
    """Trigger JIT compilation of every kernel on tiny inputs."""
    import numpy as np

    m = np.eye(2, dtype=np.complex128)
    svd_jacobi(m)
    herm_eig_jacobi(m)
    kinds = np.array([L1, TRACE], dtype=np.int64)
    offs = np.array([0, 2], dtype=np.int64)
    sizes = np.array([2, 2], dtype=np.int64)
    w = np.ones(2)
    pts = np.random.default_rng(0).normal(size=(3, 10))
    batch_norms(kinds, offs, sizes, w, pts)
    x = pts.mean(axis=0)
    norm_and_subgrad(kinds, offs, sizes, w, x, np.zeros(10), True)
    subgradient_minimax(kinds, offs, sizes, w, pts, x.copy(), 10, 1.0, np.zeros((1, 10)))
    t = np.array([[1.0, 1.0, 1.0, 1.0], [1.0, 0.0, 0.0, 0.0]])
    simplex_pivots(t, np.array([2], dtype=np.int64), 3, 1e-9, 100)
