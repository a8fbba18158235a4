"""Runtime switches.

Set ``L1FIXED_DISABLE_NUMBA=1`` to force the pure-numpy kernels.  The numba
path is also skipped silently when numba cannot be imported.
"""
import os

DISABLE_NUMBA = os.environ.get("L1FIXED_DISABLE_NUMBA", "0").lower() in ("1", "true", "yes")

numba_default = {
    "nogil": True,
    "cache": True,
    "fastmath": False,
    "boundscheck": False,
    "error_model": "numpy",
}

# Jacobi sweeps stop once every off-diagonal ratio is below this.
JACOBI_THRESHOLD = 1e-14
JACOBI_MAX_SWEEPS = 100
