"""Chebyshev centres and invariant fixed points in finite-dimensional L1-type spaces."""
from .errors import InputError, L1FixedError, PreconditionError, ResourceError
from .spaces import (Kind, SpaceSpec, embed_direct_sum, matrix_to_point, norm, norms,
                     point_to_matrix, singular_values, split_direct_sum)
from .chebyshev import (CentreResult, Method, Selection, chebyshev_centre, circumradius,
                        subgradient_centre, verify_centre)

__version__ = "0.1.0"
