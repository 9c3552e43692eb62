"""
Dense reconstruction of a CP model for verification.
"""

import math

import numpy as np

from teql.core.tensor import CpModel
from teql.errors import DenseSizeError

#: Largest tensor (number of entries) ``dense_reconstruct`` will build
DENSE_SIZE_CAP = 100_000


def dense_reconstruct(model: CpModel, cap: int = DENSE_SIZE_CAP) -> np.ndarray:
    """
    Sum of the R rank-one outer products as an explicit array.

    Entry ``[i_1 - 1, ..., i_N - 1]`` of the result equals
    ``evaluate_q(model, (i_1, ..., i_N))``.

    Raises:
        DenseSizeError: If ``prod(dims)`` exceeds ``cap``
    """
    size = math.prod(model.dims)
    if size > cap:
        raise DenseSizeError(
            f"Dense tensor would have {size} entries (cap {cap})",
            dims=model.dims,
            cap=cap,
        )
    dense = np.zeros(model.dims)
    for r in range(model.rank):
        component = model.factors[0][:, r]
        for f in model.factors[1:]:
            component = np.multiply.outer(component, f[:, r])
        dense += component
    return dense
