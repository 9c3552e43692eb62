"""
Input validation utilities.

Precondition checks shared by the tensor, discretization and environment
modules. Each raises a typed ``TeqlError`` carrying the offending input.
"""

import math
from collections.abc import Sequence

import numpy as np

from teql.errors import DimensionMismatchError, IndexOutOfRangeError, NonFiniteInputError


def validate_index(idx: Sequence[int], dims: Sequence[int]) -> tuple[int, ...]:
    """
    Validate a 1-based index tuple against mode sizes.

    Args:
        idx: Index tuple, each component in ``[1, d_n]``
        dims: Mode sizes ``(d_1, ..., d_N)``

    Returns:
        The index as a tuple of Python ints

    Raises:
        IndexOutOfRangeError: If the length or any component is out of range
    """
    if len(idx) != len(dims):
        raise IndexOutOfRangeError(
            f"Index has {len(idx)} components, expected {len(dims)}",
            index=tuple(int(i) for i in idx),
            dims=tuple(dims),
        )
    for position, (i, d) in enumerate(zip(idx, dims, strict=True)):
        if not 1 <= i <= d:
            raise IndexOutOfRangeError(
                f"Index component {position} = {i} outside [1, {d}]",
                index=tuple(int(i) for i in idx),
                dims=tuple(dims),
            )
    return tuple(int(i) for i in idx)


def validate_length(values: Sequence[float] | np.ndarray, expected: int, name: str) -> None:
    """
    Validate vector length.

    Raises:
        DimensionMismatchError: If ``len(values) != expected``
    """
    if len(values) != expected:
        raise DimensionMismatchError(
            f"{name} has length {len(values)}, expected {expected}",
            name=name,
            length=len(values),
            expected=expected,
        )


def ensure_not_nan(value: float, name: str) -> float:
    """
    Reject NaN input.

    Raises:
        NonFiniteInputError: If ``value`` is NaN
    """
    if math.isnan(value):
        raise NonFiniteInputError(f"{name} is NaN", name=name)
    return value


def ensure_finite_vector(values: np.ndarray, name: str) -> np.ndarray:
    """
    Reject vectors with NaN or infinite components.

    Raises:
        NonFiniteInputError: If any component is not finite
    """
    if not np.all(np.isfinite(values)):
        raise NonFiniteInputError(
            f"{name} contains non-finite values",
            name=name,
            values=[float(v) for v in values],
        )
    return values
