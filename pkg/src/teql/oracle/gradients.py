"""
Finite-difference derivatives.
"""

from collections.abc import Callable

from teql.core.tensor import CpModel


def finite_diff_grad(loss_fn: Callable[[float], float], x: float, h: float = 1e-6) -> float:
    """
    Central difference ``(L(x + h) - L(x - h)) / 2h``.

    Raises:
        ValueError: If ``h <= 0``
    """
    if h <= 0:
        raise ValueError(f"Step h must be positive, got {h}")
    return (loss_fn(x + h) - loss_fn(x - h)) / (2.0 * h)


def factor_entry_closure(
    model: CpModel,
    mode: int,
    row: int,
    col: int,
    objective: Callable[[CpModel], float],
) -> Callable[[float], float]:
    """
    Objective as a function of one factor entry.

    The returned closure sets ``F_mode[row, col]`` (0-based) to its argument
    on a private copy of ``model`` and evaluates ``objective`` there.
    """
    work = model.copy()

    def closure(value: float) -> float:
        work.factors[mode][row, col] = value
        return objective(work)

    return closure
