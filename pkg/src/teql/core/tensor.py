"""
CP-factorized Q-function storage.

A ``CpModel`` holds N factor matrices ``F_n`` of shape ``d_n x R``; the
Q-value at a 1-based index tuple ``(i_1, ..., i_N)`` is
``sum_r prod_n F_n[i_n - 1, r]``. The first ``n_state_dims`` modes index
the state, the remaining modes index the action grid.

Factors are stored 0-based internally; every public index is 1-based.
"""

import json
import math
from collections.abc import Sequence
from functools import cached_property
from pathlib import Path
from typing import Any

import numpy as np

from teql.errors import CheckpointError
from teql.utils.validation import validate_index

IndexTuple = tuple[int, ...]

FORMAT_NAME = "teql-cp"
FORMAT_VERSION = 1


class CpModel:
    """
    Rank-R CP factorization of a Q-tensor.

    Attributes:
        factors: One ``(d_n, R)`` float64 matrix per mode
        n_state_dims: Number of leading modes that index the state
        touches: Running count of factor entries read or written, used to
            check the per-update cost model
    """

    def __init__(self, factors: Sequence[np.ndarray], n_state_dims: int) -> None:
        """
        Initialize model from factor matrices.

        Args:
            factors: Factor matrices, all with the same number of columns
            n_state_dims: Number of leading state modes (``1 <= D_S < N``)

        Raises:
            ValueError: If the factors are empty, ranks disagree or the
                state/action split is out of range
        """
        if not factors:
            raise ValueError("At least one factor matrix is required")
        rank = factors[0].shape[1]
        if rank < 1:
            raise ValueError("Rank must be at least 1")
        for n, f in enumerate(factors):
            if f.ndim != 2 or f.shape[1] != rank or f.shape[0] < 1:
                raise ValueError(f"Factor {n} has shape {f.shape}, expected (d_{n}, {rank})")
        if not 1 <= n_state_dims < len(factors):
            raise ValueError(
                f"n_state_dims={n_state_dims} must name at least one state mode and "
                f"leave at least one action mode out of {len(factors)}"
            )

        self.factors: list[np.ndarray] = [np.array(f, dtype=np.float64) for f in factors]
        self.n_state_dims = n_state_dims
        self.touches = 0

    @property
    def rank(self) -> int:
        """CP rank R."""
        return self.factors[0].shape[1]

    @property
    def dims(self) -> tuple[int, ...]:
        """Mode sizes ``(d_1, ..., d_N)``."""
        return tuple(f.shape[0] for f in self.factors)

    @property
    def n_dims(self) -> int:
        """Tensor order N."""
        return len(self.factors)

    @property
    def n_action_dims(self) -> int:
        """Number of trailing action modes D_A."""
        return self.n_dims - self.n_state_dims

    @property
    def state_dims(self) -> tuple[int, ...]:
        return self.dims[: self.n_state_dims]

    @property
    def action_dims(self) -> tuple[int, ...]:
        return self.dims[self.n_state_dims :]

    @cached_property
    def action_grid(self) -> list[IndexTuple]:
        """All action index tuples in lexicographic order (1-based)."""
        return [tuple(int(i) + 1 for i in a) for a in np.ndindex(*self.action_dims)]

    def copy(self) -> "CpModel":
        """Deep copy with a fresh touch counter."""
        return CpModel([f.copy() for f in self.factors], self.n_state_dims)

    def rows(self, idx: IndexTuple) -> list[np.ndarray]:
        """
        Views of rows ``F_n[i_n - 1, :]`` for every mode.

        Writes through the returned views modify the model.
        """
        validate_index(idx, self.dims)
        return [f[i - 1] for f, i in zip(self.factors, idx, strict=True)]

    def evaluate(self, idx: IndexTuple) -> float:
        """Q-value at a full index tuple."""
        rows = self.rows(idx)
        product = rows[0].copy()
        for row in rows[1:]:
            product *= row
        self.touches += self.rank * self.n_dims
        return float(product.sum())

    def state_product(self, state_idx: IndexTuple) -> np.ndarray:
        """Elementwise product of the state-mode rows, shape ``(R,)``."""
        validate_index(state_idx, self.state_dims)
        product = np.ones(self.rank)
        for f, i in zip(self.factors[: self.n_state_dims], state_idx, strict=True):
            product *= f[i - 1]
        self.touches += self.rank * self.n_state_dims
        return product

    def action_values(self, state_idx: IndexTuple) -> np.ndarray:
        """
        Q-values of every grid action at a state.

        Returns:
            Array of length ``prod(action_dims)`` ordered like ``action_grid``
        """
        weights = self.state_product(state_idx)
        action_factors = self.factors[self.n_state_dims :]
        kr = action_factors[0]
        for f in action_factors[1:]:
            kr = (kr[:, None, :] * f[None, :, :]).reshape(-1, self.rank)
        self.touches += self.rank * sum(self.action_dims)
        return kr @ weights

    def parameter_count(self) -> int:
        """Number of stored factor entries, ``R * sum(d_n)``."""
        return self.rank * sum(self.dims)

    def effective_dimension(self) -> int:
        """Effective dimension ``d_eff = R * N``."""
        return self.rank * self.n_dims

    def to_dict(self) -> dict[str, Any]:
        """
        Serialize to a JSON-compatible layout.

        Header (N, R, dims, D_S) followed by the factors in mode order,
        each flattened row-major.
        """
        return {
            "format": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "n_dims": self.n_dims,
            "rank": self.rank,
            "dims": list(self.dims),
            "n_state_dims": self.n_state_dims,
            "factors": [f.ravel(order="C").tolist() for f in self.factors],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CpModel":
        """
        Rebuild a model from ``to_dict`` output.

        Raises:
            CheckpointError: If the layout is unrecognized or inconsistent
        """
        if data.get("format") != FORMAT_NAME or data.get("version") != FORMAT_VERSION:
            raise CheckpointError(
                "Unrecognized model format",
                format=data.get("format"),
                version=data.get("version"),
            )
        try:
            rank = int(data["rank"])
            dims = [int(d) for d in data["dims"]]
            flat = data["factors"]
            if len(dims) != int(data["n_dims"]) or len(flat) != len(dims):
                raise ValueError("mode count mismatch")
            factors = [
                np.asarray(values, dtype=np.float64).reshape(d, rank)
                for values, d in zip(flat, dims, strict=True)
            ]
            return cls(factors, int(data["n_state_dims"]))
        except (KeyError, TypeError, ValueError) as e:
            raise CheckpointError(f"Corrupt model payload: {e}") from e

    def save(self, path: Path) -> None:
        """Write the model as JSON."""
        path.write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path: Path) -> "CpModel":
        """Read a model written by ``save``."""
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise CheckpointError(f"Cannot read model file {path}: {e}") from e
        return cls.from_dict(data)


def init_model(
    dims: Sequence[int],
    rank: int,
    seed: int,
    scale: float = 0.1,
    n_state_dims: int | None = None,
) -> CpModel:
    """
    Create a model with i.i.d. uniform ``[-scale, scale]`` factor entries.

    Args:
        dims: Mode sizes, all positive
        rank: CP rank R >= 1
        seed: Seed for ``numpy.random.default_rng``
        scale: Half-width of the uniform support
        n_state_dims: Leading state modes (default: all but the last mode)

    Returns:
        New model, bit-identical for identical arguments

    Raises:
        ValueError: If dims is empty, any d_n < 1, rank < 1 or scale < 0
    """
    if not dims:
        raise ValueError("dims must not be empty")
    if any(d < 1 for d in dims):
        raise ValueError(f"All mode sizes must be positive, got {tuple(dims)}")
    if rank < 1:
        raise ValueError(f"Rank must be at least 1, got {rank}")
    if scale < 0:
        raise ValueError(f"scale must be non-negative, got {scale}")

    rng = np.random.default_rng(seed)
    factors = [rng.uniform(-scale, scale, size=(d, rank)) for d in dims]
    return CpModel(factors, len(dims) - 1 if n_state_dims is None else n_state_dims)


def unit_product_scale(n_dims: int, rank: int) -> float:
    """
    Uniform half-width giving ``E ||prod_{m != n} F_m(i_m, :)||^2 = 1``.

    With entries on ``[-a, a]`` each squared entry has mean ``a^2 / 3``,
    so the product of the other ``N - 1`` rows has expected squared norm
    ``R (a^2 / 3)^(N - 1)``. At this scale a single row step moves Q by
    about ``alpha`` times the TD error, whatever the tensor order.

    Raises:
        ValueError: If ``n_dims < 2`` or ``rank < 1``
    """
    if n_dims < 2:
        raise ValueError(f"At least two modes are required, got {n_dims}")
    if rank < 1:
        raise ValueError(f"Rank must be at least 1, got {rank}")
    return math.sqrt(3.0) * rank ** (-1.0 / (2 * (n_dims - 1)))


def evaluate_q(model: CpModel, idx: IndexTuple) -> float:
    """
    Q-value ``sum_r prod_n F_n(i_n, r)`` at a 1-based index tuple.

    Raises:
        IndexOutOfRangeError: If ``idx`` is not valid for ``model.dims``
    """
    return model.evaluate(idx)


def max_q_over_actions(model: CpModel, state_idx: IndexTuple) -> tuple[IndexTuple, float]:
    """
    Maximize Q over the full action grid at a state.

    Ties go to the lexicographically smallest action index tuple.

    Returns:
        ``(best_action_idx, best_value)``
    """
    values = model.action_values(state_idx)
    best = int(np.argmax(values))
    return model.action_grid[best], float(values[best])


def parameter_count(model: CpModel) -> int:
    """Number of stored parameters, ``R * sum(d_n)``."""
    return model.parameter_count()


def effective_dimension(model: CpModel) -> int:
    """Effective dimension ``d_eff = R * N``."""
    return model.effective_dimension()


def predicted_bcd_cost(dims: Sequence[int], rank: int, max_inner_iterations: int = 1) -> int:
    """Cost model for one update: ``I_max * R * sum(d_n)`` factor-entry touches."""
    return max_inner_iterations * rank * sum(dims)
