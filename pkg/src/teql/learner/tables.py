"""
Sparse visit-count and decomposition-error tables.

Keys are full 1-based index tuples; absent keys read as zero, so memory
grows with the number of distinct visited pairs only.
"""

from collections.abc import Iterator, Sequence
from pathlib import Path

import numpy as np

from teql.core.tensor import IndexTuple
from teql.errors import CheckpointError

_HEADER = "# teql-tables v1"


class StatTables:
    """
    Visit counts ``N(s, a)``, per-state totals ``N_total(s)`` and the last
    decomposition error ``Q_error(s, a)``.
    """

    def __init__(self, n_state_dims: int) -> None:
        self.n_state_dims = n_state_dims
        self.visit: dict[IndexTuple, int] = {}
        self.state_total: dict[IndexTuple, int] = {}
        self.q_error: dict[IndexTuple, float] = {}

    def __len__(self) -> int:
        return len(self.visit)

    def __iter__(self) -> Iterator[IndexTuple]:
        return iter(self.visit)

    def visit_count(self, idx: IndexTuple) -> int:
        return self.visit.get(idx, 0)

    def total_visits(self, state_idx: IndexTuple) -> int:
        return self.state_total.get(state_idx, 0)

    def error(self, idx: IndexTuple) -> float:
        return self.q_error.get(idx, 0.0)

    def record(self, idx: IndexTuple, q_error: float) -> None:
        """Store the latest error for ``idx`` and count one visit."""
        if q_error < 0:
            raise ValueError(f"q_error must be non-negative, got {q_error}")
        state = idx[: self.n_state_dims]
        self.q_error[idx] = q_error
        self.visit[idx] = self.visit.get(idx, 0) + 1
        self.state_total[state] = self.state_total.get(state, 0) + 1

    def action_counts(self, state_idx: IndexTuple, actions: Sequence[IndexTuple]) -> np.ndarray:
        """``N(s, a)`` for every action in ``actions``."""
        return np.array([self.visit.get(state_idx + a, 0) for a in actions], dtype=np.float64)

    def action_errors(self, state_idx: IndexTuple, actions: Sequence[IndexTuple]) -> np.ndarray:
        """``Q_error(s, a)`` for every action in ``actions``."""
        return np.array([self.q_error.get(state_idx + a, 0.0) for a in actions])

    def is_consistent(self) -> bool:
        """Check ``N_total(s) == sum_a N(s, a)`` for every stored state."""
        totals: dict[IndexTuple, int] = {}
        for idx, count in self.visit.items():
            state = idx[: self.n_state_dims]
            totals[state] = totals.get(state, 0) + count
        return totals == self.state_total

    def dump(self, path: Path) -> None:
        """
        Write one line per visited pair: ``i_1,...,i_N<TAB>count<TAB>error``.

        Errors are written with ``repr`` so reloading is exact.
        """
        lines = [f"{_HEADER} n_state_dims={self.n_state_dims}"]
        for idx in sorted(self.visit):
            key = ",".join(str(i) for i in idx)
            lines.append(f"{key}\t{self.visit[idx]}\t{self.error(idx)!r}")
        path.write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path: Path) -> "StatTables":
        """
        Read tables written by ``dump``.

        Raises:
            CheckpointError: If the file is missing or malformed
        """
        try:
            text = path.read_text()
        except OSError as e:
            raise CheckpointError(f"Cannot read tables file {path}: {e}") from e

        lines = text.splitlines()
        if not lines or not lines[0].startswith(_HEADER):
            raise CheckpointError("Missing tables header", path=str(path))
        try:
            n_state_dims = int(lines[0].rsplit("=", 1)[1])
            tables = cls(n_state_dims)
            for number, line in enumerate(lines[1:], start=2):
                if not line:
                    continue
                key, count, error = line.split("\t")
                idx = tuple(int(i) for i in key.split(","))
                if int(count) < 1:
                    raise ValueError(f"line {number}: count must be positive")
                tables.visit[idx] = int(count)
                tables.q_error[idx] = float(error)
                state = idx[:n_state_dims]
                tables.state_total[state] = tables.state_total.get(state, 0) + int(count)
        except (IndexError, ValueError) as e:
            raise CheckpointError(f"Corrupt tables file: {e}", path=str(path)) from e
        return tables
