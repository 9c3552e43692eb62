"""
Per-transition low-rank Q-update.

For one observed transition the target ``r + gamma * max_a' Q(s', a')`` is
computed from the pre-update model, then each factor row ``F_n[i_n, :]``
is moved by up to ``I_max`` gradient steps on the penalized loss

    L = 1/2 (y - Q)^2 - lambda * Q^2 / (N + eps)

where ``N`` is the visit count of the pair before this observation.

The step size of a row is ``min(alpha_t, c / ||prod_{m != n} F_m(i_m, :)||^2)``
with ``c = row_step_cap``. Without penalty one step then closes at most
the fraction ``c`` of the TD error at the updated entry.
"""

import math
from dataclasses import dataclass

import numpy as np

from teql.core.tensor import CpModel, IndexTuple, max_q_over_actions
from teql.errors import DivergedUpdateError
from teql.learner.tables import StatTables
from teql.schemas.learner import LearnerConfig
from teql.utils.validation import validate_index


@dataclass(frozen=True, slots=True)
class Transition:
    """
    One observation ``(s, a, r, s', terminal)`` as index tuples.

    ``terminal`` is set only for true terminal states; a step-cap
    truncation still bootstraps.
    """

    state: IndexTuple
    action: IndexTuple
    reward: float
    next_state: IndexTuple
    terminal: bool = False

    @property
    def index(self) -> IndexTuple:
        """Full index tuple ``(s; a)``."""
        return self.state + self.action


@dataclass(frozen=True, slots=True)
class UpdateReport:
    """Diagnostics of one ``bcd_update`` call."""

    target: float
    td_error: float
    q_before: float
    q_after: float
    q_error: float
    learning_rate: float
    inner_iterations: tuple[int, ...]
    clipped: bool
    step_capped: bool = False


def compute_target(model: CpModel, transition: Transition, gamma: float) -> float:
    """
    TD target ``r + gamma * max_a' Q(s', a')``; the bootstrap is 0 on terminal transitions.
    """
    if transition.terminal:
        return float(transition.reward)
    _, best = max_q_over_actions(model, transition.next_state)
    return float(transition.reward) + gamma * best


def _penalized_loss(q: float, target: float, visit_count: float, cfg: LearnerConfig) -> float:
    return 0.5 * (target - q) ** 2 - cfg.penalty * q**2 / (visit_count + cfg.penalty_epsilon)


def _gradient_scale(q: float, target: float, weight: float) -> float:
    # dL/dQ with weight = lambda / (N + eps); times the other modes' rows gives the entry gradient
    return -(target - q) - 2.0 * weight * q


def _row_step(alpha: float, others: np.ndarray, cap: float | None) -> float:
    # Q is linear in the row with slope ||others||^2; a step of 1 / ||others||^2 lands on the target
    norm_sq = float(others @ others)
    if cap is not None and norm_sq * alpha > cap:
        return cap / norm_sq
    return alpha


def _other_modes(rows: list[np.ndarray], mode: int) -> np.ndarray:
    product = np.ones_like(rows[0])
    for m, row in enumerate(rows):
        if m != mode:
            product *= row
    return product


def loss(
    model: CpModel,
    idx: IndexTuple,
    target: float,
    visit_count: float,
    cfg: LearnerConfig,
) -> float:
    """Penalized loss ``1/2 (y - Q)^2 - lambda Q^2 / (N + eps)`` at ``idx``."""
    return _penalized_loss(model.evaluate(idx), target, visit_count, cfg)


def grad_row(
    model: CpModel,
    idx: IndexTuple,
    target: float,
    visit_count: float,
    cfg: LearnerConfig,
    mode: int,
) -> np.ndarray:
    """Gradient of ``loss`` with respect to the whole row ``F_mode[i_mode, :]``."""
    rows = model.rows(idx)
    q = model.evaluate(idx)
    weight = cfg.penalty / (visit_count + cfg.penalty_epsilon)
    return _gradient_scale(q, target, weight) * _other_modes(rows, mode)


def grad_factor_entry(
    model: CpModel,
    idx: IndexTuple,
    target: float,
    visit_count: float,
    cfg: LearnerConfig,
    mode: int,
    rank: int,
) -> float:
    """
    Analytic derivative of ``loss`` with respect to ``F_mode[i_mode, rank]``.

    ``mode`` and ``rank`` are 0-based positions (matrix and column).
    """
    return float(grad_row(model, idx, target, visit_count, cfg, mode)[rank])


def bcd_update(
    model: CpModel,
    transition: Transition,
    tables: StatTables,
    cfg: LearnerConfig,
    t: int,
) -> UpdateReport:
    """
    Apply one block coordinate descent update in place.

    Modes are visited in order. Each inner iteration updates every entry
    of the row at once from gradients taken at the start of the iteration,
    then recomputes Q; the step size is capped so that one step cannot
    overshoot the target. The loop stops when Q moved less than ``tolerance``
    since the previous iteration (the first iteration compares against the
    pre-update value). Afterwards the decomposition error is stored and
    the visit count incremented.

    Args:
        model: Model to update; only rows indexed by the transition change
        transition: Observation to learn from
        tables: Visit and error tables, updated in place
        cfg: Resolved learner config
        t: 1-based global step counter

    Returns:
        Update diagnostics, including the recorded ``q_error``

    Raises:
        DivergedUpdateError: If Q becomes non-finite
    """
    if t < 1:
        raise ValueError(f"Step counter t must be >= 1, got {t}")
    idx = validate_index(transition.index, model.dims)
    penalty = cfg.penalty
    clip = cfg.clip
    alpha = cfg.learning_rate_at(t)

    target = compute_target(model, transition, cfg.discount)
    visit_count = tables.visit_count(idx)
    weight = penalty / (visit_count + cfg.penalty_epsilon)
    rows = model.rows(idx)
    rank, n_dims = model.rank, model.n_dims

    q_before = float(np.prod(rows, axis=0).sum())
    model.touches += rank * n_dims

    q_curr = q_before
    iterations: list[int] = []
    capped = False
    for mode in range(n_dims):
        q_prev = q_before
        others = _other_modes(rows, mode)
        model.touches += rank * (n_dims - 1)
        step = _row_step(alpha, others, cfg.row_step_cap)
        capped |= step < alpha
        used = 0
        for used in range(1, cfg.max_inner_iterations + 1):
            scale = _gradient_scale(q_curr, target, weight)
            rows[mode] -= step * scale * others
            q_curr = float(rows[mode] @ others)
            model.touches += 2 * rank
            if abs(q_curr - q_prev) < cfg.tolerance:
                break
            q_prev = q_curr
        iterations.append(used)

    if not math.isfinite(q_curr):
        raise DivergedUpdateError(
            f"Non-finite Q-value {q_curr} after update at step {t}",
            index=idx,
            step=t,
            value=q_curr,
        )

    clipped = False
    if clip is not None and abs(q_curr) > clip:
        shrink = (clip / abs(q_curr)) ** (1.0 / n_dims)
        for row in rows:
            row *= shrink
        q_curr = float(np.prod(rows, axis=0).sum())
        model.touches += 2 * rank * n_dims
        clipped = True

    q_error = abs(q_before - q_curr)
    tables.record(idx, q_error)

    return UpdateReport(
        target=target,
        td_error=target - q_before,
        q_before=q_before,
        q_after=q_curr,
        q_error=q_error,
        learning_rate=alpha,
        inner_iterations=tuple(iterations),
        clipped=clipped,
        step_capped=capped,
    )
