"""
Small tabular MDP with an exactly computable optimal Q-function.

Used for regret measurement: transitions are Dirichlet(1, ..., 1) rows,
rewards are U[0, 1], and Q* comes from value iteration.
"""

from dataclasses import dataclass

import numpy as np

from teql.errors import InvalidMdpError

_ROW_SUM_ATOL = 1e-9


@dataclass(frozen=True)
class SyntheticMdp:
    """
    Finite MDP ``<S, A, P, R, gamma>``.

    Attributes:
        transitions: ``(S, A, S)`` kernel, each ``[s, a, :]`` a distribution
        rewards: ``(S, A)`` expected rewards
        gamma: Discount in ``(0, 1)``
    """

    transitions: np.ndarray
    rewards: np.ndarray
    gamma: float

    def __post_init__(self) -> None:
        p, r = self.transitions, self.rewards
        if p.ndim != 3 or p.shape[0] != p.shape[2] or r.shape != p.shape[:2]:
            raise InvalidMdpError(
                "Kernel must be (S, A, S) and rewards (S, A)",
                transitions_shape=tuple(p.shape),
                rewards_shape=tuple(r.shape),
            )
        if not 0 < self.gamma < 1:
            raise InvalidMdpError(f"gamma must lie in (0, 1), got {self.gamma}", gamma=self.gamma)
        if np.any(p < 0) or not np.allclose(p.sum(axis=2), 1.0, atol=_ROW_SUM_ATOL):
            raise InvalidMdpError("Transition rows must be probability distributions")

    @property
    def n_states(self) -> int:
        return self.transitions.shape[0]

    @property
    def n_actions(self) -> int:
        return self.transitions.shape[1]

    @property
    def reward_bound(self) -> float:
        """R_max = max |R(s, a)|."""
        return float(np.max(np.abs(self.rewards)))

    def step(self, state: int, action: int, rng: np.random.Generator) -> tuple[int, float]:
        """Sample ``(next_state, reward)`` from state and action (0-based)."""
        next_state = int(rng.choice(self.n_states, p=self.transitions[state, action]))
        return next_state, float(self.rewards[state, action])


def generate_mdp(n_states: int, n_actions: int, gamma: float, seed: int) -> SyntheticMdp:
    """
    Draw a random MDP with Dirichlet(1) transition rows and U[0, 1] rewards.

    Args:
        n_states: Number of states S >= 1
        n_actions: Number of actions A >= 1
        gamma: Discount in ``(0, 1)``
        seed: Generator seed

    Returns:
        Seed-deterministic MDP
    """
    if n_states < 1 or n_actions < 1:
        raise InvalidMdpError("MDP needs at least one state and one action")
    rng = np.random.default_rng(seed)
    transitions = rng.dirichlet(np.ones(n_states), size=(n_states, n_actions))
    rewards = rng.uniform(0.0, 1.0, size=(n_states, n_actions))
    return SyntheticMdp(transitions=transitions, rewards=rewards, gamma=gamma)


def bellman_backup(mdp: SyntheticMdp, q: np.ndarray) -> np.ndarray:
    """Optimality operator ``(TQ)(s, a) = R(s, a) + gamma * sum_s' P(s'|s, a) max_a' Q(s', a')``."""
    return mdp.rewards + mdp.gamma * mdp.transitions @ q.max(axis=1)


def synthetic_q_star(mdp: SyntheticMdp, tol: float = 1e-10, max_iter: int = 1_000_000) -> np.ndarray:
    """
    Optimal Q-function by value iteration.

    Iterates the Bellman optimality operator until successive iterates
    differ by less than ``tol`` in sup-norm.

    Returns:
        ``(S, A)`` table Q*

    Raises:
        InvalidMdpError: If value iteration does not converge in ``max_iter``
    """
    q = np.zeros_like(mdp.rewards, dtype=np.float64)
    for _ in range(max_iter):
        q_next = bellman_backup(mdp, q)
        if np.max(np.abs(q_next - q)) < tol:
            return q_next
        q = q_next
    raise InvalidMdpError("Value iteration did not converge", max_iter=max_iter)
