"""
Run configuration.

A ``RunConfig`` describes one experiment: environment, discretization,
learner and policy settings, episode budget and seed count. It is loaded
from YAML with nested ``discretization``/``learner``/``policy``/``regret``
sections; anything omitted falls back to the environment preset.
"""

from pathlib import Path
from typing import Any, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from teql.core.discretization import DiscretizationSpec
from teql.core.tensor import unit_product_scale
from teql.envs.registry import EnvironmentId, GranularityName, get_preset
from teql.errors import ConfigurationError
from teql.schemas.learner import LearnerConfig
from teql.schemas.policy import PolicyConfig

ExperimentKind = Literal["teql_vs_tlr", "ablation_penalty", "granularity_sweep", "regret"]


class DiscretizationConfig(BaseModel):
    """Grid overrides; unset fields come from the environment preset."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    granularity: GranularityName | None = Field(
        default=None,
        description="Named granularity preset (overrides the default bins)",
    )
    state_bins: list[int] | None = Field(default=None, description="Bins per state dimension")
    action_bins: list[int] | None = Field(default=None, description="Bins per action dimension")
    state_bounds: list[tuple[float, float]] | None = Field(
        default=None,
        description="(min, max) per state dimension",
    )
    action_bounds: list[tuple[float, float]] | None = Field(
        default=None,
        description="(min, max) per action dimension",
    )


class RegretConfig(BaseModel):
    """Synthetic-MDP regret experiment settings."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_states: int = Field(default=5, ge=1, description="Number of MDP states")
    n_actions: int = Field(default=3, ge=1, description="Number of MDP actions")
    steps: int = Field(default=20_000, ge=2, description="Interaction steps T per seed")
    restart_every: int = Field(default=200, ge=1, description="Random restart period in steps")
    mdp_seed: int = Field(default=0, ge=0, description="Seed of the generated MDP")
    window: int = Field(default=500, ge=1, description="Window for averaged regret")


class RunConfig(BaseModel):
    """Full description of an experiment."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    environment: EnvironmentId = Field(default="cartpole", description="Environment id")
    experiment: ExperimentKind = Field(default="teql_vs_tlr", description="Experiment kind")
    episodes: int = Field(default=500, ge=1, description="Episodes per seed")
    max_steps: int = Field(default=100, ge=1, description="Step cap per episode")
    seeds: int = Field(default=10, ge=1, description="Seeds per variant")
    rank: int = Field(default=10, ge=1, description="CP rank R")
    init_scale: float | Literal["auto"] = Field(
        default="auto",
        description="Half-width of the uniform factor initialization; auto = unit_product_scale(N, R)",
    )
    discretization: DiscretizationConfig = Field(default_factory=DiscretizationConfig)
    learner: LearnerConfig = Field(default_factory=LearnerConfig)
    policy: PolicyConfig = Field(default_factory=PolicyConfig)
    regret: RegretConfig = Field(default_factory=RegretConfig)
    output_dir: Path | None = Field(default=None, description="Result bundle directory")
    checkpoint_every: int = Field(
        default=0,
        ge=0,
        description="Checkpoint period in episodes (0 disables)",
    )
    include_baseline: bool = Field(
        default=False,
        description="Also run the TLR baseline at every granularity preset",
    )
    smoothing_window: int = Field(default=50, ge=1, description="Trailing reward window")

    @field_validator("init_scale")
    @classmethod
    def validate_init_scale(cls, v: float | str) -> float | str:
        if not isinstance(v, str) and v < 0:
            raise ValueError("init_scale must be non-negative or 'auto'")
        return v

    @model_validator(mode="after")
    def validate_discretization(self) -> "RunConfig":
        """Check bin/bound overrides against the environment's dimensionality."""
        preset = get_preset(self.environment)
        d = self.discretization
        for name, values, expected in (
            ("state_bins", d.state_bins, len(preset.state_bins)),
            ("action_bins", d.action_bins, len(preset.action_bins)),
            ("state_bounds", d.state_bounds, len(preset.state_bounds)),
            ("action_bounds", d.action_bounds, len(preset.action_bounds)),
        ):
            if values is not None and len(values) != expected:
                raise ValueError(
                    f"discretization.{name} has {len(values)} entries, "
                    f"{self.environment} expects {expected}"
                )
        return self

    @property
    def total_steps(self) -> int:
        """Planned environment steps T = episodes * max_steps."""
        return self.episodes * self.max_steps

    def spec(self) -> DiscretizationSpec:
        """Concrete discretization for this run."""
        preset = get_preset(self.environment)
        d = self.discretization
        if d.granularity is not None:
            state_bins, action_bins = preset.granularities[d.granularity]
        else:
            state_bins, action_bins = preset.state_bins, preset.action_bins
        return DiscretizationSpec.from_bins(
            d.state_bounds or preset.state_bounds,
            d.state_bins or state_bins,
            d.action_bounds or preset.action_bounds,
            d.action_bins or action_bins,
        )

    def factor_scale(self) -> float:
        """Initialization half-width, with ``auto`` resolved for this run's tensor order."""
        if self.init_scale == "auto":
            n_dims = 2 if self.experiment == "regret" else len(self.spec().dims)
            return unit_product_scale(n_dims, self.rank)
        return float(self.init_scale)

    def resolved(self) -> "RunConfig":
        """
        Copy with every derived default made explicit.

        Fills discretization bins/bounds, lambda = sqrt(d_eff / T),
        q_clip = 2 R_max / (1 - gamma), the initialization scale and the
        environment's initial epsilon.
        """
        spec = self.spec()
        preset = get_preset(self.environment)
        if self.experiment == "regret":
            d_eff = self.rank * 2
            total_steps = self.regret.steps
            reward_bound = 1.0
        else:
            d_eff = self.rank * len(spec.dims)
            total_steps = self.total_steps
            reward_bound = preset.make(self.max_steps).reward_bound

        policy = self.policy
        if policy.epsilon_initial is None:
            policy = policy.model_copy(update={"epsilon_initial": preset.epsilon_initial})

        discretization = DiscretizationConfig(
            state_bins=[d.bins for d in spec.state],
            action_bins=[d.bins for d in spec.action],
            state_bounds=[(d.lower, d.upper) for d in spec.state],
            action_bounds=[(d.lower, d.upper) for d in spec.action],
        )
        return self.model_copy(
            update={
                "discretization": discretization,
                "init_scale": self.factor_scale(),
                "learner": self.learner.resolved(d_eff, total_steps, reward_bound),
                "policy": policy,
            }
        )

    def with_overrides(self, overrides: dict[str, Any]) -> "RunConfig":
        """Validated copy with ``overrides`` deep-merged into the current values."""
        data = _deep_merge(self.model_dump(mode="python"), overrides)
        return RunConfig.model_validate(data)


def _deep_merge(base: dict[str, Any], overrides: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_run_config(path: Path | None, overrides: dict[str, Any] | None = None) -> RunConfig:
    """
    Load a run configuration from YAML.

    Args:
        path: YAML file, or None for all defaults
        overrides: Values merged over the file (e.g. from CLI flags)

    Raises:
        ConfigurationError: If the file is unreadable or fails validation
    """
    data: dict[str, Any] = {}
    if path is not None:
        try:
            loaded = yaml.safe_load(path.read_text())
        except (OSError, yaml.YAMLError) as e:
            raise ConfigurationError(f"Cannot read config {path}: {e}", path=str(path)) from e
        if loaded is not None and not isinstance(loaded, dict):
            raise ConfigurationError("Config root must be a mapping", path=str(path))
        data = loaded or {}
    data = _deep_merge(data, {k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(
            f"Invalid run configuration: {e.error_count()} error(s)",
            errors=[f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()],
        ) from e
