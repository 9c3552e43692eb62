"""Tests for process settings and run configuration."""

import math
import os
from pathlib import Path
from unittest.mock import patch

import pytest
from pydantic import ValidationError

from teql.config import Settings
from teql.core.tensor import unit_product_scale
from teql.errors import ConfigurationError
from teql.schemas.learner import LearnerConfig
from teql.schemas.run import RunConfig, load_run_config


class TestSettings:
    """Test suite for Settings class."""

    def test_settings_default_values(self) -> None:
        """Test that settings load with default values."""
        with patch.dict(os.environ, {}, clear=True):
            settings = Settings(_env_file=None)

        assert settings.output_dir == Path("results")
        assert settings.workers == 1
        assert settings.master_seed == 0
        assert settings.log_level == "INFO"
        assert settings.log_format == "text"
        assert settings.debug is False

    def test_settings_from_environment(self) -> None:
        """Test that settings load from TEQL_ environment variables."""
        env_vars = {
            "TEQL_OUTPUT_DIR": "/tmp/bundles",
            "TEQL_WORKERS": "4",
            "TEQL_MASTER_SEED": "17",
            "TEQL_LOG_LEVEL": "DEBUG",
            "TEQL_LOG_FORMAT": "json",
        }

        with patch.dict(os.environ, env_vars, clear=False):
            settings = Settings(_env_file=None)

            assert settings.output_dir == Path("/tmp/bundles")
            assert settings.workers == 4
            assert settings.master_seed == 17
            assert settings.log_level == "DEBUG"
            assert settings.log_format == "json"

    def test_workers_validation(self) -> None:
        """Test worker count validation."""
        with pytest.raises(ValidationError) as exc_info:
            Settings(_env_file=None, workers=0)
        assert "greater than or equal to 1" in str(exc_info.value)

    def test_log_level_validation(self) -> None:
        """Test log level validation."""
        with pytest.raises(ValidationError):
            Settings(_env_file=None, log_level="VERBOSE")

    def test_log_level_case_insensitive(self) -> None:
        """Test that lower-case level names are accepted."""
        assert Settings(_env_file=None, log_level="warning").log_level == "WARNING"


class TestLearnerConfig:
    """Test learner hyperparameter resolution."""

    def test_defaults(self) -> None:
        """Test documented defaults."""
        cfg = LearnerConfig()
        assert cfg.learning_rate == 0.005
        assert cfg.lr_decay == 1e-5
        assert cfg.discount == 0.9
        assert cfg.tolerance == 0.01
        assert cfg.max_inner_iterations == 5
        assert cfg.penalty_epsilon == 1.0

    def test_auto_resolution(self) -> None:
        """Test lambda = sqrt(d_eff / T) and clip = 2 R_max / (1 - gamma)."""
        cfg = LearnerConfig().resolved(d_eff=50, total_steps=50_000, reward_bound=1.0)
        assert cfg.penalty == pytest.approx(math.sqrt(50 / 50_000))
        assert cfg.clip == pytest.approx(20.0)

    def test_explicit_values_survive_resolution(self) -> None:
        """Test that numbers and null are left alone."""
        cfg = LearnerConfig(penalty_weight=0.2, q_clip=None).resolved(10, 100, 5.0)
        assert cfg.penalty == 0.2
        assert cfg.clip is None

    def test_discount_range(self) -> None:
        """Test gamma in (0, 1)."""
        with pytest.raises(ValidationError):
            LearnerConfig(discount=1.0)

    @pytest.mark.parametrize(("field", "value"), [("penalty_weight", -1.0), ("q_clip", 0.0), ("row_step_cap", 1.5)])
    def test_rejects_out_of_range_values(self, field: str, value: float) -> None:
        """Test negative lambda, non-positive clip and a step cap above 1."""
        with pytest.raises(ValidationError, match=field):
            LearnerConfig(**{field: value})

    def test_row_step_cap_default_and_disable(self) -> None:
        """Test the default cap and null."""
        assert LearnerConfig().row_step_cap == 1.0
        assert LearnerConfig(row_step_cap=None).row_step_cap is None


class TestRunConfig:
    """Test run configuration defaults and derivation."""

    def test_resolved_cartpole_defaults(self) -> None:
        """Test grid, auto lambda and epsilon of the default CartPole run."""
        cfg = RunConfig().resolved()
        assert cfg.spec().dims == (10, 10, 20, 20, 10)
        assert cfg.learner.penalty == pytest.approx(math.sqrt(50 / 50_000))
        assert cfg.learner.clip == pytest.approx(20.0)
        assert cfg.policy.epsilon_initial == 0.0

    def test_auto_init_scale_follows_tensor_order(self) -> None:
        """Test that auto resolves to unit_product_scale(N, R) for the run's grid."""
        assert RunConfig().resolved().init_scale == pytest.approx(unit_product_scale(5, 10))
        assert RunConfig(environment="pendulum", rank=4).resolved().init_scale == pytest.approx(
            unit_product_scale(3, 4)
        )

    def test_regret_init_scale_uses_two_modes(self) -> None:
        """Test that the regret experiment resolves auto for a state-action matrix."""
        cfg = RunConfig(experiment="regret", rank=10)
        assert cfg.factor_scale() == pytest.approx(unit_product_scale(2, 10))

    def test_explicit_init_scale(self) -> None:
        """Test that a number is kept and a negative one rejected."""
        assert RunConfig(init_scale=0.1).resolved().init_scale == 0.1
        with pytest.raises(ValidationError, match="init_scale"):
            RunConfig(init_scale=-0.5)

    def test_pendulum_epsilon(self) -> None:
        """Test the Pendulum exploration default."""
        assert RunConfig(environment="pendulum").resolved().policy.epsilon_initial == 1.0

    def test_granularity_selects_bins(self) -> None:
        """Test named grid presets."""
        cfg = RunConfig(environment="pendulum", discretization={"granularity": "coarse"})
        assert cfg.spec().dims == (15, 15, 8)

    def test_rejects_wrong_bin_count(self) -> None:
        """Test that overrides must match the environment's dimensionality."""
        with pytest.raises(ValidationError, match="state_bins"):
            RunConfig(environment="pendulum", discretization={"state_bins": [5, 5, 5]})

    def test_rejects_unknown_field(self) -> None:
        """Test strict keys."""
        with pytest.raises(ValidationError):
            RunConfig(episods=10)

    def test_with_overrides_deep_merges(self) -> None:
        """Test that nested overrides keep sibling values."""
        cfg = RunConfig(learner={"learning_rate": 0.01}).with_overrides({"learner": {"discount": 0.95}})
        assert cfg.learner.learning_rate == 0.01
        assert cfg.learner.discount == 0.95


class TestLoadRunConfig:
    """Test YAML loading."""

    def test_defaults_without_file(self) -> None:
        """Test that no file gives the defaults."""
        assert load_run_config(None) == RunConfig()

    def test_file_and_overrides(self, tmp_path) -> None:
        """Test that CLI overrides win and None overrides are ignored."""
        path = tmp_path / "run.yaml"
        path.write_text("environment: pendulum\nepisodes: 40\nlearner:\n  learning_rate: 0.02\n")
        cfg = load_run_config(path, {"episodes": 10, "rank": None})
        assert cfg.environment == "pendulum"
        assert cfg.episodes == 10
        assert cfg.rank == 10
        assert cfg.learner.learning_rate == 0.02

    def test_empty_file(self, tmp_path) -> None:
        """Test that an empty YAML document gives the defaults."""
        path = tmp_path / "empty.yaml"
        path.write_text("")
        assert load_run_config(path) == RunConfig()

    def test_missing_file(self, tmp_path) -> None:
        """Test unreadable path."""
        with pytest.raises(ConfigurationError, match="Cannot read"):
            load_run_config(tmp_path / "absent.yaml")

    def test_non_mapping_root(self, tmp_path) -> None:
        """Test a YAML list."""
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ConfigurationError, match="mapping"):
            load_run_config(path)

    def test_validation_errors_are_listed(self, tmp_path) -> None:
        """Test that each failing field is reported."""
        path = tmp_path / "bad.yaml"
        path.write_text("episodes: 0\nrank: -1\n")
        with pytest.raises(ConfigurationError) as exc_info:
            load_run_config(path)
        errors = exc_info.value.context["errors"]
        assert len(errors) == 2
        assert any(e.startswith("episodes:") for e in errors)
