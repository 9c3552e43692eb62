"""
Unit tests for experiment orchestration.
"""

import csv

import pytest

from teql.errors import ConfigurationError
from teql.harness.experiment import (
    CellTask,
    RegretTask,
    build_variants,
    derive_seed,
    run_cell,
    run_experiment,
    run_regret_cell,
)
from teql.harness.results import MANIFEST_FILE, METRICS_FILE, read_manifest
from teql.schemas.run import RunConfig


def _flatten(data: dict, prefix: str = "") -> dict[str, object]:
    flat: dict[str, object] = {}
    for key, value in data.items():
        path = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{path}."))
        else:
            flat[path] = value
    return flat


class TestDeriveSeed:
    """Test per-cell seed derivation."""

    def test_stable(self) -> None:
        """Test that the same key gives the same seed."""
        assert derive_seed(0, "teql", 3) == derive_seed(0, "teql", 3)

    def test_distinct_keys(self) -> None:
        """Test that master seed, variant and index all matter."""
        seeds = {
            derive_seed(0, "teql", 0),
            derive_seed(1, "teql", 0),
            derive_seed(0, "tlr", 0),
            derive_seed(0, "teql", 1),
        }
        assert len(seeds) == 4

    def test_non_negative_63_bit(self) -> None:
        """Test the seed range."""
        assert 0 <= derive_seed(123, "penalty", 9) < 2**63


class TestBuildVariants:
    """Test variant expansion."""

    def test_teql_vs_tlr_differ_only_in_tested_switches(self, tiny_run: RunConfig) -> None:
        """Test that the two variants share every other setting."""
        teql, tlr = build_variants(tiny_run)
        assert (teql.name, tlr.name) == ("teql", "tlr")
        a = _flatten(teql.config.model_dump(mode="json"))
        b = _flatten(tlr.config.model_dump(mode="json"))
        assert {k for k in a if a[k] != b[k]} == {"learner.penalty_weight", "policy.kind"}
        assert b["learner.penalty_weight"] == 0.0
        assert a["learner.penalty_weight"] > 0.0

    def test_variants_are_resolved(self, tiny_run: RunConfig) -> None:
        """Test that no auto value survives."""
        for variant in build_variants(tiny_run):
            assert variant.config.learner.penalty_weight != "auto"
            assert variant.config.learner.q_clip != "auto"
            assert variant.config.policy.epsilon_initial is not None

    def test_ablation(self, tiny_run: RunConfig) -> None:
        """Test penalty on/off with EUGE in both."""
        variants = build_variants(tiny_run.with_overrides({"experiment": "ablation_penalty"}))
        assert [v.name for v in variants] == ["penalty", "no_penalty"]
        assert {v.config.policy.kind for v in variants} == {"euge"}
        assert variants[1].config.learner.penalty_weight == 0.0

    def test_ablation_requires_penalty(self, tiny_run: RunConfig) -> None:
        """Test that a zero penalty makes the ablation meaningless."""
        cfg = tiny_run.with_overrides({"experiment": "ablation_penalty", "learner": {"penalty_weight": 0.0}})
        with pytest.raises(ConfigurationError):
            build_variants(cfg)

    def test_granularity_sweep(self, tiny_run: RunConfig) -> None:
        """Test one variant per preset, growing grids."""
        variants = build_variants(tiny_run.with_overrides({"experiment": "granularity_sweep"}))
        assert [v.name for v in variants] == [
            "teql_very_coarse",
            "teql_coarse",
            "teql_median",
            "teql_fine",
            "teql_very_fine",
        ]
        sizes = [v.config.spec().total_pairs for v in variants]
        assert sizes == sorted(sizes)

    def test_granularity_sweep_with_baseline(self, tiny_run: RunConfig) -> None:
        """Test interleaved TLR variants."""
        cfg = tiny_run.with_overrides({"experiment": "granularity_sweep", "include_baseline": True})
        names = [v.name for v in build_variants(cfg)]
        assert len(names) == 10
        assert names[:2] == ["teql_very_coarse", "tlr_very_coarse"]


class TestRunCell:
    """Test single-cell execution."""

    def test_completed(self, tiny_run: RunConfig) -> None:
        """Test a healthy cell."""
        task = CellTask(variant="teql", seed_index=0, seed=1, config=build_variants(tiny_run)[0].config)
        outcome, result = run_cell(task)
        assert outcome.status == "completed"
        assert result is not None
        assert outcome.episodes == 6
        assert outcome.steps == result.steps

    def test_failed_checkpoint_is_captured(self, tiny_run: RunConfig, tmp_path) -> None:
        """Test that package errors become a failed outcome."""
        (tmp_path / "state.json").write_text("{}")
        task = CellTask(
            variant="teql",
            seed_index=0,
            seed=1,
            config=build_variants(tiny_run)[0].config,
            checkpoint_dir=tmp_path,
            resume=True,
        )
        outcome, result = run_cell(task)
        assert outcome.status == "failed"
        assert result is None
        assert outcome.error is not None
        assert outcome.error["error"] == "CheckpointError"

    def test_regret_cell(self) -> None:
        """Test one short regret seed."""
        cfg = RunConfig(experiment="regret", rank=2, regret={"steps": 200, "n_states": 3, "n_actions": 2})
        outcome, trace = run_regret_cell(RegretTask(seed_index=0, seed=5, config=cfg.resolved()))
        assert outcome.status == "completed"
        assert trace is not None
        assert trace.steps == 200


class TestRunExperiment:
    """Test full bundles on tiny configurations."""

    async def test_teql_vs_tlr_bundle(self, tiny_run: RunConfig, tmp_path) -> None:
        """Test every file of a two-variant bundle."""
        manifest = await run_experiment(tiny_run, output_dir=tmp_path, workers=1, master_seed=7)
        assert len(manifest.cells) == 4
        assert {c.status for c in manifest.cells} == {"completed"}
        for name in (
            MANIFEST_FILE,
            METRICS_FILE,
            "rewards_teql_0.csv",
            "rewards_teql_1.csv",
            "rewards_tlr_0.csv",
            "rewards_tlr_1.csv",
            "aggregate_teql.csv",
            "aggregate_tlr.csv",
            "thresholds_teql.csv",
            "thresholds_tlr.csv",
        ):
            assert (tmp_path / name).exists(), name
        with (tmp_path / "aggregate_teql.csv").open() as f:
            assert len(list(csv.DictReader(f))) == 6
        assert "teql_cells_total" in (tmp_path / METRICS_FILE).read_text()

    async def test_manifest_contents(self, tiny_run: RunConfig, tmp_path) -> None:
        """Test statistics metadata and seeds recorded in the manifest."""
        await run_experiment(tiny_run, output_dir=tmp_path, workers=1, master_seed=7)
        manifest = read_manifest(tmp_path)
        assert manifest.statistics is not None
        assert manifest.statistics.smoothing_window == 3
        assert manifest.statistics.percentile_method == "linear"
        assert manifest.statistics.threshold_floor is not None
        assert manifest.statistics.threshold_reference is not None
        assert manifest.settings == {"workers": 1, "master_seed": 7}
        assert set(manifest.variants) == {"teql", "tlr"}
        assert manifest.finished_at is not None
        seeds = {(c.variant, c.seed_index): c.seed for c in manifest.cells}
        assert seeds[("tlr", 1)] == derive_seed(7, "tlr", 1)

    async def test_dry_run(self, tiny_run: RunConfig, tmp_path) -> None:
        """Test that a dry run writes only the manifest."""
        manifest = await run_experiment(tiny_run, output_dir=tmp_path, workers=1, dry_run=True)
        assert manifest.dry_run
        assert {c.status for c in manifest.cells} == {"skipped"}
        assert not list(tmp_path.glob("rewards_*.csv"))
        assert (tmp_path / MANIFEST_FILE).exists()

    async def test_diverged_cells_are_logged(self, tiny_run: RunConfig, tmp_path) -> None:
        """Test the divergence log and exclusion from aggregates."""
        cfg = tiny_run.with_overrides(
            {"learner": {"learning_rate": 1e300, "q_clip": None, "row_step_cap": None}}
        )
        manifest = await run_experiment(cfg, output_dir=tmp_path, workers=1, master_seed=0)
        assert manifest.diverged
        assert len(manifest.divergence_log) == 4
        assert {entry["error"] for entry in manifest.divergence_log} == {"DivergedUpdateError"}
        assert not (tmp_path / "aggregate_teql.csv").exists()

    async def test_regret_study(self, tmp_path) -> None:
        """Test regret bundle files."""
        cfg = RunConfig(
            experiment="regret",
            seeds=2,
            rank=2,
            regret={"steps": 300, "n_states": 3, "n_actions": 2, "window": 50},
        )
        manifest = await run_experiment(cfg, output_dir=tmp_path, workers=1, master_seed=0)
        assert manifest.experiment == "regret"
        assert len(manifest.cells) == 2
        for name in ("regret_0.csv", "regret_1.csv", "regret_window_0.csv", "regret_summary.csv"):
            assert (tmp_path / name).exists(), name
        with (tmp_path / "regret_summary.csv").open() as f:
            rows = list(csv.DictReader(f))
        assert [row["seed"] for row in rows] == ["0", "1"]
        assert all(row["decreased"] in ("0", "1") for row in rows)
