import numpy as np
import pytest

import seis.harness as harness
from seis.errors import DegenerateRankError, ValidationError
from seis.harness import (
    ConditionSummary,
    HarnessConfig,
    gen_synthetic_activations,
    make_alternate,
    run_condition,
    run_validation_suite,
)
from seis.transforms import CONDITION_ORDER, ConditionKind, make_stream

SMALL = HarnessConfig(dims=(4, 8, 10, 10), trials=3, master_seed=11)


def lag1_autocorr(cfg, seed):
    """Pooled lag-1 spatial autocorrelation across >= 100 slices."""
    z = gen_synthetic_activations(cfg, make_stream(seed))
    slices = z.reshape(-1, cfg.dims[2], cfg.dims[3])
    assert slices.shape[0] >= 100
    pairs_h = np.corrcoef(slices[:, :, :-1].ravel(), slices[:, :, 1:].ravel())[0, 1]
    pairs_v = np.corrcoef(slices[:, :-1, :].ravel(), slices[:, 1:, :].ravel())[0, 1]
    return 0.5 * (pairs_h + pairs_v)


class TestConfig:
    def test_defaults(self):
        cfg = HarnessConfig()
        assert cfg.dims == (64, 32, 28, 28)
        assert cfg.trials == 50
        assert cfg.smoothness == 2.0
        assert cfg.conditions == CONDITION_ORDER

    def test_conditions_coerced_from_strings(self):
        cfg = HarnessConfig(conditions=("rotation", "identity"))
        assert cfg.conditions == (ConditionKind.ROTATION, ConditionKind.IDENTITY)

    def test_invalid(self):
        with pytest.raises(ValidationError):
            HarnessConfig(trials=0)
        with pytest.raises(ValidationError):
            HarnessConfig(dims=(0, 1, 2, 3))
        with pytest.raises(ValidationError):
            HarnessConfig(dims=(1, 2, 3))
        with pytest.raises(ValidationError):
            HarnessConfig(smoothness=0.0)
        with pytest.raises(ValueError):
            HarnessConfig(conditions=("sideways",))


class TestSyntheticFields:
    def test_smooth_fields_are_correlated(self):
        cfg = HarnessConfig(dims=(13, 8, 16, 16), trials=1, smoothness=2.0)
        assert lag1_autocorr(cfg, seed=0) > 0.5

    def test_rough_limit_is_white(self):
        cfg = HarnessConfig(dims=(13, 8, 16, 16), trials=1, smoothness=1e-3)
        assert abs(lag1_autocorr(cfg, seed=0)) < 0.1

    def test_deterministic(self):
        a = gen_synthetic_activations(SMALL, make_stream(3))
        b = gen_synthetic_activations(SMALL, make_stream(3))
        assert np.array_equal(a, b)

    def test_slices_standardized(self):
        z = gen_synthetic_activations(SMALL, make_stream(4))
        means = z.mean(axis=(2, 3))
        stds = z.std(axis=(2, 3))
        assert np.max(np.abs(means)) <= 1e-12
        assert np.allclose(stds, 1.0, atol=1e-12)


class TestMakeAlternate:
    def setup_method(self):
        self.ref = gen_synthetic_activations(SMALL, make_stream(5, 0, 0))

    def test_identity_copies(self):
        alt = make_alternate(SMALL, self.ref, ConditionKind.IDENTITY, make_stream(5, 0, 1))
        assert np.array_equal(alt, self.ref)
        assert alt is not self.ref

    def test_geometric_warps(self):
        alt = make_alternate(SMALL, self.ref, ConditionKind.ROTATION, make_stream(5, 0, 1))
        assert alt.shape == self.ref.shape
        assert np.any(alt != self.ref)

    def test_random_is_independent_same_ensemble(self):
        alt = make_alternate(
            SMALL, self.ref, ConditionKind.RANDOM_BASELINE, make_stream(5, 0, 1)
        )
        # same smooth ensemble: standardized slices and spatial correlation
        assert np.max(np.abs(alt.mean(axis=(2, 3)))) <= 1e-12
        flat_corr = np.corrcoef(alt.ravel(), self.ref.ravel())[0, 1]
        assert abs(flat_corr) < 0.1

    def test_deterministic(self):
        a = make_alternate(SMALL, self.ref, ConditionKind.AFFINE, make_stream(5, 0, 1))
        b = make_alternate(SMALL, self.ref, ConditionKind.AFFINE, make_stream(5, 0, 1))
        assert np.array_equal(a, b)


class TestRunCondition:
    def test_identity_rows(self):
        rows = run_condition(SMALL, ConditionKind.IDENTITY)
        assert len(rows) == SMALL.trials
        for t, row in enumerate(rows):
            assert row.label == "synthetic"
            assert row.condition == "identity"
            assert row.trial == t
            assert row.seed == SMALL.master_seed
            assert row.s_equiv >= 0.999
            assert row.s_inv >= 0.99
            assert row.r == min(row.k_a, row.k_a_prime)

    def test_deterministic(self):
        a = run_condition(SMALL, ConditionKind.SCALING)
        b = run_condition(SMALL, ConditionKind.SCALING)
        assert a == b

    def test_errors_annotated_with_condition_and_trial(self, monkeypatch):
        def boom(ref, alt):
            raise DegenerateRankError("synthetic failure")

        monkeypatch.setattr(harness, "seis", boom)
        with pytest.raises(DegenerateRankError, match="condition identity, trial 0"):
            run_condition(SMALL, ConditionKind.IDENTITY)

    def test_headroom_warning(self, caplog):
        # 32 observations against a much larger retained subspace
        cfg = HarnessConfig(dims=(4, 8, 10, 10), trials=1, master_seed=1)
        with caplog.at_level("WARNING"):
            run_condition(cfg, ConditionKind.IDENTITY)
        assert any("chance-level" in rec.message for rec in caplog.records)


class TestRunSuite:
    def test_single_condition(self):
        summaries, rows = run_validation_suite(
            HarnessConfig(dims=(4, 8, 10, 10), trials=2, conditions=("identity",))
        )
        assert len(summaries) == 1
        assert summaries[0].condition is ConditionKind.IDENTITY
        assert summaries[0].trials == 2
        assert len(rows) == 2

    def test_full_bookkeeping_and_order(self):
        cfg = HarnessConfig(dims=(4, 8, 10, 10), trials=2, master_seed=21)
        summaries, rows = run_validation_suite(cfg)
        assert [s.condition for s in summaries] == list(CONDITION_ORDER)
        assert len(rows) == 2 * len(CONDITION_ORDER)
        assert [r.condition for r in rows[:2]] == ["identity", "identity"]

    def test_condition_order_in_config_is_irrelevant(self):
        base = HarnessConfig(dims=(4, 8, 10, 10), trials=2, master_seed=22,
                             conditions=("identity", "rotation"))
        flipped = HarnessConfig(dims=(4, 8, 10, 10), trials=2, master_seed=22,
                                conditions=("rotation", "identity"))
        assert run_validation_suite(base) == run_validation_suite(flipped)

    def test_suite_deterministic(self):
        cfg = HarnessConfig(dims=(4, 8, 10, 10), trials=2, master_seed=23,
                            conditions=("identity", "random_baseline"))
        assert run_validation_suite(cfg) == run_validation_suite(cfg)

    def test_summary_stats_match_rows(self):
        cfg = HarnessConfig(dims=(4, 8, 10, 10), trials=4, master_seed=24,
                            conditions=("rotation",))
        summaries, rows = run_validation_suite(cfg)
        eq = np.array([r.s_equiv for r in rows])
        s = summaries[0]
        assert s.mean_equiv == pytest.approx(eq.mean(), abs=1e-15)
        assert s.std_equiv == pytest.approx(eq.std(), abs=1e-15)
        assert isinstance(s, ConditionSummary)
