import math

import numpy as np
import pytest
from scipy.stats import chisquare

from ftthreshold.ftec import FtecStrategy
from ftthreshold.montecarlo import (
    SurvivalStats,
    TrialConfig,
    TrialOutcome,
    recovery_failure_probability,
    run_trial,
    run_trials,
    run_until_precision,
    sweep_epsilon,
    sweep_nop,
)
from ftthreshold.pauli_frame import RandomStream


def test_config_validation():
    with pytest.raises(ValueError):
        TrialConfig(0.001, nop=0)
    with pytest.raises(ValueError):
        TrialConfig(0.001, nop=15, strategy=FtecStrategy("per-gate-full"))
    with pytest.raises(ValueError):
        TrialConfig(0.9)
    with pytest.raises(ValueError):
        TrialConfig(0.001, target_rse=0.0)
    cfg = TrialConfig(0.003, nop=4)
    assert cfg.batch_prob == pytest.approx(1 - (1 - 0.004) ** 4)
    assert cfg.as_dict()["strategy"]["kind"] == "full"


@pytest.mark.parametrize(
    "strategy, nop",
    [(FtecStrategy(), 15), (FtecStrategy("one-third"), 5), (FtecStrategy("per-gate-full"), 1)],
)
def test_kernel_matches_reference(strategy, nop):
    cfg = TrialConfig(0.004, nop=nop, strategy=strategy)
    for seed in range(8):
        a = run_trial(cfg, RandomStream.derive(9, seed), engine="kernel")
        b = run_trial(cfg, RandomStream.derive(9, seed), engine="reference")
        assert a == b


def test_kernel_matches_reference_uncompressed():
    cfg = TrialConfig(0.004, nop=6, compress_gates=False)
    for seed in range(5):
        a = run_trial(cfg, RandomStream.derive(2, seed), engine="kernel")
        b = run_trial(cfg, RandomStream.derive(2, seed), engine="reference")
        assert a == b


def test_unknown_engine():
    with pytest.raises(ValueError):
        run_trial(TrialConfig(0.001), RandomStream(0), engine="gpu")


def test_censoring_at_zero_noise():
    cfg = TrialConfig(0.0, nop=3, max_rounds_per_trial=5)
    out = run_trial(cfg, RandomStream(0))
    assert out == TrialOutcome(15, 5, True, 0)
    assert run_trial(cfg, RandomStream(0), engine="reference") == out
    stats = SurvivalStats().add(out)
    assert stats.censored == 1 and stats.failures == 0
    assert math.isnan(stats.effective_rate) and math.isinf(stats.rel_std_err)


def test_stats_algebra():
    outs = [TrialOutcome(n, n, False, 0) for n in (10, 20, 30)] + [TrialOutcome(5, 5, True, 1)]
    s = SurvivalStats()
    for o in outs:
        s = s.add(o)
    assert (s.failures, s.total_ops, s.total_ops_sq, s.censored, s.aborted_ftec, s.trials) == (3, 60, 1400, 1, 1, 4)
    assert s.effective_rate == pytest.approx(3 / 60)
    # sdr = sqrt(f * sum n^2 / (sum n)^2 - 1) / sqrt(f)
    assert s.rel_std_err == pytest.approx(math.sqrt(3 * 1400 / 3600 - 1) / math.sqrt(3))
    left = SurvivalStats().add(outs[0]).add(outs[1])
    right = SurvivalStats().add(outs[2]).add(outs[3])
    merged = left + right
    assert (merged.failures, merged.total_ops, merged.total_ops_sq, merged.trials) == (3, 60, 1400, 4)


def test_equal_lifetimes_have_zero_spread():
    s = SurvivalStats()
    for _ in range(4):
        s = s.add(TrialOutcome(7, 7, False, 0))
    assert s.rel_std_err == 0.0


def test_worker_count_does_not_change_results():
    cfg = TrialConfig(0.003, nop=10, target_rse=0.15)
    one = run_until_precision(cfg, workers=1, chunk_size=16)
    two = run_until_precision(cfg, workers=2, chunk_size=16)
    three = run_until_precision(cfg, workers=3, chunk_size=7)
    assert one == two == three
    assert one.reached_precision


def test_trial_streams_are_independent_of_batching():
    cfg = TrialConfig(0.004, nop=5)
    assert run_trials(cfg, 0, 6) == run_trials(cfg, 0, 3) + run_trials(cfg, 3, 6)


def test_max_trials_cap(caplog):
    cfg = TrialConfig(0.003, nop=5, max_trials=10, target_rse=0.001)
    stats = run_until_precision(cfg)
    assert stats.trials == 10 and not stats.reached_precision
    assert "max_trials" in caplog.text


def test_lifetimes_are_geometric():
    # a constant per-round failure chance makes survival memoryless
    cfg = TrialConfig(0.005, nop=5)
    rounds = np.array([o.rounds for o in run_trials(cfg, 0, 4000)])
    q = 1.0 / rounds.mean()
    edges = np.unique(np.quantile(rounds, np.linspace(0, 1, 11)[1:-1]).round())
    bins = np.concatenate([[0.5], edges + 0.5, [np.inf]])
    obs, _ = np.histogram(rounds, bins)
    cdf = lambda k: 1.0 - (1.0 - q) ** np.floor(k)  # noqa: E731
    exp = np.diff([cdf(b) if np.isfinite(b) else 1.0 for b in bins]) * len(rounds)
    assert chisquare(obs, exp, ddof=1).pvalue > 1e-4


def test_gate_compression_is_equivalent():
    base = dict(epsilon=0.004, nop=10)
    a = run_trials(TrialConfig(**base, compress_gates=True, master_seed=3), 0, 3000)
    b = run_trials(TrialConfig(**base, compress_gates=False, master_seed=4), 0, 3000)
    xa = np.array([o.ops_survived for o in a], dtype=float)
    xb = np.array([o.ops_survived for o in b], dtype=float)
    z = (xa.mean() - xb.mean()) / math.sqrt(xa.var() / len(xa) + xb.var() / len(xb))
    assert abs(z) < 4


def test_rate_rises_with_epsilon():
    rows = sweep_epsilon(10, [0.001, 0.003, 0.006], target_rse=0.1)
    rates = [r.effective_rate for r in rows]
    assert rates == sorted(rates)
    assert all(r.stats.reached_precision for r in rows)


def test_sweeps_validate():
    with pytest.raises(ValueError):
        sweep_nop(0.002, [])
    with pytest.raises(ValueError):
        sweep_epsilon(15, [0.0, 0.001])


def test_sweep_is_reproducible():
    a = sweep_nop(0.003, [2, 8], target_rse=0.2, master_seed=5)
    b = sweep_nop(0.003, [2, 8], target_rse=0.2, master_seed=5)
    assert a == b


def test_single_recovery_probabilities():
    clean, _ = recovery_failure_probability(2e-3, 200_000)
    dirty, _ = recovery_failure_probability(2e-3, 200_000, with_error=True)
    # a carried error makes failure first order instead of second
    assert dirty > 3 * clean
    assert recovery_failure_probability(0.0, 1000) == (0.0, 0)
