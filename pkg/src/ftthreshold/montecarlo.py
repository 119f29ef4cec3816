"""Survival Monte Carlo for one encoded qubit.

A trial alternates ``nop`` bitwise one-qubit gates (folded into a single
randomization per data qubit) with a recovery step, until the block picks up
a logical error.  Trial ``i`` draws from ``derive_generator(master_seed, i)``
and the stopping rule is applied in trial-index order, so the result does not
depend on how many worker processes ran the trials.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernel
from .ftec import CatPreparationError, FtecStrategy, full_recovery
from .pauli_frame import NoiseModel, RandomStream, batch_depolarize, depolarize_one, derive_generator
from .steane import CodeBlock, CssCode, build_steane, canonicalize

logger = logging.getLogger(__name__)

DEFAULT_TARGET_RSE = 0.02
DEFAULT_RSE_REFERENCE_RATE = 0.002


@dataclass(frozen=True)
class TrialConfig:
    epsilon: float
    nop: int = 15
    strategy: FtecStrategy = field(default_factory=FtecStrategy)
    master_seed: int = 1
    target_rse: float = DEFAULT_TARGET_RSE
    rse_reference_rate: float = DEFAULT_RSE_REFERENCE_RATE
    max_trials: int = 1_000_000
    max_rounds_per_trial: int = 1_000_000
    min_failures: int = 20
    max_cat_attempts: int = 1000
    compress_gates: bool = True

    def __post_init__(self) -> None:
        NoiseModel(self.epsilon)
        if self.nop < 1:
            raise ValueError("nop must be at least 1")
        if self.strategy.per_gate and self.nop != 1:
            raise ValueError("per-gate strategies run one gate between recoveries (nop=1)")
        if not 0.0 < self.target_rse < 1.0:
            raise ValueError("target_rse must lie in (0, 1)")
        if self.rse_reference_rate <= 0:
            raise ValueError("rse_reference_rate must be positive")
        if self.max_trials < 1 or self.max_rounds_per_trial < 1 or self.min_failures < 1:
            raise ValueError("trial caps must be positive")

    @property
    def noise(self) -> NoiseModel:
        return NoiseModel(self.epsilon)

    @property
    def batch_prob(self) -> float:
        return 1.0 - (1.0 - self.noise.gate_event_prob) ** self.nop

    def as_dict(self) -> dict:
        d = asdict(self)
        d["strategy"] = {
            "kind": self.strategy.kind.value,
            "special_case_guard": self.strategy.special_case_guard,
            "max_rounds": self.strategy.max_rounds,
        }
        return d


class TrialOutcome(NamedTuple):
    ops_survived: int
    rounds: int
    censored: bool
    aborted_ftec: int


@dataclass(frozen=True)
class SurvivalStats:
    """Accumulated survival counts; ``+`` merges two accumulators."""

    failures: int = 0
    total_ops: int = 0
    total_ops_sq: int = 0
    censored: int = 0
    aborted_ftec: int = 0
    trials: int = 0
    reached_precision: bool = False

    def add(self, outcome: TrialOutcome) -> SurvivalStats:
        if outcome.censored:
            return replace(
                self,
                censored=self.censored + 1,
                trials=self.trials + 1,
                aborted_ftec=self.aborted_ftec + outcome.aborted_ftec,
            )
        n = outcome.ops_survived
        return replace(
            self,
            failures=self.failures + 1,
            total_ops=self.total_ops + n,
            total_ops_sq=self.total_ops_sq + n * n,
            trials=self.trials + 1,
            aborted_ftec=self.aborted_ftec + outcome.aborted_ftec,
        )

    def __add__(self, other: SurvivalStats) -> SurvivalStats:
        return SurvivalStats(
            self.failures + other.failures,
            self.total_ops + other.total_ops,
            self.total_ops_sq + other.total_ops_sq,
            self.censored + other.censored,
            self.aborted_ftec + other.aborted_ftec,
            self.trials + other.trials,
            self.reached_precision and other.reached_precision,
        )

    @property
    def effective_rate(self) -> float:
        """Logical failures per one-qubit gate."""
        if self.total_ops == 0:
            return math.nan
        return self.failures / self.total_ops

    @property
    def rel_std_err(self) -> float:
        """Relative standard error of ``effective_rate``."""
        if self.failures == 0:
            return math.inf
        ratio = self.failures * self.total_ops_sq / self.total_ops**2 - 1.0
        return math.sqrt(max(ratio, 0.0)) / math.sqrt(self.failures)

    def precision_metric(self, reference_rate: float) -> float:
        return self.rel_std_err * math.sqrt(self.effective_rate / reference_rate)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["effective_rate"] = self.effective_rate
        d["rel_std_err"] = self.rel_std_err
        return d


def _kernel_args(config: TrialConfig, code: CssCode) -> tuple:
    rows, supports, decode = _kernel.code_arrays(code)
    s = config.strategy
    return (
        config.noise.gate_event_prob,
        config.batch_prob,
        config.nop,
        s.one_third,
        s.special_case_guard,
        s.max_rounds,
        config.max_rounds_per_trial,
        rows,
        supports,
        decode,
        config.max_cat_attempts,
        not config.compress_gates,
    )


def run_trial(
    config: TrialConfig,
    rng: RandomStream,
    code: CssCode | None = None,
    engine: str = "kernel",
) -> TrialOutcome:
    """Run one trial from a clean block until it fails or hits the round cap.

    ``engine="reference"`` runs the object-level circuits of
    :mod:`ftthreshold.ftec`; ``"kernel"`` runs the jitted copy.  Both consume
    ``rng`` identically.
    """
    code = code or build_steane()
    if engine == "kernel":
        ops, rounds, status, aborted = _kernel.run_trial_kernel(rng.generator, *_kernel_args(config, code))
        if status < 0:
            raise CatPreparationError(f"cat verification gave up at epsilon={config.epsilon}")
        return TrialOutcome(int(ops), int(rounds), status == 1, int(aborted))
    if engine != "reference":
        raise ValueError(f"unknown engine {engine!r}")

    noise = config.noise
    p = config.batch_prob
    block = CodeBlock()
    aborted = 0
    for r in range(1, config.max_rounds_per_trial + 1):
        if config.compress_gates:
            block.qubits = [batch_depolarize(q, p, rng) for q in block.qubits]
        else:
            for j in range(7):
                for _ in range(config.nop):
                    block.qubits[j] = depolarize_one(block.qubits[j], noise, rng)
        rec = full_recovery(block, config.strategy, r, code, noise, rng)
        aborted += rec.aborted
        canonicalize(block, code)
        if block.failed:
            return TrialOutcome(config.nop * r, r, False, aborted)
    n = config.max_rounds_per_trial
    return TrialOutcome(config.nop * n, n, True, aborted)


def run_trials(config: TrialConfig, start: int, stop: int, code: CssCode | None = None) -> list[TrialOutcome]:
    """Trials ``start..stop-1`` of ``config``, each on its own derived stream."""
    code = code or build_steane()
    args = _kernel_args(config, code)
    out = []
    for i in range(start, stop):
        g = derive_generator(config.master_seed, i)
        ops, rounds, status, aborted = _kernel.run_trial_kernel(g, *args)
        if status < 0:
            raise CatPreparationError(f"cat verification gave up at epsilon={config.epsilon}")
        out.append(TrialOutcome(int(ops), int(rounds), status == 1, int(aborted)))
    return out


def _run_chunk(payload: tuple[TrialConfig, CssCode, int, int]) -> list[TrialOutcome]:
    config, code, start, stop = payload
    return run_trials(config, start, stop, code)


def default_workers() -> int:
    return os.cpu_count() or 1


def run_until_precision(
    config: TrialConfig,
    code: CssCode | None = None,
    workers: int = 1,
    chunk_size: int = 256,
    executor: ProcessPoolExecutor | None = None,
) -> SurvivalStats:
    """Accumulate trials until the stopping rule or ``max_trials`` is met.

    Stops after the first trial at which at least ``min_failures`` failures
    have been seen and ``rel_std_err * sqrt(effective_rate / rse_reference_rate)``
    drops below ``target_rse``.
    """
    code = code or build_steane()
    stats = SurvivalStats()
    next_index = 0
    own_pool = None
    if executor is None and workers > 1:
        own_pool = executor = ProcessPoolExecutor(max_workers=workers)
    try:
        while next_index < config.max_trials:
            n_chunks = workers if executor is not None else 1
            bounds = []
            for _ in range(n_chunks):
                stop = min(next_index + chunk_size, config.max_trials)
                if next_index >= stop:
                    break
                bounds.append((next_index, stop))
                next_index = stop
            if executor is not None:
                results = executor.map(_run_chunk, [(config, code, a, b) for a, b in bounds])
            else:
                results = (run_trials(config, a, b, code) for a, b in bounds)
            for chunk in results:
                for outcome in chunk:
                    stats = stats.add(outcome)
                    if (
                        not outcome.censored
                        and stats.failures >= config.min_failures
                        and stats.precision_metric(config.rse_reference_rate) < config.target_rse
                    ):
                        return replace(stats, reached_precision=True)
            chunk_size = min(chunk_size * 2, 8192)
    finally:
        if own_pool is not None:
            own_pool.shutdown()
    logger.warning("max_trials=%d reached before precision at epsilon=%g", config.max_trials, config.epsilon)
    return stats


@dataclass(frozen=True)
class SweepRow:
    x: float
    stats: SurvivalStats

    @property
    def effective_rate(self) -> float:
        return self.stats.effective_rate

    @property
    def rel_std_err(self) -> float:
        return self.stats.rel_std_err


def _sweep(configs: Sequence[TrialConfig], xs: Sequence[float], code, workers) -> list[SweepRow]:
    rows = []
    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for x, cfg in zip(xs, configs):
            stats = run_until_precision(cfg, code, workers=workers, executor=executor)
            logger.info("x=%g rate=%.4g rse=%.3g trials=%d", x, stats.effective_rate, stats.rel_std_err, stats.trials)
            rows.append(SweepRow(x, stats))
    finally:
        if executor is not None:
            executor.shutdown()
    return rows


def sweep_nop(
    epsilon: float,
    nop_values: Sequence[int],
    strategy: FtecStrategy | None = None,
    master_seed: int = 1,
    code: CssCode | None = None,
    workers: int = 1,
    **config_kwargs,
) -> list[SweepRow]:
    if not nop_values:
        raise ValueError("nop_values must be nonempty")
    strategy = strategy or FtecStrategy()
    configs = [TrialConfig(epsilon, n, strategy, master_seed, **config_kwargs) for n in nop_values]
    return _sweep(configs, list(nop_values), code, workers)


def sweep_epsilon(
    nop: int,
    epsilon_values: Sequence[float],
    strategy: FtecStrategy | None = None,
    master_seed: int = 1,
    code: CssCode | None = None,
    workers: int = 1,
    **config_kwargs,
) -> list[SweepRow]:
    if not epsilon_values:
        raise ValueError("epsilon_values must be nonempty")
    if any(e <= 0 for e in epsilon_values):
        raise ValueError("epsilon must be positive in a sweep (break-even is undefined at 0)")
    strategy = strategy or FtecStrategy()
    configs = [TrialConfig(e, nop, strategy, master_seed, **config_kwargs) for e in epsilon_values]
    return _sweep(configs, list(epsilon_values), code, workers)


def as_array(rows: Sequence[SweepRow]) -> np.ndarray:
    """(x, effective_rate, rel_std_err) columns."""
    return np.array([(r.x, r.effective_rate, r.rel_std_err) for r in rows], dtype=float)


def recovery_failure_probability(
    epsilon: float,
    n: int,
    strategy: FtecStrategy | None = None,
    with_error: bool = False,
    master_seed: int = 1,
    code: CssCode | None = None,
    max_cat_attempts: int = 1000,
) -> tuple[float, int]:
    """Estimated chance that one recovery step leaves a logical error.

    The block starts clean, or with one random single-qubit Pauli error when
    ``with_error`` is set.  Returns (probability, failures).
    """
    code = code or build_steane()
    strategy = strategy or FtecStrategy()
    rows, supports, decode = _kernel.code_arrays(code)
    g = derive_generator(master_seed, 0)
    failures, aborted = _kernel.run_recoveries_kernel(
        g,
        n,
        with_error,
        NoiseModel(epsilon).gate_event_prob,
        strategy.one_third,
        strategy.special_case_guard,
        strategy.max_rounds,
        rows,
        supports,
        decode,
        max_cat_attempts,
    )
    if aborted < 0:
        raise CatPreparationError(f"cat verification gave up at epsilon={epsilon}")
    return failures / n, int(failures)


class CatSample(NamedTuple):
    counts: dict[tuple[int, int], int]
    samples: int
    attempts: int

    def frequency(self, pf: int, bf: int) -> float:
        return self.counts.get((pf, bf), 0) / self.samples


def sample_cats(epsilon: float, samples: int, size: int = 4, master_seed: int = 1, max_cat_attempts: int = 1000) -> CatSample:
    """Residual-error classes of ``samples`` verified cats, keyed (phase flips mod 2, bit flips)."""
    g = derive_generator(master_seed, 0)
    counts, attempts = _kernel.sample_cats_kernel(g, samples, size, NoiseModel(epsilon).gate_event_prob, max_cat_attempts)
    if attempts < 0:
        raise CatPreparationError(f"cat verification gave up at epsilon={epsilon}")
    table = {(pf, bf): int(counts[pf, bf]) for pf in range(2) for bf in range(3) if counts[pf, bf]}
    return CatSample(table, samples, int(attempts))
