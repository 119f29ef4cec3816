"""Fault-tolerant error correction circuits at the Pauli-frame level.

Syndrome bits are read with verified cat states.  A recovery step for one
error component measures rows in the cycle ``v_a, v_{a+1}, v_{a+2}, v4``
(``v4 = v1 + v2 + v3``, indices of the first three taken mod 3 from the
round counter) until the last four readings have even parity.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Literal, NamedTuple, Sequence

from .pauli_frame import (
    ErrorFlags,
    NoiseModel,
    apply_hadamard,
    apply_xor,
    depolarize_one,
)
from .steane import CodeBlock, Component, CssCode

Basis = Literal["s", "c"]

DEFAULT_MAX_CAT_ATTEMPTS = 1000
DEFAULT_MAX_MEASUREMENTS = 200
GUARD_PATTERN = (0, 0, 1, 1)


class CatPreparationError(RuntimeError):
    """Cat verification kept failing; the error rate is unreasonably large."""


class StrategyKind(enum.Enum):
    FULL = "full"
    ONE_THIRD = "one-third"
    PER_GATE_FULL = "per-gate-full"
    PER_GATE_ONE_THIRD = "per-gate-one-third"


@dataclass(frozen=True)
class FtecStrategy:
    kind: StrategyKind = StrategyKind.FULL
    special_case_guard: bool = True
    max_rounds: int = DEFAULT_MAX_MEASUREMENTS

    def __post_init__(self) -> None:
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", StrategyKind(self.kind))
        if self.max_rounds < 4:
            raise ValueError("max_rounds must be at least 4")

    @property
    def one_third(self) -> bool:
        return self.kind in (StrategyKind.ONE_THIRD, StrategyKind.PER_GATE_ONE_THIRD)

    @property
    def per_gate(self) -> bool:
        return self.kind in (StrategyKind.PER_GATE_FULL, StrategyKind.PER_GATE_ONE_THIRD)

    @classmethod
    def parse(cls, name: str, **kwargs) -> FtecStrategy:
        return cls(StrategyKind(name), **kwargs)


@dataclass
class CatState:
    qubits: list[ErrorFlags]
    attempts: int = 1


@dataclass
class SyndromeHistory:
    """Measured (row index, bit) pairs of one recovery step.

    Row indices 0..2 are the parity rows, 3 is their sum.
    """

    measurements: list[tuple[int, int]] = field(default_factory=list)

    def append(self, row_index: int, bit: int) -> None:
        self.measurements.append((row_index, bit))

    def __len__(self) -> int:
        return len(self.measurements)

    @property
    def bits(self) -> list[int]:
        return [b for _, b in self.measurements]

    @property
    def last_four(self) -> tuple[int, ...]:
        return tuple(self.bits[-4:])

    @property
    def last_four_parity(self) -> int:
        p = 0
        for b in self.bits[-4:]:
            p ^= b
        return p

    def latest(self, row_index: int) -> int | None:
        for r, b in reversed(self.measurements):
            if r == row_index:
                return b
        return None

    def syndrome(self) -> tuple[int, int, int]:
        return tuple(self.latest(i) or 0 for i in range(3))  # type: ignore[return-value]


def row_cycle(round_index: int) -> tuple[int, int, int, int]:
    a = round_index % 3
    return (a, (a + 1) % 3, (a + 2) % 3, 3)


def cat_attempt(size: int, noise: NoiseModel, rng) -> tuple[list[ErrorFlags], bool]:
    """One preparation and verification of a ``size``-qubit cat.

    Twelve noise locations for ``size == 4``: resets, the Hadamard on qubit 0,
    the XOR chain, the ancilla reset, two verification XORs and the ancilla
    readout.
    """
    cat = [depolarize_one(ErrorFlags(), noise, rng) for _ in range(size)]
    cat[0] = depolarize_one(cat[0], noise, rng)
    for k in range(1, size):
        cat[k - 1], cat[k] = apply_xor(cat[k - 1], cat[k], noise, rng)
    anc = depolarize_one(ErrorFlags(), noise, rng)
    cat[0], anc = apply_xor(cat[0], anc, noise, rng)
    cat[-1], anc = apply_xor(cat[-1], anc, noise, rng)
    anc = depolarize_one(anc, noise, rng)
    return cat, not anc.bit_flip


def prepare_cat(
    size: int, noise: NoiseModel, rng, max_attempts: int = DEFAULT_MAX_CAT_ATTEMPTS
) -> CatState:
    if size not in (3, 4):
        raise ValueError(f"cat size must be 3 or 4, got {size}")
    for attempt in range(1, max_attempts + 1):
        cat, ok = cat_attempt(size, noise, rng)
        if ok:
            return CatState(cat, attempt)
    raise CatPreparationError(f"cat verification failed {max_attempts} times at epsilon={noise.epsilon}")


def couple_cat(
    block: CodeBlock, cat: list[ErrorFlags], row: Sequence[int], basis: Basis, noise: NoiseModel, rng
) -> int:
    """Entangle a verified cat with the data qubits in ``row`` and read the parity."""
    support = [j for j, v in enumerate(row) if v]
    if len(support) != len(cat):
        raise ValueError(f"row weight {len(support)} does not match cat size {len(cat)}")
    qubits = block.qubits
    if basis == "s":
        cat = [apply_hadamard(q, noise, rng) for q in cat]
        for k, j in enumerate(support):
            qubits[j], cat[k] = apply_xor(qubits[j], cat[k], noise, rng)
    elif basis == "c":
        # H-conjugated XOR is an XOR with source and target exchanged
        for k, j in enumerate(support):
            cat[k], qubits[j] = apply_xor(cat[k], qubits[j], noise, rng)
        cat = [apply_hadamard(q, noise, rng) for q in cat]
    else:
        raise ValueError(f"basis must be 's' or 'c', got {basis!r}")
    parity = 0
    for q in cat:
        parity ^= depolarize_one(q, noise, rng).bit_flip
    return int(parity)


def measure_syndrome_bit(
    block: CodeBlock,
    row: Sequence[int],
    basis: Basis,
    noise: NoiseModel,
    rng,
    max_cat_attempts: int = DEFAULT_MAX_CAT_ATTEMPTS,
) -> int:
    cat = prepare_cat(sum(row), noise, rng, max_cat_attempts)
    return couple_cat(block, cat.qubits, row, basis, noise, rng)


def measure_zero_one(block: CodeBlock, code: CssCode, noise: NoiseModel, rng) -> int:
    return measure_syndrome_bit(block, code.zero_one_row, "s", noise, rng)


class RoundRecord(NamedTuple):
    block: CodeBlock
    history: SyndromeHistory
    correction: int | None
    aborted: bool


def ftec_round(
    block: CodeBlock,
    component: Component,
    strategy: FtecStrategy,
    round_index: int,
    code: CssCode,
    noise: NoiseModel,
    rng,
) -> RoundRecord:
    """One recovery step for bit flips (s-basis) or phase flips (c-basis).

    ``block`` is updated in place and also returned inside the record.
    """
    basis: Basis = "s" if component == "bit" else "c"
    rows = code.cycle_rows
    cycle = row_cycle(round_index)
    history = SyndromeHistory()
    while True:
        if len(history) >= strategy.max_rounds:
            return RoundRecord(block, history, None, True)
        r = cycle[len(history) % 4]
        history.append(r, measure_syndrome_bit(block, rows[r], basis, noise, rng))
        if strategy.one_third and len(history) == 1 and history.bits[0] == 0:
            return RoundRecord(block, history, None, False)
        if len(history) >= 4 and history.last_four_parity == 0:
            if strategy.special_case_guard and history.last_four == GUARD_PATTERN:
                continue
            break

    z = code.decode(history.syndrome())
    if z is not None:
        q = block.qubits[z]
        if component == "bit":
            q = ErrorFlags(not q.bit_flip, q.phase_flip)
        else:
            q = ErrorFlags(q.bit_flip, not q.phase_flip)
        block.qubits[z] = depolarize_one(q, noise, rng)
    return RoundRecord(block, history, z, False)


class RecoveryRecord(NamedTuple):
    block: CodeBlock
    bit_round: RoundRecord
    phase_round: RoundRecord

    @property
    def aborted(self) -> int:
        return int(self.bit_round.aborted) + int(self.phase_round.aborted)


def full_recovery(
    block: CodeBlock, strategy: FtecStrategy, round_index: int, code: CssCode, noise: NoiseModel, rng
) -> RecoveryRecord:
    bit_round = ftec_round(block, "bit", strategy, round_index, code, noise, rng)
    phase_round = ftec_round(block, "phase", strategy, round_index, code, noise, rng)
    return RecoveryRecord(block, bit_round, phase_round)
