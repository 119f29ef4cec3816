"""Pauli-frame bookkeeping: two classical bits per qubit.

Every qubit carries a bit-flip flag and a phase-flip flag.  Gates act on the
flags by propagation rules, and each gate location is followed (or preceded)
by a depolarizing event.

Flag encoding used throughout the package::

    (bit_flip, phase_flip)   (0,0)=I  (1,0)=X  (0,1)=Z  (1,1)=Y

Random draws follow a fixed order so that the jitted trial kernel in
:mod:`ftthreshold._kernel` consumes exactly the same stream:

* gate event:  one ``random()`` compared against the event probability;
* fired event: one ``random() < 0.5`` per flag, bit flag before phase flag
  (for two-qubit events: a.bit, b.bit, a.phase, b.phase).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ErrorFlags",
    "NoiseModel",
    "RandomStream",
    "I",
    "X",
    "Y",
    "Z",
    "depolarize_one",
    "depolarize_two",
    "apply_hadamard",
    "apply_xor",
    "batch_depolarize",
    "propagate_hadamard",
    "propagate_xor",
]

MAX_EPSILON = 0.75


@dataclass(frozen=True, slots=True)
class ErrorFlags:
    bit_flip: bool = False
    phase_flip: bool = False

    def __xor__(self, other: ErrorFlags) -> ErrorFlags:
        return ErrorFlags(self.bit_flip ^ other.bit_flip, self.phase_flip ^ other.phase_flip)

    def __bool__(self) -> bool:
        return self.bit_flip or self.phase_flip

    @property
    def label(self) -> str:
        return "IXZY"[self.bit_flip + 2 * self.phase_flip]

    @classmethod
    def from_label(cls, label: str) -> ErrorFlags:
        idx = "IXZY".index(label.upper())
        return cls(bool(idx & 1), bool(idx & 2))

    def __repr__(self) -> str:
        return f"ErrorFlags({self.label})"


I = ErrorFlags(False, False)
X = ErrorFlags(True, False)
Z = ErrorFlags(False, True)
Y = ErrorFlags(True, True)
PAULIS = (I, X, Z, Y)


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing gate noise with fundamental error rate ``epsilon``.

    A gate event happens with probability ``P = 4/3 * epsilon`` and then
    replaces the affected flags by uniformly random ones, so each of the
    three nontrivial single-qubit Paulis occurs with probability
    ``epsilon / 3``.
    """

    epsilon: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.epsilon < MAX_EPSILON:
            raise ValueError(f"epsilon must lie in [0, 3/4), got {self.epsilon!r}")

    @property
    def gate_event_prob(self) -> float:
        return 4.0 / 3.0 * self.epsilon


class RandomStream:
    """Seeded uniform source backed by a PCG64 generator.

    ``RandomStream.derive(master_seed, index)`` builds the stream from
    ``SeedSequence([master_seed, index])``; streams for different indices are
    statistically independent, and identical arguments give identical
    sequences on every platform.
    """

    __slots__ = ("generator",)

    def __init__(self, seed: int | np.random.Generator = 0) -> None:
        if isinstance(seed, np.random.Generator):
            self.generator = seed
        else:
            self.generator = np.random.Generator(np.random.PCG64(np.random.SeedSequence(_u64(seed))))

    @classmethod
    def derive(cls, master_seed: int, index: int) -> RandomStream:
        return cls(derive_generator(master_seed, index))

    def random(self) -> float:
        return self.generator.random()

    def event(self, p: float) -> bool:
        return self.generator.random() < p

    def bit(self) -> bool:
        return self.generator.random() < 0.5


def _u64(value: int) -> int:
    if not 0 <= value < 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {value!r}")
    return int(value)


def derive_generator(master_seed: int, index: int) -> np.random.Generator:
    """Generator for trial ``index`` under ``master_seed``."""
    seq = np.random.SeedSequence([_u64(master_seed), _u64(index)])
    return np.random.Generator(np.random.PCG64(seq))


def _randomize(flags: ErrorFlags, rng) -> ErrorFlags:
    bit = rng.bit()
    phase = rng.bit()
    return ErrorFlags(flags.bit_flip ^ bit, flags.phase_flip ^ phase)


def depolarize_one(flags: ErrorFlags, noise: NoiseModel, rng) -> ErrorFlags:
    if rng.event(noise.gate_event_prob):
        return _randomize(flags, rng)
    return flags


def depolarize_two(
    flags_a: ErrorFlags, flags_b: ErrorFlags, noise: NoiseModel, rng
) -> tuple[ErrorFlags, ErrorFlags]:
    if rng.event(noise.gate_event_prob):
        a_bit, b_bit = rng.bit(), rng.bit()
        a_phase, b_phase = rng.bit(), rng.bit()
        flags_a = ErrorFlags(flags_a.bit_flip ^ a_bit, flags_a.phase_flip ^ a_phase)
        flags_b = ErrorFlags(flags_b.bit_flip ^ b_bit, flags_b.phase_flip ^ b_phase)
    return flags_a, flags_b


def batch_depolarize(flags: ErrorFlags, p: float, rng) -> ErrorFlags:
    """Fully randomize ``flags`` with probability ``p``.

    ``n`` consecutive :func:`depolarize_one` events at gate probability ``P``
    compose to one call with ``p = 1 - (1 - P)**n``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    if rng.event(p):
        return _randomize(flags, rng)
    return flags


def propagate_hadamard(flags: ErrorFlags) -> ErrorFlags:
    return ErrorFlags(flags.phase_flip, flags.bit_flip)


def propagate_xor(source: ErrorFlags, target: ErrorFlags) -> tuple[ErrorFlags, ErrorFlags]:
    # bit flips travel source -> target, phase flips target -> source
    return (
        ErrorFlags(source.bit_flip, source.phase_flip ^ target.phase_flip),
        ErrorFlags(target.bit_flip ^ source.bit_flip, target.phase_flip),
    )


def apply_hadamard(flags: ErrorFlags, noise: NoiseModel, rng) -> ErrorFlags:
    return propagate_hadamard(depolarize_one(flags, noise, rng))


def apply_xor(
    source: ErrorFlags, target: ErrorFlags, noise: NoiseModel, rng
) -> tuple[ErrorFlags, ErrorFlags]:
    source, target = propagate_xor(source, target)
    return depolarize_two(source, target, noise, rng)


def one_qubit_channel(flags: ErrorFlags, p: float) -> dict[ErrorFlags, float]:
    """Exact output distribution of a full randomization with probability ``p``."""
    out = {f: p / 4 for f in PAULIS}
    out[flags] += 1.0 - p
    return out


def two_qubit_channel(
    flags_a: ErrorFlags, flags_b: ErrorFlags, p: float
) -> dict[tuple[ErrorFlags, ErrorFlags], float]:
    out = {(fa, fb): p / 16 for fa in PAULIS for fb in PAULIS}
    out[(flags_a, flags_b)] += 1.0 - p
    return out
