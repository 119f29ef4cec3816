"""Exact low-order fault enumeration with rational weights.

The circuits of :mod:`ftthreshold.ftec` are driven by a :class:`FaultInjector`
in place of a random stream.  Every gate event becomes a numbered location;
the injector fires chosen locations with chosen Pauli patterns and leaves the
rest silent, so each fault configuration is propagated deterministically.

A nontrivial pattern at a one-qubit location has probability ``P/4 = eps/3``,
one at a two-qubit location ``P/16 = eps/12``.  Coefficients are reported in
units of ``eps**order``.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Literal, Mapping, Sequence

from .ftec import Basis, cat_attempt, couple_cat
from .pauli_frame import ErrorFlags, NoiseModel
from .steane import CodeBlock, CssCode, build_steane, reduce_pattern

ONE_QUBIT_WEIGHT = Fraction(1, 3)
TWO_QUBIT_WEIGHT = Fraction(1, 12)

_SILENT = NoiseModel(0.0)


class FaultInjector:
    """Deterministic stand-in for :class:`~ftthreshold.pauli_frame.RandomStream`.

    ``faults`` maps location index to the flag bits drawn when that location
    fires, in draw order: ``(bit, phase)`` for one-qubit events and
    ``(a.bit, b.bit, a.phase, b.phase)`` for two-qubit events.
    """

    def __init__(self, faults: Mapping[int, Sequence[int]] | None = None, fire_all: bool = False) -> None:
        self.faults = dict(faults or {})
        self.fire_all = fire_all
        self.location = 0
        self.arities: list[int] = []
        self._pending: list[int] = []

    def event(self, p: float) -> bool:
        loc = self.location
        self.location += 1
        self.arities.append(0)
        if loc in self.faults:
            self._pending = list(self.faults[loc])
            return True
        if self.fire_all:
            self._pending = []
            return True
        return False

    def bit(self) -> bool:
        self.arities[-1] += 1
        return bool(self._pending.pop(0)) if self._pending else False

    def random(self) -> float:
        raise TypeError("FaultInjector only supports event() and bit() draws")


@dataclass(frozen=True)
class FaultLocation:
    circuit_step: int
    fault_kind: tuple[int, ...]
    weight: Fraction


def probe_locations(circuit: Callable[[FaultInjector], object]) -> list[int]:
    """Arity (1 or 2 qubits) of every noise location of a fault-free run."""
    inj = FaultInjector(fire_all=True)
    circuit(inj)
    return [n // 2 for n in inj.arities]


def location_faults(step: int, arity: int) -> list[FaultLocation]:
    weight = ONE_QUBIT_WEIGHT if arity == 1 else TWO_QUBIT_WEIGHT
    return [
        FaultLocation(step, bits, weight)
        for bits in itertools.product((0, 1), repeat=2 * arity)
        if any(bits)
    ]


def fault_configurations(
    arities: Sequence[int], order: int, steps: Sequence[int] | None = None
) -> Iterator[tuple[FaultLocation, ...]]:
    """All sets of ``order`` faults at distinct locations."""
    steps = range(len(arities)) if steps is None else steps
    for combo in itertools.combinations(steps, order):
        for faults in itertools.product(*(location_faults(s, arities[s]) for s in combo)):
            yield faults


def _weight(faults: Sequence[FaultLocation]) -> Fraction:
    w = Fraction(1)
    for f in faults:
        w *= f.weight
    return w


def _injector(faults: Sequence[FaultLocation]) -> FaultInjector:
    return FaultInjector({f.circuit_step: f.fault_kind for f in faults})


# -- cat states ---------------------------------------------------------------


def classify_cat(cat: Sequence[ErrorFlags]) -> tuple[int, int]:
    """(phase flips mod 2, bit flips up to exchanging the two cat branches)."""
    pf = sum(q.phase_flip for q in cat) & 1
    w = sum(q.bit_flip for q in cat)
    return pf, min(w, len(cat) - w)


@dataclass(frozen=True)
class CatCoefficients:
    p_1pf: Fraction
    p_1bf: Fraction
    p_1pf_1bf: Fraction
    p_2bf: Fraction | None = None

    def as_dict(self) -> dict[str, Fraction | None]:
        return {
            "p_1pf": self.p_1pf,
            "p_1bf": self.p_1bf,
            "p_1pf_1bf": self.p_1pf_1bf,
            "p_2bf": self.p_2bf,
        }


def cat_fault_table(order: int, size: int = 4) -> dict[tuple[bool, int, int], Fraction]:
    """Total weight of order-``order`` configurations by (accepted, pf, bf) outcome."""

    def circuit(rng):
        return cat_attempt(size, _SILENT, rng)

    arities = probe_locations(circuit)
    table: dict[tuple[bool, int, int], Fraction] = defaultdict(Fraction)
    for faults in fault_configurations(arities, order):
        cat, accepted = circuit(_injector(faults))
        table[(accepted, *classify_cat(cat))] += _weight(faults)
    return dict(table)


def total_fault_weight(arities: Sequence[int], order: int) -> Fraction:
    per_location = [sum(f.weight for f in location_faults(s, a)) for s, a in enumerate(arities)]
    total = Fraction(0)
    for combo in itertools.combinations(per_location, order):
        w = Fraction(1)
        for x in combo:
            w *= x
        total += w
    return total


def enumerate_cat(order: int = 2, size: int = 4) -> CatCoefficients:
    """Leading Taylor coefficients of the residual error of an accepted cat."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    first = cat_fault_table(1, size)

    def pick(table, pf, bf):
        return sum((w for (ok, p, b), w in table.items() if ok and p == pf and b == bf), Fraction(0))

    p_2bf = None
    if order == 2:
        second = cat_fault_table(2, size)
        p_2bf = sum((w for (ok, _, b), w in second.items() if ok and b == 2), Fraction(0))
    return CatCoefficients(pick(first, 1, 0), pick(first, 0, 1), pick(first, 1, 1), p_2bf)


# -- syndrome-bit measurement -------------------------------------------------


@dataclass(frozen=True)
class SyndromeMeasCoefficients:
    p_sb: Fraction
    p_codeword: Fraction
    p_sb_codeword: Fraction
    # joint-event weight split by where the single fault sat
    p_sb_codeword_from_cat: Fraction = Fraction(0)
    p_sb_codeword_from_coupling: Fraction = Fraction(0)

    def as_dict(self) -> dict[str, Fraction]:
        return {
            "p_sb": self.p_sb,
            "p_codeword": self.p_codeword,
            "p_sb_codeword": self.p_sb_codeword,
            "p_sb_codeword_from_cat": self.p_sb_codeword_from_cat,
            "p_sb_codeword_from_coupling": self.p_sb_codeword_from_coupling,
        }


def _coupling_row(row_weight: int, code: CssCode) -> tuple[int, ...]:
    if row_weight == 4:
        return code.parity_rows[0]
    if row_weight == 3:
        return code.zero_one_row
    raise ValueError("row_weight must be 3 or 4")


def syndrome_locations(row_weight: int, basis: Basis) -> dict[str, range]:
    """Location index ranges of the cat-plus-coupling circuit by role."""
    # resets, Hadamard, chain, ancilla reset, two checks, readout
    cat_end = 2 * row_weight + 4
    n = row_weight
    if basis == "s":
        roles = {"hadamard": n, "coupling": n, "readout": n}
    else:
        roles = {"coupling": n, "hadamard": n, "readout": n}
    out = {"cat": range(0, cat_end)}
    start = cat_end
    for name, count in roles.items():
        out[name] = range(start, start + count)
        start += count
    return out


def enumerate_syndrome_measurement(
    row_weight: int = 4,
    basis: Basis = "s",
    include_hadamard_and_readout: bool = False,
    code: CssCode | None = None,
) -> SyndromeMeasCoefficients:
    """First-order probabilities of a wrong syndrome bit and of a damaged codeword.

    The codeword starts clean, so the correct reading is 0; a codeword error
    is any residual that survives reduction modulo the stabilizers (including
    a logical one).  By default faults are placed in the cat preparation and
    the data-coupling XORs only; the Hadamard and readout locations of the
    cat qubits can be opened up with ``include_hadamard_and_readout``.
    """
    code = code or build_steane()
    row = _coupling_row(row_weight, code)

    def circuit(rng, block=None):
        block = block or CodeBlock()
        cat, accepted = cat_attempt(row_weight, _SILENT, rng)
        if not accepted:
            return block, None
        return block, couple_cat(block, cat, row, basis, _SILENT, rng)

    arities = probe_locations(circuit)
    roles = syndrome_locations(row_weight, basis)
    steps = [*roles["cat"], *roles["coupling"]]
    if include_hadamard_and_readout:
        steps += [*roles["hadamard"], *roles["readout"]]
    steps.sort()

    p_sb = p_cw = joint_cat = joint_coupling = Fraction(0)
    for faults in fault_configurations(arities, 1, steps):
        block, bit = circuit(_injector(faults))
        if bit is None:
            continue
        w = _weight(faults)
        damaged = False
        for component in ("bit", "phase"):
            rep, logical = reduce_pattern(block.pattern(component), code)
            damaged |= any(rep) or logical
        if bit:
            p_sb += w
        if damaged:
            p_cw += w
        if bit and damaged:
            if faults[0].circuit_step in roles["cat"]:
                joint_cat += w
            else:
                joint_coupling += w
    return SyndromeMeasCoefficients(p_sb, p_cw, joint_cat + joint_coupling, joint_cat, joint_coupling)


def format_fraction(value: Fraction) -> str:
    """``"p/q"``, or just ``"p"`` for whole numbers; both parse back with ``Fraction``."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
