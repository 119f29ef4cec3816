"""Classical data of the 7-qubit CSS code and coset canonicalization."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Literal, Sequence

from .pauli_frame import ErrorFlags

Component = Literal["bit", "phase"]
Bits = tuple[int, ...]

N_QUBITS = 7

# Rows of the dual code used by the reference program; position j is the
# j-th character.
DEFAULT_PARITY_ROWS = ("1110100", "1001110", "1101001")
DEFAULT_ZERO_ONE_ROW = "1100010"


def _bits(row: str | Sequence[int]) -> Bits:
    if isinstance(row, str):
        return tuple(int(c) for c in row)
    return tuple(int(b) & 1 for b in row)


def _xor(a: Bits, b: Bits) -> Bits:
    return tuple(x ^ y for x, y in zip(a, b))


def dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x & y for x, y in zip(a, b)) & 1


def span(rows: Sequence[Bits]) -> list[Bits]:
    """All GF(2) combinations of ``rows`` (including the zero vector)."""
    out = []
    for coeffs in itertools.product((0, 1), repeat=len(rows)):
        v = (0,) * len(rows[0])
        for c, r in zip(coeffs, rows):
            if c:
                v = _xor(v, r)
        out.append(v)
    return out


def pack_syndrome(bits: Sequence[int]) -> int:
    return (bits[0] << 2) | (bits[1] << 1) | bits[2]


@dataclass(frozen=True)
class CssCode:
    parity_rows: tuple[Bits, Bits, Bits]
    zero_one_row: Bits
    all_ones: Bits = (1,) * N_QUBITS
    decode_table: tuple[int | None, ...] = field(default=(), repr=False)

    @property
    def parity_sum_row(self) -> Bits:
        """v1 + v2 + v3, the fourth row of the repetition cycle."""
        r = self.parity_rows
        return _xor(_xor(r[0], r[1]), r[2])

    @property
    def cycle_rows(self) -> tuple[Bits, Bits, Bits, Bits]:
        return (*self.parity_rows, self.parity_sum_row)

    def syndrome(self, pattern: Sequence[int]) -> tuple[int, int, int]:
        return tuple(dot(row, pattern) for row in self.parity_rows)  # type: ignore[return-value]

    def decode(self, syndrome: Sequence[int]) -> int | None:
        return self.decode_table[pack_syndrome(syndrome)]

    def stabilizers(self) -> list[Bits]:
        return span(self.parity_rows)


def build_steane(
    parity_rows: Sequence[str | Sequence[int]] = DEFAULT_PARITY_ROWS,
    zero_one_row: str | Sequence[int] = DEFAULT_ZERO_ONE_ROW,
) -> CssCode:
    """Build the code from any basis of the dual code whose nonzero span has weight 4."""
    rows = tuple(_bits(r) for r in parity_rows)
    zo = _bits(zero_one_row)
    if len(rows) != 3 or any(len(r) != N_QUBITS for r in rows) or len(zo) != N_QUBITS:
        raise ValueError("need three parity rows and a zero/one row, all of length 7")
    nonzero = [v for v in span(rows) if any(v)]
    if len(nonzero) != 7:
        raise ValueError("parity rows are linearly dependent")
    if any(sum(v) != 4 for v in nonzero):
        raise ValueError("every nonzero combination of the parity rows must have weight 4")
    if any(dot(zo, r) for r in rows):
        raise ValueError("zero/one row must have even overlap with every parity row")
    if zo in span(rows):
        raise ValueError("zero/one row must lie outside the span of the parity rows")

    table: list[int | None] = [None] * 8
    for j in range(N_QUBITS):
        s = pack_syndrome([r[j] for r in rows])
        if s == 0 or table[s] is not None:
            raise ValueError("parity rows do not separate single flips")
        table[s] = j
    return CssCode(parity_rows=rows, zero_one_row=zo, decode_table=tuple(table))  # type: ignore[arg-type]


@dataclass
class CodeBlock:
    qubits: list[ErrorFlags] = field(default_factory=lambda: [ErrorFlags()] * N_QUBITS)
    logical_x_failed: bool = False
    logical_z_failed: bool = False

    @property
    def failed(self) -> bool:
        return self.logical_x_failed or self.logical_z_failed

    def pattern(self, component: Component) -> Bits:
        if component == "bit":
            return tuple(int(q.bit_flip) for q in self.qubits)
        return tuple(int(q.phase_flip) for q in self.qubits)

    def set_pattern(self, component: Component, pattern: Sequence[int]) -> None:
        if component == "bit":
            self.qubits = [ErrorFlags(bool(b), q.phase_flip) for q, b in zip(self.qubits, pattern)]
        else:
            self.qubits = [ErrorFlags(q.bit_flip, bool(b)) for q, b in zip(self.qubits, pattern)]

    @classmethod
    def from_patterns(cls, bit: Sequence[int] | str = (0,) * 7, phase: Sequence[int] | str = (0,) * 7) -> CodeBlock:
        b, p = _bits(bit), _bits(phase)
        return cls([ErrorFlags(bool(x), bool(z)) for x, z in zip(b, p)])

    def copy(self) -> CodeBlock:
        return CodeBlock(list(self.qubits), self.logical_x_failed, self.logical_z_failed)

    def is_clean(self) -> bool:
        return not any(self.qubits) and not self.failed


def syndrome_of(block: CodeBlock, component: Component, code: CssCode) -> tuple[int, int, int]:
    return code.syndrome(block.pattern(component))


def reduce_pattern(pattern: Sequence[int], code: CssCode) -> tuple[Bits, bool]:
    """Coset representative of ``pattern`` and whether the residual is logical.

    The representative is the single flip indicated by the syndrome (or the
    empty pattern); the residual ``pattern ^ representative`` is
    syndrome-free, so it is a logical operator exactly when its weight is odd.
    """
    z = code.decode(code.syndrome(pattern))
    rep = tuple(int(j == z) for j in range(N_QUBITS))
    logical = bool((sum(pattern) + (z is not None)) & 1)
    return rep, logical


def canonicalize(block: CodeBlock, code: CssCode) -> CodeBlock:
    for component in ("bit", "phase"):
        rep, logical = reduce_pattern(block.pattern(component), code)
        block.set_pattern(component, rep)
        if logical:
            if component == "bit":
                block.logical_x_failed = not block.logical_x_failed
            else:
                block.logical_z_failed = not block.logical_z_failed
    return block


def zero_one_parity(block: CodeBlock, code: CssCode) -> int:
    return dot(block.pattern("bit"), code.zero_one_row)
