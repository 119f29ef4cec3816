import itertools

import pytest

from ftthreshold.pauli_frame import ErrorFlags
from ftthreshold.steane import (
    CodeBlock,
    build_steane,
    canonicalize,
    dot,
    reduce_pattern,
    span,
    syndrome_of,
    zero_one_parity,
)

CODE = build_steane()
STABILIZERS = set(CODE.stabilizers())
ALL_PATTERNS = list(itertools.product((0, 1), repeat=7))


def test_rows_and_table():
    assert CODE.parity_sum_row == (1, 0, 1, 0, 0, 1, 1)
    assert len(STABILIZERS) == 8
    assert all(sum(v) in (0, 4) for v in STABILIZERS)
    for j in range(7):
        e = tuple(int(i == j) for i in range(7))
        assert CODE.decode(CODE.syndrome(e)) == j
    assert CODE.decode((0, 0, 0)) is None


def test_zero_one_row():
    zo = CODE.zero_one_row
    assert all(dot(zo, r) == 0 for r in CODE.parity_rows)
    # flips under a logical bit flip
    assert dot(zo, CODE.all_ones) == 1
    block = CodeBlock.from_patterns(bit="1111111")
    assert zero_one_parity(block, CODE) == 1
    assert zero_one_parity(CodeBlock(), CODE) == 0


@pytest.mark.parametrize(
    "rows, zo",
    [
        (("1110100", "1110100", "1101001"), "1100010"),  # dependent
        (("1000000", "1001110", "1101001"), "1100010"),  # wrong weight
        (("1110100", "1001110", "1101001"), "1110100"),  # zero/one row in span
        (("1110100", "1001110", "1101001"), "1000000"),  # odd overlap
    ],
)
def test_build_rejects_bad_rows(rows, zo):
    with pytest.raises(ValueError):
        build_steane(rows, zo)


def test_logical_membership():
    rep, logical = reduce_pattern(CODE.all_ones, CODE)
    assert rep == (0,) * 7 and logical
    for s in STABILIZERS:
        rep, logical = reduce_pattern(s, CODE)
        assert rep == (0,) * 7 and not logical


def _residual_ok(pattern, rep, logical):
    residual = tuple(a ^ b ^ (c if logical else 0) for a, b, c in zip(pattern, rep, CODE.all_ones))
    return residual in STABILIZERS


def test_reduce_pattern_coset_soundness():
    for pattern in ALL_PATTERNS:
        rep, logical = reduce_pattern(pattern, CODE)
        assert sum(rep) <= 1
        assert CODE.syndrome(rep) == CODE.syndrome(pattern)
        assert _residual_ok(pattern, rep, logical)


def test_canonicalize_exhaustive():
    # all 2**14 joint bit/phase patterns
    for bit, phase in itertools.product(ALL_PATTERNS, ALL_PATTERNS):
        block = canonicalize(CodeBlock.from_patterns(bit, phase), CODE)
        for comp, pat, flag in (("bit", bit, block.logical_x_failed), ("phase", phase, block.logical_z_failed)):
            assert _residual_ok(pat, block.pattern(comp), flag)
        again = canonicalize(block.copy(), CODE)
        assert again == block


def test_canonicalize_toggles():
    block = CodeBlock.from_patterns(bit="1111111")
    canonicalize(block, CODE)
    assert block.logical_x_failed and not block.logical_z_failed and not any(block.qubits)
    block.set_pattern("bit", "1111111")
    canonicalize(block, CODE)
    assert not block.failed


def test_two_flips_become_logical():
    # weight-2 error decodes to a third flip: the residual is a logical op
    block = CodeBlock.from_patterns(phase="1100000")
    canonicalize(block, CODE)
    assert block.logical_z_failed
    assert sum(block.pattern("phase")) == 1


def test_block_helpers():
    block = CodeBlock.from_patterns(bit="0010000", phase=[0, 0, 1, 0, 0, 0, 0])
    assert block.qubits[2] == ErrorFlags(True, True)
    assert syndrome_of(block, "bit", CODE) == CODE.syndrome((0, 0, 1, 0, 0, 0, 0))
    assert not block.is_clean()
    c = block.copy()
    c.qubits[2] = ErrorFlags()
    assert block.qubits[2] == ErrorFlags(True, True)
    assert c.is_clean()
    assert span(CODE.parity_rows)[0] == (0,) * 7
