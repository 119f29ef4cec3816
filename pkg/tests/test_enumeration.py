from fractions import Fraction

import pytest

from ftthreshold.cli import mc_agreement
from ftthreshold.enumeration import (
    FaultInjector,
    cat_fault_table,
    enumerate_cat,
    enumerate_syndrome_measurement,
    format_fraction,
    location_faults,
    probe_locations,
    syndrome_locations,
    total_fault_weight,
)
from ftthreshold.ftec import cat_attempt
from ftthreshold.montecarlo import sample_cats
from ftthreshold.pauli_frame import NoiseModel

QUIET = NoiseModel(0.0)


def cat_arities(size=4):
    return probe_locations(lambda rng: cat_attempt(size, QUIET, rng))


def test_injector_counts_locations():
    arities = cat_arities()
    # 4 resets, Hadamard, 3 chain XORs, ancilla reset, 2 checks, readout
    assert arities == [1, 1, 1, 1, 1, 2, 2, 2, 1, 2, 2, 1]
    assert cat_arities(3) == [1, 1, 1, 1, 2, 2, 1, 2, 2, 1]
    with pytest.raises(TypeError):
        FaultInjector().random()


def test_location_faults():
    one = location_faults(0, 1)
    two = location_faults(0, 2)
    assert len(one) == 3 and len(two) == 15
    assert sum(f.weight for f in one) == 1
    assert sum(f.weight for f in two) == Fraction(5, 4)


@pytest.mark.parametrize("order", [1, 2])
def test_weight_conservation(order):
    table = cat_fault_table(order)
    assert sum(table.values()) == total_fault_weight(cat_arities(), order)


def test_total_weight_first_order():
    # 7 one-qubit locations at 1 and 5 two-qubit locations at 5/4
    assert total_fault_weight(cat_arities(), 1) == Fraction(53, 4)


def test_verification_completeness():
    table = cat_fault_table(1)
    assert all(bf <= 1 for (ok, _, bf) in table if ok)
    assert any(not ok for (ok, _, _) in table)


def test_cat_coefficients_of_this_circuit():
    c = enumerate_cat(order=2)
    # qubit 0 carries two one-qubit locations (reset and Hadamard), each 2/3
    assert c.p_1pf == Fraction(7, 3)
    assert c.p_1bf == Fraction(2, 3)
    assert c.p_1pf_1bf == Fraction(2, 3)
    assert c.p_2bf == Fraction(6)
    assert enumerate_cat(order=1).p_2bf is None
    with pytest.raises(ValueError):
        enumerate_cat(order=3)


@pytest.mark.parametrize("basis", ["s", "c"])
def test_syndrome_measurement_identities(basis):
    cat = enumerate_cat(order=1)
    m = enumerate_syndrome_measurement(4, basis)
    # a wrong bit: odd phase flips from the cat, or one fault in a coupling XOR
    assert m.p_sb == cat.p_1pf + cat.p_1pf_1bf + 4 * Fraction(2, 3)
    # a damaged codeword: a cat bit flip, or a coupling fault on the data side
    assert m.p_codeword == cat.p_1bf + cat.p_1pf_1bf + 4
    assert m.p_sb_codeword == m.p_sb_codeword_from_cat + m.p_sb_codeword_from_coupling
    assert m.p_sb_codeword_from_cat == cat.p_1pf_1bf


def test_syndrome_measurement_with_all_locations():
    s = enumerate_syndrome_measurement(4, "s", include_hadamard_and_readout=True)
    c = enumerate_syndrome_measurement(4, "c", include_hadamard_and_readout=True)
    assert (s.p_sb, s.p_codeword, s.p_sb_codeword) == (11, 8, 4)
    assert (c.p_sb, c.p_codeword, c.p_sb_codeword) == (11, Fraction(16, 3), Fraction(8, 3))


def test_syndrome_locations_layout():
    roles = syndrome_locations(4, "s")
    assert list(roles) == ["cat", "hadamard", "coupling", "readout"]
    assert roles["coupling"] == range(16, 20)
    assert syndrome_locations(4, "c")["coupling"] == range(12, 16)
    # 10 cat locations, then 3 each for Hadamards, couplings and readouts
    assert sum(len(r) for r in syndrome_locations(3, "s").values()) == 19
    with pytest.raises(ValueError):
        enumerate_syndrome_measurement(5)


def test_three_qubit_rows():
    m = enumerate_syndrome_measurement(3, "s")
    assert m.p_sb > 0 and m.p_codeword > 0


def test_format_fraction():
    assert format_fraction(Fraction(39, 9)) == "13/3"
    assert format_fraction(Fraction(12)) == "12"
    assert Fraction(format_fraction(Fraction(7, 3))) == Fraction(7, 3)


def test_sampled_cats_agree_with_enumeration():
    eps = 1e-3
    coeffs = enumerate_cat(order=2)
    sample = sample_cats(eps, 2_000_000, master_seed=4)
    flags = mc_agreement(coeffs, sample, eps)
    assert all(v["agree"] for v in flags.values()), flags
    # rejection rate is first order too
    assert 1.0 < sample.attempts / sample.samples < 1.0 + 20 * eps
