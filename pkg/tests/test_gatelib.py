import pytest

from revseq.gatelib import (BUILTIN_NAMES, ArityError, GateKind, GateLookupError, HwComplexity,
                            bits_from_int, bits_from_str, bits_to_int, bits_to_str, builtin,
                            eval_gate, is_conservative, is_parity_preserving, is_reversible,
                            parity, truth_table)

# name -> (arity, quantum cost, (alpha, beta, delta))
ATTRIBUTES = {
    "NOT": (1, 1, (0, 0, 1)),
    "CNOT": (2, 1, (1, 0, 0)),
    "TOFFOLI": (3, 5, (1, 1, 0)),
    "PERES": (3, 4, (2, 1, 0)),
    "FREDKIN": (3, 5, (2, 4, 1)),
    "F2G": (3, 2, (2, 0, 0)),
    "PAREEK": (4, 7, (3, 2, 1)),
}


def test_bit_helpers_round_trip():
    assert bits_from_int(9, 4) == (1, 0, 0, 1)
    for w in range(1, 6):
        for x in range(1 << w):
            assert bits_to_int(bits_from_int(x, w)) == x
    assert bits_from_str(" 0110 ") == (0, 1, 1, 0)
    assert bits_to_str((1, 0, 1)) == "101"
    assert parity((1, 1, 1)) == 1 and parity(()) == 0


@pytest.mark.parametrize("bad", ["", "012", "ab"])
def test_bits_from_str_rejects(bad):
    with pytest.raises(ValueError):
        bits_from_str(bad)


def test_bits_from_int_range():
    with pytest.raises(ValueError):
        bits_from_int(16, 4)


@pytest.mark.parametrize("name", sorted(ATTRIBUTES))
def test_attribute_table(name):
    g = builtin(name)
    arity, qc, (a, b, d) = ATTRIBUTES[name]
    assert (g.arity, g.quantum_cost, g.hw_complexity) == (arity, qc, HwComplexity(a, b, d))


def test_builtin_names_cover_attribute_table():
    assert set(BUILTIN_NAMES) == set(ATTRIBUTES)


def test_builtin_lookup_is_case_insensitive_and_errors():
    assert builtin("toffoli") == builtin("TOFFOLI")
    with pytest.raises(GateLookupError):
        builtin("SWAP")


@pytest.mark.parametrize("name", sorted(ATTRIBUTES))
def test_every_builtin_is_reversible(name):
    assert is_reversible(builtin(name))


def test_functions():
    assert eval_gate(builtin("NOT"), (0,)) == (1,)
    assert eval_gate(builtin("CNOT"), (1, 0)) == (1, 1)
    assert eval_gate(builtin("TOFFOLI"), (1, 1, 0)) == (1, 1, 1)
    assert eval_gate(builtin("TOFFOLI"), (1, 0, 0)) == (1, 0, 0)
    # Peres: P=A, Q=A^B, R=AB^C
    assert eval_gate(builtin("PERES"), (1, 1, 0)) == (1, 0, 1)
    assert eval_gate(builtin("FREDKIN"), (1, 0, 1)) == (1, 1, 0)


def test_parity_and_conservative_classification():
    pp = {n for n in ATTRIBUTES if is_parity_preserving(builtin(n))}
    assert pp == {"FREDKIN", "F2G", "PAREEK"}
    assert {n for n in ATTRIBUTES if is_conservative(builtin(n))} == {"FREDKIN"}


def test_eval_gate_arity():
    with pytest.raises(ArityError):
        eval_gate(builtin("CNOT"), (1, 0, 1))


def test_truth_table_order():
    rows = truth_table(builtin("CNOT"))
    assert rows == [((0, 0), (0, 0)), ((0, 1), (0, 1)), ((1, 0), (1, 1)), ((1, 1), (1, 0))]


def test_custom_gate_and_inverse():
    swap = GateKind("SWAP", 2, lambda a, b: (b, a))
    assert is_reversible(swap) and is_conservative(swap)
    inv = builtin("PAREEK").inverse_table()
    tab = builtin("PAREEK").table
    assert all(inv[tab[x]] == x for x in range(16))


def test_custom_gate_validation():
    with pytest.raises(ArityError):
        GateKind("WIDE", 9, lambda *b: b)
    with pytest.raises(ValueError):
        GateKind("BAD", 1, lambda a: (a, a))


def test_hw_complexity_algebra():
    x = HwComplexity(1, 2, 3)
    assert x + x == x * 2 == HwComplexity(2, 4, 6)
    assert str(HwComplexity(3, 2, 1)) == "3a+2b+1d"
    assert HwComplexity.from_dict(x.as_dict()) == x
    assert HwComplexity(3, 2, 1).dominates(HwComplexity(4, 4, 1))
    assert not HwComplexity(5, 3, 2).dominates(HwComplexity(5, 3, 1))
    with pytest.raises(ValueError):
        HwComplexity(-1, 0, 0)
