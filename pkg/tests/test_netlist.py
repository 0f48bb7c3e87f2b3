import random

import pytest
from helpers import random_circuit

from revseq import catalog
from revseq.netlist import (CircuitValidationError, FeedbackBinding, NetlistSyntaxError,
                            UnknownGateError, gate, parse, read, serialize, validate, write)

D_FF = """\
# positive level D flip-flop
.name dff
.lines 4
.vars CLK Q c D
.constants --0-
.outputs go-g
.feedback c -> Q
.begin
pk4 CLK Q c D   # one gate
.end
"""


def test_parse_basic():
    c = parse(D_FF)
    assert c.name == "dff" and c.vars == ("CLK", "Q", "c", "D")
    assert c.gates == (gate("PAREEK", 0, 1, 2, 3),)
    assert c.feedbacks == (FeedbackBinding(2, 1),)
    assert c.primary_inputs == (0, 3)
    assert c.primary_outputs == (1,)
    assert c.constant_lines == (2,)
    assert c.garbage_lines == (0, 3)
    assert c.initial_state() == (0,)


def test_serialize_is_canonical():
    c = parse(D_FF)
    text = serialize(c)
    assert parse(text) == c
    assert serialize(parse(text)) == text


def test_default_masks_are_implicit():
    text = ".name inv\n.vars a\n.begin\nn1 a\n.end\n"
    c = parse(text)
    assert c.inputs == ("-",) and c.outputs == ("o",)
    assert serialize(c) == ".name inv\n.lines 1\n.vars a\n.begin\nn1 a\n.end\n"


def test_inputs_alias_and_init_and_test():
    text = D_FF.replace(".constants", ".inputs").replace(".begin", ".init 1\n.test D\n.begin")
    text = text.replace(".outputs go-g", ".outputs go-o")
    c = parse(text)
    assert c.init == (1,) and c.test_line == 3
    assert parse(serialize(c)) == c


@pytest.mark.parametrize("text, line", [
    (D_FF.replace("pk4 CLK", "xx9 CLK"), 9),
    (D_FF.replace("pk4 CLK Q c D", "pk4 CLK Q c"), 9),
    (D_FF.replace("pk4 CLK Q c D", "pk4 CLK Q c E"), 9),
    (D_FF.replace(".end\n", ""), 9),
    (D_FF.replace(".begin", ".begin\n.name again"), 9),
    (D_FF.replace(".lines 4", ".lines 5"), 1),
    (D_FF.replace(".name dff", ".bogus dff"), 2),
    (D_FF + "n1 Q\n", 11),
    (D_FF.replace(".feedback c -> Q", ".feedback c Q"), 7),
])
def test_syntax_errors_carry_line(text, line):
    with pytest.raises(NetlistSyntaxError) as info:
        parse(text)
    assert info.value.line == line


def test_unknown_gate_is_specific():
    with pytest.raises(UnknownGateError) as info:
        parse(D_FF.replace("pk4 CLK", "xx9 CLK"))
    assert info.value.column == 1


def kinds(text):
    with pytest.raises(CircuitValidationError) as info:
        parse(text)
    return {v.kind for v in info.value.violations}


def test_role_violations():
    assert "role-conflict" in kinds(D_FF.replace("--0-", "-00-"))           # constant sink
    assert "role-conflict" in kinds(D_FF.replace("go-g", "gooo"))           # sink fed by 'o'
    assert "dangling-feedback" in kinds(D_FF.replace("go-g", "go--"))       # unused '-'
    assert "dangling-feedback" in kinds(D_FF.replace("c -> Q", "c -> Z"))
    assert "duplicate-sink" in kinds(D_FF.replace(".feedback c -> Q",
                                                  ".feedback c -> Q\n.feedback c -> Q"))
    assert "duplicate-line" in kinds(D_FF.replace("pk4 CLK Q c D", "pk4 CLK Q Q D"))
    assert "init-length" in kinds(D_FF.replace(".begin", ".init 10\n.begin"))
    assert "duplicate-var" in kinds(D_FF.replace("CLK Q c D", "CLK Q c Q")
                                    .replace("pk4 CLK Q c D", "n1 CLK"))
    assert "bad-mask" in kinds(D_FF.replace("--0-", "--x-"))
    assert "mask-length" in kinds(D_FF.replace("go-g", "go-"))


def test_self_feedback_allowed():
    text = ".name s\n.vars a b\n.outputs -o\n.feedback a -> a\n.begin\nc2 a b\n.end\n"
    c = parse(text)
    assert c.feedbacks == (FeedbackBinding(0, 0),)


def test_validate_valid_catalog():
    for e in catalog.all_entries():
        assert validate(e.circuit) == []


def test_read_write(tmp_path):
    c = parse(D_FF)
    p = tmp_path / "x.rev"
    write(c, p)
    assert read(p) == c


def test_random_circuits_round_trip():
    rng = random.Random(7)
    for k in range(300):
        c = random_circuit(rng, k)
        assert validate(c) == []
        text = serialize(c)
        assert serialize(parse(text)) == text
