import json

import pytest

from revseq import catalog
from revseq.fault import (EXHAUSTIVE_LIMIT, ExhaustiveLimitError, FaultModel, FaultSiteError,
                          NoTestLineError, ParityPreconditionError, Verdict, bit_flip, campaign,
                          enumerate_faults, evaluate_test_set, fault_hooks, free_constants,
                          inject, minimal_complete_test_set, online_check, parity_detects,
                          stuck_at, FaultSpec)
from revseq.netlist import parse
from revseq.sim import Stimulus, break_feedback, free_vectors, run_sequential

BUFFER = ".name buf\n.vars a b\n.outputs og\n.begin\nc2 a b\n.end\n"
F2G = ".name f\n.vars a b c\n.begin\nf2g3 a b c\n.end\n"


def test_labels_round_trip():
    for f in (stuck_at(0, 1, "output", 0), stuck_at(3, 0, "input", 1), bit_flip(2, 3)):
        assert FaultSpec.from_label(f.label()) == f
    assert stuck_at(0, 1, "output", 0).label() == "g0.out1:sa0"
    assert bit_flip(2, 0, "input").label() == "g2.in0:flip"


@pytest.mark.parametrize("bad", ["g0.out1", "x.y:sa0", "g0.out1:sa2", "gA.in0:flip"])
def test_bad_labels(bad):
    with pytest.raises(FaultSiteError):
        FaultSpec.from_label(bad)


def test_spec_validation():
    with pytest.raises(FaultSiteError):
        FaultSpec(0, 0, "middle")
    with pytest.raises(FaultSiteError):
        FaultSpec(0, 0, "input", FaultModel.STUCK_AT, None)
    with pytest.raises(FaultSiteError):
        FaultSpec(0, 0, "input", FaultModel.BIT_FLIP, 1)
    assert FaultModel.parse("stuck") is FaultModel.STUCK_AT
    assert FaultModel.parse("BIT_FLIP") is FaultModel.BIT_FLIP


def test_enumeration_counts():
    c = parse(F2G)
    assert len(enumerate_faults(c, "stuck")) == 3 * 2 * 2
    assert len(enumerate_faults(c, FaultModel.BIT_FLIP)) == 3


def test_inject_semantics():
    c = parse(F2G)
    assert inject(c, stuck_at(0, 0, "input", 1), (0, 0, 0)) == (1, 1, 1)
    assert inject(c, stuck_at(0, 2, "output", 0), (1, 0, 0)) == (1, 1, 0)
    assert inject(c, bit_flip(0, 1), (0, 0, 0)) == (0, 1, 0)
    # two flips at one site cancel
    assert inject(c, [bit_flip(0, 1), bit_flip(0, 1)], (0, 0, 0)) == (0, 0, 0)
    with pytest.raises(FaultSiteError):
        inject(c, bit_flip(1, 0), (0, 0, 0))
    with pytest.raises(FaultSiteError):
        fault_hooks(c, bit_flip(0, 3))


def test_inject_rejects_feedback():
    with pytest.raises(ValueError):
        inject(catalog.build("d_ff_pos").circuit, bit_flip(0, 0), (0, 0, 0, 0))


def test_parity_detection():
    c = parse(F2G)
    assert all(parity_detects(c, bit_flip(0, p), v) for p in range(3) for v in free_vectors(c))
    assert not parity_detects(c, [bit_flip(0, 1), bit_flip(0, 2)], (1, 0, 1))
    with pytest.raises(ParityPreconditionError):
        parity_detects(parse(BUFFER), bit_flip(0, 0), (0, 0))


def test_observation_is_primary_outputs_only():
    c = parse(BUFFER)
    f = bit_flip(0, 1)           # garbage line: never observable
    rep = evaluate_test_set(c, list(free_vectors(c)), [f, bit_flip(0, 0)])
    assert rep.undetected == [f]
    assert rep.coverage == 0.5 and not rep.complete


def test_minimal_test_set_exact():
    c = parse(F2G)
    best = minimal_complete_test_set(c, "stuck")
    # two vectors cannot toggle both b and a^b, so three are needed
    assert best.complete and len(best.vectors) == 3
    assert evaluate_test_set(c, best.vectors, enumerate_faults(c, "stuck")).complete


def test_minimal_reports_undetectable():
    best = minimal_complete_test_set(parse(BUFFER), "stuck")
    assert not best.complete
    assert {f.label() for f in best.undetectable} == {"g0.in1:sa0", "g0.in1:sa1",
                                                         "g0.out1:sa0", "g0.out1:sa1"}


def test_exhaustive_limit():
    wide = ".name w\n.vars " + " ".join(f"x{i}" for i in range(EXHAUSTIVE_LIMIT + 1)) + \
        "\n.begin\nn1 x0\n.end\n"
    with pytest.raises(ExhaustiveLimitError):
        minimal_complete_test_set(parse(wide), "stuck")


def test_free_constants():
    flat = break_feedback(catalog.build("offline_d_ff_pos").circuit)
    free = free_constants(flat, ["C1", "C2"])
    assert len(list(free_vectors(free))) == 4 * len(list(free_vectors(flat)))
    with pytest.raises(ValueError):
        free_constants(flat, ["CLK"])


def test_online_check():
    c = catalog.build("online_d_ff_pos").circuit
    stim = Stimulus.from_dicts([{"CLK": 1, "D": 1}, {"CLK": 0, "D": 0}])
    assert online_check(c, run_sequential(c, stim)) == [Verdict.NO_FAULT] * 2
    bad = run_sequential(c, stim, hooks=fault_hooks(c, bit_flip(0, 2)))
    assert online_check(c, bad) == [Verdict.FAULT] * 2
    with pytest.raises(NoTestLineError):
        d = catalog.build("d_ff_pos").circuit
        online_check(d, run_sequential(d, stim))


def test_campaign_outputs():
    c = parse(F2G)
    camp = campaign(c, "flip", minimal=True)
    data = json.loads(camp.to_json())
    assert data["model"] == "BIT_FLIP" and len(data["vectors"]) == 8
    assert data["undetectable"] == [] and len(data["minimal_set"]) == 1
    rows = camp.to_csv().splitlines()
    assert rows[0].startswith("fault,000,001") and len(rows) == 4
    assert all(r.endswith(",1") for r in rows[1:])
