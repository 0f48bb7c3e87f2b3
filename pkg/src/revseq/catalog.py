"""Constructors for the sequential designs built around the Pareek gate.

Each entry pairs a circuit with its published metrics (where a comparison
table exists) and a behavioural model. The model is the ground truth for the
wiring: a cycle of the circuit must agree with one step of the model for
every input and register state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Callable, Mapping, Sequence

from revseq.gatelib import HwComplexity, builtin, is_parity_preserving
from revseq.metrics import MetricsReport, compute_metrics, divergences, load_references
from revseq.netlist import GATE_TOKENS, Circuit, FeedbackBinding, GateInstance, check, serialize
from revseq.sim import Stimulus, run_sequential

State = tuple[int, ...]
# (inputs by name, registers in feedback order) -> (next registers, outputs by line name)
StepFn = Callable[[Mapping[str, int], State], tuple[State, dict]]


class UnknownEntryError(KeyError):
    pass


@dataclass(frozen=True)
class Model:
    """Reference behaviour: a Mealy machine over named primary inputs."""

    inputs: tuple[str, ...]
    step: StepFn
    excluded: Callable[[Mapping[str, int], State], bool] = lambda i, s: False
    description: str = ""


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    circuit: Circuit
    expected_metrics: MetricsReport
    model: Model
    reference: str | None = None       # key into the bundled reference data
    divergent: tuple[str, ...] = ()    # metric fields known to differ from the published row
    summary: str = ""

    @property
    def metrics(self) -> MetricsReport:
        return compute_metrics(self.circuit)

    @property
    def parity_preserving(self) -> bool:
        return all(is_parity_preserving(g.kind) for g in self.circuit.gates)

    def divergences(self) -> list[dict]:
        return divergences(self.metrics, self.expected_metrics)

    @property
    def oracle(self) -> str:
        return self.model.description


def _build(name: str, lines: Sequence[tuple[str, str, str]],
           gates: Sequence[tuple[str, ...]], feedback: Sequence[tuple[str, str]] = (),
           test: str | None = None) -> Circuit:
    """``lines`` holds (var, input role, output role); gates use netlist tokens."""
    vars_ = tuple(v for v, _, _ in lines)
    idx = {v: i for i, v in enumerate(vars_)}
    gs = tuple(GateInstance(builtin(GATE_TOKENS[tok]), tuple(idx[v] for v in refs))
               for tok, *refs in gates)
    return check(Circuit(
        name=name,
        vars=vars_,
        inputs=tuple(r for _, r, _ in lines),
        outputs=tuple(r for _, _, r in lines),
        gates=gs,
        feedbacks=tuple(FeedbackBinding(idx[s], idx[t]) for s, t in feedback),
        test_line=idx[test] if test else None,
    ))


def _mx(sel: int, one: int, zero: int) -> int:
    return one if sel else zero


def _hc(a, b, d) -> HwComplexity:
    return HwComplexity(a, b, d)


# ---------------------------------------------------------------- models

def _d_latch(positive: bool, out: str, extra: Callable[[int], dict] | None = None) -> Model:
    def step(i, s):
        en = i["CLK"] if positive else 1 - i["CLK"]
        q = _mx(en, i["D"], s[0])
        outs = {out: q}
        if extra:
            outs.update(extra(q))
        return (q,), outs
    level = "CLK" if positive else "CLK'"
    return Model(("CLK", "D"), step, description=f"Q+ = D.{level} + ({level})'.Q")


def _rs_model(out="Q") -> Model:
    def step(i, s):
        q = i["S"] & i["CLK"] | (1 - (i["R"] & i["CLK"])) & s[0]
        return (q,), {out: q}
    return Model(("CLK", "S", "R"), step,
                 excluded=lambda i, s: i["CLK"] == 1 and i["S"] == 1 and i["R"] == 1,
                 description="Q+ = S.CLK + (R.CLK)'.Q, S=R=1 under CLK=1 excluded")


def _jk_model(out="Q", extra=None) -> Model:
    def step(i, s):
        q = s[0]
        nxt = _mx(i["CLK"], (i["J"] & (1 - q)) | ((1 - i["K"]) & q), q)
        outs = {out: nxt}
        if extra:
            outs.update(extra(nxt))
        return (nxt,), outs
    return Model(("CLK", "J", "K"), step, description="Q+ = (J.Q' + K'.Q).CLK + CLK'.Q")


def _t_model(out="Q", xor_form=False) -> Model:
    def step(i, s):
        if xor_form:
            nxt = (i["T"] & i["CLK"]) ^ s[0]
        else:
            nxt = _mx(i["CLK"], i["T"] ^ s[0], s[0])
        return (nxt,), {out: nxt}
    desc = "Q+ = (T.CLK) ^ Q" if xor_form else "Q+ = (T ^ Q).CLK + CLK'.Q"
    return Model(("CLK", "T"), step, description=desc)


def _ms_model() -> Model:
    def step(i, s):
        clk, qm, qs = i["CLK"], s[0], s[1]
        qm2 = _mx(clk, i["D"], qm)
        qs2 = _mx(clk, qs, qm2)
        return (qm2, qs2), {"Qm": qs2}
    return Model(("CLK", "D"), step,
                 description="master Qm+ = D.CLK + CLK'.Qm; slave Qs+ = Qm+.CLK' + CLK.Qs")


def _det_model() -> Model:
    def step(i, s):
        clk, d = i["CLK"], i["D"]
        p = _mx(clk, d, s[0])
        n = _mx(clk, s[1], d)
        return (p, n), {"P": _mx(clk, n, p)}
    return Model(("CLK", "D"), step,
                 description="P+ = D.CLK + CLK'.P; N+ = D.CLK' + CLK.N; out = CLK'.P+ + CLK.N+")


def _sipo_model() -> Model:
    def step(i, s):
        ds = (i["SI"], *s[:3])
        nxt = tuple(_mx(i["CLK"], d, q) for d, q in zip(ds, s))
        return nxt, {f"Q{k}": v for k, v in enumerate(nxt)}
    return Model(("CLK", "SI"), step, description="Q0+ = SI, Qk+ = Q(k-1) on CLK=1")


def _johnson_model() -> Model:
    def step(i, s):
        ds = (1 - s[3], *s[:3])
        nxt = tuple(_mx(i["CLK"], d, q) for d, q in zip(ds, s))
        return nxt, {f"Q{k}": v for k, v in enumerate(nxt)}
    return Model(("CLK",), step, description="Q0+ = Q3', Qk+ = Q(k-1) on CLK=1")


def _piso_model() -> Model:
    def step(i, s):
        clk = i["CLK"]
        shift_in = (0, *s[:3])
        nxt = tuple(_mx(clk, i[f"I{k + 1}"], sh) for k, sh in enumerate(shift_in))
        return nxt, {"SO": nxt[3]}
    return Model(("CLK", "I1", "I2", "I3", "I4"), step,
                 description="CLK=1 loads I1..I4; CLK=0 shifts toward Q4; SO = Q4+")


# ---------------------------------------------------------------- circuits

def _d_ff_pos():
    return _build("d_ff_pos",
                  [("CLK", "-", "g"), ("Q", "-", "o"), ("c", "0", "-"), ("D", "-", "g")],
                  [("pk4", "CLK", "Q", "c", "D")], [("c", "Q")])


def _d_ff_neg():
    return _build("d_ff_neg",
                  [("CLK", "-", "g"), ("D", "-", "o"), ("c", "0", "-"), ("Q", "-", "g")],
                  [("pk4", "CLK", "D", "c", "Q")], [("c", "Q")])


def _d_ff_pos_qbar():
    return _build("d_ff_pos_qbar",
                  [("CLK", "-", "g"), ("Q", "-", "o"), ("c", "1", "o"), ("D", "-", "g"),
                   ("f", "0", "-")],
                  [("pk4", "CLK", "Q", "c", "D"), ("f2g3", "Q", "f", "D")], [("f", "Q")])


def _d_ff_neg_qbar():
    return _build("d_ff_neg_qbar",
                  [("CLK", "-", "g"), ("D", "-", "o"), ("c", "1", "o"), ("Q", "-", "g"),
                   ("f", "0", "-")],
                  [("pk4", "CLK", "D", "c", "Q"), ("f2g3", "D", "f", "Q")], [("f", "Q")])


def _rs_ff():
    # E = CLK.(S ^ R) enables the Pareek; S = R = 1 therefore holds.
    return _build("rs_ff",
                  [("CLK", "-", "g"), ("S", "-", "g"), ("R", "-", "g"), ("Q", "-", "o"),
                   ("e", "1", "g"), ("c", "0", "-")],
                  [("c2", "S", "R"), ("t3", "CLK", "R", "e"), ("n1", "e"),
                   ("pk4", "e", "Q", "c", "S")],
                  [("c", "Q")])


def _jk_ff():
    return _build("jk_ff",
                  [("CLK", "-", "g"), ("J", "-", "g"), ("K", "-", "g"), ("Q", "-", "o"),
                   ("c", "0", "g"), ("f", "0", "-")],
                  [("n1", "K"), ("fr3", "Q", "J", "K"), ("pk4", "CLK", "Q", "c", "J"),
                   ("c2", "Q", "f")],
                  [("f", "Q")])


def _t_ff():
    return _build("t_ff",
                  [("CLK", "-", "g"), ("T", "-", "g"), ("Q", "-", "o"), ("c", "0", "-")],
                  [("c2", "Q", "T"), ("pk4", "CLK", "Q", "c", "T")], [("c", "Q")])


def _ft_t_ff():
    # R = CLK.T ^ Q once B is tied to 0; the F2G copies it and clears the B line.
    return _build("ft_t_ff",
                  [("CLK", "-", "g"), ("b", "0", "g"), ("Q", "-", "o"), ("T", "-", "g"),
                   ("f", "0", "-")],
                  [("pk4", "CLK", "b", "Q", "T"), ("f2g3", "Q", "f", "b")], [("f", "Q")])


def _ft_xx_ff(name: str, x: str, y: str):
    """FT JK (x=J, y=K) or RS (x=S, y=R): Fredkin inverter, Fredkin mux, Pareek, F2G."""
    return _build(name,
                  [("CLK", "-", "g"), (x, "-", "g"), (y, "-", "g"), ("Q", "-", "o"),
                   ("a", "0", "g"), ("b", "1", "g"), ("c", "0", "g"), ("f", "0", "-"),
                   ("Qn", "1", "o")],
                  [("fr3", y, "a", "b"), ("fr3", "Q", x, "b"), ("pk4", "CLK", "Q", "c", x),
                   ("f2g3", "c", "f", "Qn")],
                  [("f", "Q")])


def _ms_d_ff():
    return _build("ms_d_ff",
                  [("CLK", "-", "g"), ("D", "-", "g"), ("Qm", "-", "o"), ("c0", "0", "-"),
                   ("Qs", "-", "g"), ("c1", "0", "-")],
                  [("pk4", "CLK", "Qm", "c0", "D"), ("pk4", "CLK", "Qm", "c1", "Qs")],
                  [("c0", "Qm"), ("c1", "Qs")])


def _det_d_ff():
    return _build("det_d_ff",
                  [("CLK", "-", "g"), ("D", "-", "g"), ("d", "0", "g"), ("e", "1", "g"),
                   ("P", "-", "o"), ("p", "0", "-"), ("N", "-", "g"), ("n", "0", "-")],
                  [("fr3", "D", "d", "e"), ("pk4", "CLK", "P", "p", "D"),
                   ("pk4", "CLK", "d", "n", "N"), ("fr3", "CLK", "P", "d")],
                  [("p", "P"), ("n", "N")])


def _shift_lines(serial_in: bool, last_const: str | None):
    lines = [("CLK", "-", "g")]
    if serial_in:
        lines.append(("SI", "-", "g"))
    lines += [(f"Q{k}", "-", "o") for k in range(4)]
    lines += [(f"c{k}", "0", "-") for k in range(4)]
    lines += [(f"k{k}", "0", "g") for k in range(1, 4)]
    if last_const:
        lines.append(("k4", last_const, "g"))
    return lines


def _sipo_4():
    # Old Q(k-1) is copied before any stage updates, so all stages see pre-clock values.
    gates = [("c2", f"Q{k - 1}", f"k{k}") for k in range(1, 4)]
    gates.append(("pk4", "CLK", "Q0", "c0", "SI"))
    gates += [("pk4", "CLK", f"Q{k}", f"c{k}", f"k{k}") for k in range(1, 4)]
    return _build("sipo_4", _shift_lines(True, None), gates,
                  [(f"c{k}", f"Q{k}") for k in range(4)])


def _johnson_4():
    gates = [("c2", f"Q{k - 1}", f"k{k}") for k in range(1, 4)]
    gates.append(("c2", "Q3", "k4"))
    gates.append(("pk4", "CLK", "Q0", "c0", "k4"))
    gates += [("pk4", "CLK", f"Q{k}", f"c{k}", f"k{k}") for k in range(1, 4)]
    return _build("johnson_4", _shift_lines(False, "1"), gates,
                  [(f"c{k}", f"Q{k}") for k in range(4)])


def _piso_4():
    # Stages run last to first so each Fredkin reads the previous stage's old
    # value. The Pareeks have A tied to 1 and simply copy D onto their Q line,
    # which feeds back to itself.
    lines = ([("CLK", "-", "g")] + [(f"I{k}", "-", "g") for k in range(1, 5)]
             + [(f"Q{k}", "-", "-") for k in range(1, 5)]
             + [("K", "1", "g"), ("Z", "0", "g"), ("SO", "0", "o")])
    prev = {1: "Z", 2: "Q1", 3: "Q2", 4: "Q3"}
    spare = {1: "I2", 2: "I3", 3: "I4", 4: "SO"}
    gates = []
    for k in (4, 3, 2, 1):
        gates.append(("fr3", "CLK", prev[k], f"I{k}"))
        gates.append(("pk4", "K", f"Q{k}", spare[k], prev[k]))
    return _build("piso_4", lines, gates, [(f"Q{k}", f"Q{k}") for k in range(1, 5)])


def _offline(name: str, positive: bool):
    data, state = ("Q", "D") if positive else ("D", "Q")
    return _build(name,
                  [("CLK", "-", "g"), (data, "-", "o"), ("c", "0", "-"), (state, "-", "g"),
                   ("C1", "0", "o"), ("C2", "1", "g")],
                  [("pk4", "CLK", data, "c", state), ("fr3", data, "C1", "C2")],
                  [("c", "Q")])


def _online_d_ff_pos():
    # L collects Q ^ R ^ S; folding L back onto the S line leaves T = Q ^ R.
    return _build("online_d_ff_pos",
                  [("CLK", "-", "g"), ("Q", "-", "o"), ("c", "0", "-"), ("D", "-", "o"),
                   ("L", "0", "g")],
                  [("pk4", "CLK", "Q", "c", "D"), ("c2", "Q", "L"), ("c2", "c", "L"),
                   ("c2", "D", "L"), ("c2", "L", "D")],
                  [("c", "Q")], test="D")


def _m(gc, go, ci, qc, a, b, d) -> MetricsReport:
    return MetricsReport(gc, go, ci, qc, _hc(a, b, d))


def _published(key: str) -> MetricsReport:
    return load_references()[key].published


def _with_t(model: Model) -> Model:
    def step(i, s):
        nxt, outs = model.step(i, s)
        return nxt, {**outs, "D": 0}
    return Model(model.inputs, step, model.excluded, model.description + "; T = 0")


def _with_t1(model: Model) -> Model:
    def step(i, s):
        nxt, outs = model.step(i, s)
        return nxt, {**outs, "C1": nxt[0]}
    return Model(model.inputs, step, model.excluded,
                 model.description + "; T1 = Q+ in normal mode")


_SPECS: dict[str, Callable[[], CatalogEntry]] = {}


def _entry(fn):
    _SPECS[fn.__name__.lstrip("_")] = fn
    return fn


@_entry
def _d_ff_pos_entry():
    return CatalogEntry("d_ff_pos", _d_ff_pos(), _published("d_ff"), _d_latch(True, "Q"),
                        "d_ff", summary="positive level D flip-flop, one Pareek gate")


@_entry
def _d_ff_neg_entry():
    return CatalogEntry("d_ff_neg", _d_ff_neg(), _published("ft_d_ff_neg"),
                        _d_latch(False, "D"), "ft_d_ff_neg",
                        summary="negative level D flip-flop, B and D ports swapped")


@_entry
def _d_ff_pos_qbar_entry():
    return CatalogEntry("d_ff_pos_qbar", _d_ff_pos_qbar(), _m(2, 2, 2, 9, 5, 2, 1),
                        _d_latch(True, "Q", lambda q: {"c": 1 - q}),
                        summary="positive level D flip-flop with Q and Q'")


@_entry
def _d_ff_neg_qbar_entry():
    return CatalogEntry("d_ff_neg_qbar", _d_ff_neg_qbar(), _m(2, 2, 2, 9, 5, 2, 1),
                        _d_latch(False, "D", lambda q: {"c": 1 - q}),
                        summary="negative level D flip-flop with Q and Q'")


@_entry
def _rs_ff_entry():
    return CatalogEntry("rs_ff", _rs_ff(), _published("rs_ff"), _rs_model(), "rs_ff",
                        divergent=("qc", "hc"),
                        summary="RS flip-flop: CNOT, Toffoli, NOT and Pareek")


@_entry
def _jk_ff_entry():
    return CatalogEntry("jk_ff", _jk_ff(), _published("jk_ff"), _jk_model(), "jk_ff",
                        divergent=("qc",), summary="JK flip-flop: NOT, Fredkin, Pareek, CNOT")


@_entry
def _t_ff_entry():
    return CatalogEntry("t_ff", _t_ff(), _published("t_ff"), _t_model(), "t_ff",
                        summary="T flip-flop: CNOT and Pareek")


@_entry
def _ft_t_ff_entry():
    return CatalogEntry("ft_t_ff", _ft_t_ff(), _published("ft_t_ff"),
                        _t_model(xor_form=True), "ft_t_ff", divergent=("go",),
                        summary="parity-preserving T flip-flop: Pareek and F2G")


@_entry
def _ft_jk_ff_entry():
    return CatalogEntry("ft_jk_ff", _ft_xx_ff("ft_jk_ff", "J", "K"), _published("ft_jk_ff"),
                        _jk_model(extra=lambda q: {"Qn": 1 - q}), "ft_jk_ff",
                        summary="parity-preserving JK flip-flop: 2 Fredkin, Pareek, F2G")


@_entry
def _ft_rs_ff_entry():
    base = _rs_model()

    def step(i, s):
        nxt, outs = base.step(i, s)
        return nxt, {**outs, "Qn": 1 - nxt[0]}
    return CatalogEntry("ft_rs_ff", _ft_xx_ff("ft_rs_ff", "S", "R"), _published("ft_rs_ff"),
                        Model(base.inputs, step, base.excluded, base.description), "ft_rs_ff",
                        summary="parity-preserving RS flip-flop: 2 Fredkin, Pareek, F2G")


@_entry
def _ms_d_ff_entry():
    return CatalogEntry("ms_d_ff", _ms_d_ff(), _published("ms_d_ff"), _ms_model(), "ms_d_ff",
                        summary="master-slave D flip-flop from two Pareek gates")


@_entry
def _det_d_ff_entry():
    return CatalogEntry("det_d_ff", _det_d_ff(), _published("det_d_ff"), _det_model(),
                        "det_d_ff",
                        summary="double edge triggered D flip-flop: 2 Pareek, 2 Fredkin")


@_entry
def _sipo_4_entry():
    return CatalogEntry("sipo_4", _sipo_4(), _published("sipo_4"), _sipo_model(), "sipo_4",
                        summary="4-bit serial-in parallel-out shift register")


@_entry
def _piso_4_entry():
    return CatalogEntry("piso_4", _piso_4(), _published("piso_4"), _piso_model(), "piso_4",
                        divergent=("go", "ci", "hc"),
                        summary="4-bit parallel-in serial-out shift register")


@_entry
def _johnson_4_entry():
    return CatalogEntry("johnson_4", _johnson_4(), _published("johnson_4"), _johnson_model(),
                        "johnson_4", summary="4-bit Johnson (shift register) counter")


@_entry
def _offline_d_ff_pos_entry():
    return CatalogEntry("offline_d_ff_pos", _offline("offline_d_ff_pos", True),
                        _published("offline_d_ff_pos"), _with_t1(_d_latch(True, "Q")),
                        "offline_d_ff_pos",
                        summary="offline testable D flip-flop, Fredkin test stage on Q")


@_entry
def _offline_d_ff_neg_entry():
    return CatalogEntry("offline_d_ff_neg", _offline("offline_d_ff_neg", False),
                        _m(2, 3, 3, 12, 5, 6, 2), _with_t1(_d_latch(False, "D")),
                        summary="offline testable negative level D flip-flop")


@_entry
def _online_d_ff_pos_entry():
    return CatalogEntry("online_d_ff_pos", _online_d_ff_pos(), _m(5, 2, 2, 11, 7, 2, 1),
                        _with_t(_d_latch(True, "Q")),
                        summary="online testable D flip-flop; test output T on the D line")


def names() -> list[str]:
    return [n.removesuffix("_entry") for n in _SPECS]


def build(name: str) -> CatalogEntry:
    key = f"{name}_entry"
    if key not in _SPECS:
        raise UnknownEntryError(f"unknown catalog entry {name!r}; try one of {names()}")
    return _SPECS[key]()


def all_entries() -> list[CatalogEntry]:
    return [build(n) for n in names()]


def conformance(entry: CatalogEntry) -> list[dict]:
    """Compare one clock of the circuit with the model for every input and state.

    Returns the mismatches (empty when the circuit conforms).
    """
    c, m = entry.circuit, entry.model
    nstate = len(c.feedbacks)
    bad = []
    for state in product((0, 1), repeat=nstate):
        for bits in product((0, 1), repeat=len(m.inputs)):
            inp = dict(zip(m.inputs, bits))
            if m.excluded(inp, state):
                continue
            want_state, want_out = m.step(inp, state)
            tr = run_sequential(c, Stimulus(m.inputs, (bits,)), init=state)
            cy = tr[0]
            got_out = {k: cy.outputs[c.line(k)] for k in want_out}
            if cy.state != want_state or got_out != want_out:
                bad.append({"inputs": inp, "state": state, "want": (want_state, want_out),
                            "got": (cy.state, got_out)})
    return bad


def run_model(entry: CatalogEntry, rows: Sequence[Mapping[str, int]],
              init: State | None = None) -> list[tuple[State, dict]]:
    state = tuple(init) if init is not None else entry.circuit.initial_state()
    out = []
    for r in rows:
        state, outs = entry.model.step(r, state)
        out.append((state, outs))
    return out


def emit_all(directory: str | Path) -> dict:
    """Write every entry as ``<name>.rev`` plus an ``index.json``; returns the index."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    index = {}
    for e in all_entries():
        fname = f"{e.name}.rev"
        (d / fname).write_text(serialize(e.circuit), encoding="utf-8", newline="\n")
        index[e.name] = {
            "file": fname,
            "expected_metrics": e.expected_metrics.as_dict(),
            "divergent": list(e.divergent),
            "reference": e.reference,
            "oracle": e.oracle,
        }
    (d / "index.json").write_text(json.dumps(index, indent=2, sort_keys=True) + "\n",
                                  encoding="utf-8", newline="\n")
    return index
