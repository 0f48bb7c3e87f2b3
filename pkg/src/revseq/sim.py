"""Combinational evaluation and cycle-accurate sequential simulation.

Gates run in list order. Feedback is a unit-delay register: the value on a
feedback-source line at the end of cycle ``t`` is the sink line's input at
cycle ``t + 1``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Mapping, Sequence

from revseq.gatelib import BitVec, bits_from_int, bits_to_int
from revseq.netlist import Circuit

# (gate ordinal, port, side) -> value transform; used for fault injection
SiteHooks = Mapping[tuple[int, int, str], Callable[[int], int]]


class SimulationError(ValueError):
    pass


class SequentialCircuitError(SimulationError):
    """A combinational-only operation was given a circuit with feedback."""


class StimulusError(SimulationError):
    pass


def cascade(c: Circuit, bits: Sequence[int], hooks: SiteHooks | None = None) -> BitVec:
    """Run the gate list on a full line vector, no role checks."""
    state = list(bits)
    for k, g in enumerate(c.gates):
        ins = [state[i] for i in g.lines]
        if hooks:
            for p in range(len(ins)):
                h = hooks.get((k, p, "input"))
                if h is not None:
                    ins[p] = h(ins[p])
        outs = g.kind.rows[bits_to_int(ins)]
        if hooks:
            outs = list(outs)
            for p in range(len(outs)):
                h = hooks.get((k, p, "output"))
                if h is not None:
                    outs[p] = h(outs[p])
        for i, v in zip(g.lines, outs):
            state[i] = v
    return tuple(state)


def eval_combinational(c: Circuit, bits: Sequence[int]) -> BitVec:
    if c.feedbacks:
        raise SequentialCircuitError(f"{c.name} has feedback; use run_sequential "
                                     "or break_feedback first")
    if len(bits) != c.width:
        raise StimulusError(f"{c.name}: expected {c.width} bits, got {len(bits)}")
    for i in c.constant_lines:
        if bits[i] != int(c.inputs[i]):
            raise StimulusError(f"{c.name}: constant line {c.vars[i]} must be {c.inputs[i]}")
    return cascade(c, bits)


def permutation(c: Circuit) -> tuple[int, ...]:
    """The whole-circuit map over all ``2**width`` line vectors (roles ignored)."""
    return tuple(bits_to_int(cascade(c, bits_from_int(x, c.width)))
                 for x in range(1 << c.width))


def free_vectors(c: Circuit) -> Iterable[BitVec]:
    """Every full input vector with constants at their declared values."""
    free = [i for i in range(c.width) if c.inputs[i] == "-"]
    base = [int(m) if m in "01" else 0 for m in c.inputs]
    for x in range(1 << len(free)):
        vec = list(base)
        for j, b in zip(free, bits_from_int(x, len(free))):
            vec[j] = b
        yield tuple(vec)


@dataclass(frozen=True)
class Stimulus:
    """Per-cycle values for named primary inputs."""

    names: tuple[str, ...]
    rows: tuple[BitVec, ...]

    @property
    def cycles(self) -> int:
        return len(self.rows)

    @classmethod
    def from_dicts(cls, rows: Sequence[Mapping[str, int]]) -> Stimulus:
        if not rows:
            return cls((), ())
        names = tuple(rows[0])
        return cls(names, tuple(tuple(int(r[n]) for n in names) for r in rows))

    @classmethod
    def constant(cls, values: Mapping[str, int], cycles: int) -> Stimulus:
        return cls.from_dicts([dict(values)] * cycles)

    @classmethod
    def read_csv(cls, text: str) -> Stimulus:
        reader = csv.reader(io.StringIO(text))
        rows = [r for r in reader if r and any(cell.strip() for cell in r)]
        if not rows:
            raise StimulusError("empty stimulus file")
        names = tuple(h.strip() for h in rows[0])
        body = []
        for lineno, r in enumerate(rows[1:], start=2):
            cells = [cell.strip() for cell in r]
            if len(cells) != len(names) or set(cells) - {"0", "1"}:
                raise StimulusError(f"stimulus row {lineno}: expected {len(names)} bits")
            body.append(tuple(int(x) for x in cells))
        return cls(names, tuple(body))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.names)
        w.writerows(self.rows)
        return buf.getvalue()


@dataclass(frozen=True)
class Cycle:
    inputs: BitVec   # full line vector fed to the cascade
    outputs: BitVec  # full line vector after the cascade
    state: BitVec    # feedback registers after this cycle


@dataclass(frozen=True)
class Trace:
    circuit: Circuit
    cycles: tuple[Cycle, ...]

    def __len__(self):
        return len(self.cycles)

    def __getitem__(self, t):
        return self.cycles[t]

    def output(self, var: str) -> list[int]:
        i = self.circuit.line(var)
        return [cy.outputs[i] for cy in self.cycles]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        names = self.circuit.vars
        w.writerow(["cycle", *(f"in.{v}" for v in names), *(f"out.{v}" for v in names)])
        for t, cy in enumerate(self.cycles):
            w.writerow([t, *cy.inputs, *cy.outputs])
        return buf.getvalue()


def run_sequential(c: Circuit, s: Stimulus, init: Sequence[int] | None = None,
                   cycles: int | None = None, hooks: SiteHooks | None = None) -> Trace:
    """Clock the circuit once per stimulus row.

    ``init`` overrides the circuit's declared initial register values;
    ``cycles`` truncates the stimulus.
    """
    pis = c.primary_inputs
    names = {c.vars[i] for i in pis}
    if set(s.names) != names or len(s.names) != len(names):
        raise StimulusError(f"{c.name}: stimulus columns {sorted(s.names)} "
                            f"must be exactly the primary inputs {sorted(names)}")
    cols = [c.line(n) for n in s.names]
    regs = tuple(init) if init is not None else c.initial_state()
    if len(regs) != len(c.feedbacks):
        raise StimulusError(f"{c.name}: {len(regs)} initial bits for "
                            f"{len(c.feedbacks)} feedbacks")
    rows = s.rows if cycles is None else s.rows[:cycles]
    base = [int(m) if m in "01" else 0 for m in c.inputs]
    out = []
    for row in rows:
        vec = list(base)
        for i, b in zip(cols, row):
            vec[i] = b
        for fb, r in zip(c.feedbacks, regs):
            vec[fb.sink] = r
        result = cascade(c, vec, hooks)
        regs = tuple(result[fb.source] for fb in c.feedbacks)
        out.append(Cycle(tuple(vec), result, regs))
    return Trace(c, tuple(out))


def break_feedback(c: Circuit) -> Circuit:
    """Open every feedback loop: sinks become primary inputs, sources primary outputs."""
    if not c.feedbacks:
        return c
    outputs = list(c.outputs)
    for fb in c.feedbacks:
        outputs[fb.source] = "o"
    return replace(c, outputs=tuple(outputs), feedbacks=(), init=None)
