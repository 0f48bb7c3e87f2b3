"""Fault models, injection and test-set analysis.

A fault site is a gate port, on the input side (just before the gate reads
it) or the output side (just after the gate writes it). Stuck-at faults force
the port to a fixed value; a bit flip complements it. Sequential circuits are
analysed offline in their broken-feedback form.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Iterable, Sequence

from revseq.gatelib import BitVec, bits_to_str, is_parity_preserving, parity
from revseq.netlist import Circuit
from revseq.sim import SiteHooks, Trace, cascade, free_vectors

EXHAUSTIVE_LIMIT = 16


class FaultModel(str, enum.Enum):
    STUCK_AT = "STUCK_AT"
    BIT_FLIP = "BIT_FLIP"

    @classmethod
    def parse(cls, text: str) -> FaultModel:
        key = {"stuck": "STUCK_AT", "flip": "BIT_FLIP"}.get(text.lower(), text.upper())
        return cls(key)


class FaultSiteError(ValueError):
    pass


class ParityPreconditionError(ValueError):
    """Parity detection needs every gate to be parity-preserving."""


class ExhaustiveLimitError(ValueError):
    pass


class NoTestLineError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class FaultSpec:
    gate: int
    port: int
    side: str  # "input" or "output"
    model: FaultModel = FaultModel.STUCK_AT
    polarity: int | None = None

    def __post_init__(self):
        if self.side not in ("input", "output"):
            raise FaultSiteError(f"side must be input or output, not {self.side!r}")
        if self.model is FaultModel.STUCK_AT and self.polarity not in (0, 1):
            raise FaultSiteError("stuck-at faults need polarity 0 or 1")
        if self.model is FaultModel.BIT_FLIP and self.polarity is not None:
            raise FaultSiteError("bit flips take no polarity")

    @property
    def site(self) -> tuple[int, int, str]:
        return (self.gate, self.port, self.side)

    def label(self) -> str:
        side = "in" if self.side == "input" else "out"
        kind = f"sa{self.polarity}" if self.model is FaultModel.STUCK_AT else "flip"
        return f"g{self.gate}.{side}{self.port}:{kind}"

    @classmethod
    def from_label(cls, text: str) -> FaultSpec:
        """Inverse of :meth:`label`, e.g. ``g0.out1:sa0`` or ``g2.in0:flip``."""
        try:
            site, kind = text.split(":")
            g, port = site.split(".")
            side = "input" if port.startswith("in") else "output"
            port_no = int(port[2:] if side == "input" else port[3:])
            gate_no = int(g[1:])
        except ValueError as e:
            raise FaultSiteError(f"bad fault label {text!r}") from e
        if kind == "flip":
            return cls(gate_no, port_no, side, FaultModel.BIT_FLIP)
        if kind in ("sa0", "sa1"):
            return cls(gate_no, port_no, side, FaultModel.STUCK_AT, int(kind[2]))
        raise FaultSiteError(f"bad fault kind in {text!r}")

    def as_dict(self) -> dict:
        return {"label": self.label(), "gate": self.gate, "port": self.port,
                "side": self.side, "model": self.model.value, "polarity": self.polarity}


def stuck_at(gate: int, port: int, side: str, polarity: int) -> FaultSpec:
    return FaultSpec(gate, port, side, FaultModel.STUCK_AT, polarity)


def bit_flip(gate: int, port: int, side: str = "output") -> FaultSpec:
    return FaultSpec(gate, port, side, FaultModel.BIT_FLIP)


def enumerate_faults(c: Circuit, model: FaultModel | str) -> list[FaultSpec]:
    """Stuck-at: both sides and polarities of every port. Bit flip: every output port."""
    model = FaultModel.parse(model) if isinstance(model, str) else model
    out = []
    for k, g in enumerate(c.gates):
        if model is FaultModel.STUCK_AT:
            for side in ("input", "output"):
                for p in range(g.kind.arity):
                    out.extend(stuck_at(k, p, side, v) for v in (0, 1))
        else:
            out.extend(bit_flip(k, p) for p in range(g.kind.arity))
    return out


def _check_site(c: Circuit, f: FaultSpec):
    if not 0 <= f.gate < len(c.gates):
        raise FaultSiteError(f"{f.label()}: gate {f.gate} not in 0..{len(c.gates) - 1}")
    if not 0 <= f.port < c.gates[f.gate].kind.arity:
        raise FaultSiteError(f"{f.label()}: port {f.port} exceeds gate arity")


def _force(v):
    return lambda _: v


def _flip(x):
    return 1 - x


def fault_hooks(c: Circuit, faults: FaultSpec | Iterable[FaultSpec]) -> SiteHooks:
    """Simulator hooks for one or more faults; two faults at one site compose."""
    if isinstance(faults, FaultSpec):
        faults = (faults,)
    hooks: dict = {}
    for f in faults:
        _check_site(c, f)
        h = _force(f.polarity) if f.model is FaultModel.STUCK_AT else _flip
        prev = hooks.get(f.site)
        hooks[f.site] = h if prev is None else (lambda x, a=prev, b=h: b(a(x)))
    return hooks


def inject(c: Circuit, f: FaultSpec | Iterable[FaultSpec], bits: Sequence[int]) -> BitVec:
    """Evaluate the gate cascade with the fault(s) active.

    ``bits`` is a full line vector; constants are not enforced, so test
    harnesses may drive constant lines directly.
    """
    if c.feedbacks:
        raise ValueError(f"{c.name} has feedback; inject into break_feedback(c)")
    if len(bits) != c.width:
        raise ValueError(f"expected {c.width} bits, got {len(bits)}")
    return cascade(c, bits, fault_hooks(c, f))


def parity_detects(c: Circuit, f: FaultSpec | Iterable[FaultSpec], bits: Sequence[int]) -> bool:
    """True iff the faulty output parity differs from the input parity."""
    bad = [g.kind.name for g in c.gates if not is_parity_preserving(g.kind)]
    if bad:
        raise ParityPreconditionError(f"{c.name}: not parity-preserving: {sorted(set(bad))}")
    return parity(inject(c, f, bits)) != parity(bits)


@dataclass(frozen=True)
class CoverageReport:
    faults: tuple[FaultSpec, ...]
    vectors: tuple[BitVec, ...]
    detected: dict = field(default_factory=dict)  # FaultSpec -> tuple of vectors

    @property
    def undetected(self) -> list[FaultSpec]:
        return [f for f in self.faults if not self.detected.get(f)]

    @property
    def coverage(self) -> float:
        return (len(self.faults) - len(self.undetected)) / len(self.faults) if self.faults else 1.0

    @property
    def complete(self) -> bool:
        return not self.undetected


def _observed(c: Circuit) -> tuple[int, ...]:
    return c.primary_outputs


def evaluate_test_set(c: Circuit, vectors: Sequence[Sequence[int]],
                      faults: Sequence[FaultSpec]) -> CoverageReport:
    """A vector detects a fault when any primary output differs from the good run."""
    vectors = tuple(tuple(v) for v in vectors)
    obs = _observed(c)
    good = {v: cascade(c, v) for v in vectors}
    detected = {}
    for f in faults:
        hooks = fault_hooks(c, f)
        hits = []
        for v in vectors:
            out = cascade(c, v, hooks)
            if any(out[i] != good[v][i] for i in obs):
                hits.append(v)
        detected[f] = tuple(hits)
    return CoverageReport(tuple(faults), vectors, detected)


@dataclass(frozen=True)
class MinimalTestSet:
    """Smallest vector set detecting every detectable fault.

    ``undetectable`` non-empty means no complete test set exists.
    """

    vectors: tuple[BitVec, ...]
    undetectable: tuple[FaultSpec, ...]

    @property
    def complete(self) -> bool:
        return not self.undetectable


def minimal_complete_test_set(c: Circuit, model: FaultModel | str,
                              faults: Sequence[FaultSpec] | None = None) -> MinimalTestSet:
    """Exact minimum by increasing subset size over all legal input vectors.

    Candidates are every assignment of the non-constant lines; among sets of
    equal size the lexicographically first (in ascending vector order) wins.
    """
    free = sum(1 for m in c.inputs if m == "-")
    if free > EXHAUSTIVE_LIMIT:
        raise ExhaustiveLimitError(f"{c.name}: {free} free inputs exceed {EXHAUSTIVE_LIMIT}")
    faults = list(enumerate_faults(c, model) if faults is None else faults)
    vectors = sorted(free_vectors(c))
    report = evaluate_test_set(c, vectors, faults)
    index = {f: k for k, f in enumerate(faults)}
    masks = []
    for v in vectors:
        m = 0
        for f in faults:
            if v in report.detected[f]:
                m |= 1 << index[f]
        masks.append(m)
    undetectable = tuple(report.undetected)
    target = 0
    for f in faults:
        if report.detected[f]:
            target |= 1 << index[f]
    if target == 0:
        return MinimalTestSet((), undetectable)
    useful = [k for k, m in enumerate(masks) if m]
    for size in range(1, len(useful) + 1):
        for combo in combinations(useful, size):
            acc = 0
            for k in combo:
                acc |= masks[k]
            if acc == target:
                return MinimalTestSet(tuple(vectors[k] for k in combo), undetectable)
    raise AssertionError("unreachable: the full vector set covers every detectable fault")


class Verdict(str, enum.Enum):
    NO_FAULT = "NO_FAULT"
    FAULT = "FAULT"


def online_check(c: Circuit, t: Trace) -> list[Verdict]:
    """Per-cycle verdict read from the designated test output."""
    if c.test_line is None:
        raise NoTestLineError(f"{c.name} declares no test output line")
    return [Verdict.FAULT if cy.outputs[c.test_line] else Verdict.NO_FAULT for cy in t.cycles]


def free_constants(c: Circuit, names: Iterable[str]) -> Circuit:
    """Turn the named constant lines into primary inputs (test-mode controls)."""
    inputs = list(c.inputs)
    for n in names:
        i = c.line(n)
        if inputs[i] not in "01":
            raise ValueError(f"{n} is not a constant line")
        inputs[i] = "-"
    return replace(c, inputs=tuple(inputs))


@dataclass(frozen=True)
class Campaign:
    circuit: str
    model: FaultModel
    report: CoverageReport
    minimal: MinimalTestSet | None = None

    def as_dict(self) -> dict:
        vec_ids = {v: k for k, v in enumerate(self.report.vectors)}
        return {
            "circuit": self.circuit,
            "model": self.model.value,
            "vectors": [bits_to_str(v) for v in self.report.vectors],
            "faults": [f.as_dict() for f in self.report.faults],
            "coverage": {f.label(): [vec_ids[v] for v in self.report.detected[f]]
                         for f in self.report.faults if self.report.detected[f]},
            "minimal_set": ([bits_to_str(v) for v in self.minimal.vectors]
                            if self.minimal else []),
            "undetectable": [f.label() for f in
                             (self.minimal.undetectable if self.minimal
                              else self.report.undetected)],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["fault", *(bits_to_str(v) for v in self.report.vectors)])
        for f in self.report.faults:
            hits = set(self.report.detected[f])
            w.writerow([f.label(), *(int(v in hits) for v in self.report.vectors)])
        return buf.getvalue()


def campaign(c: Circuit, model: FaultModel | str,
             vectors: Sequence[Sequence[int]] | None = None,
             minimal: bool = False) -> Campaign:
    """Run every fault of ``model`` against ``vectors`` (default: all legal vectors)."""
    model = FaultModel.parse(model) if isinstance(model, str) else model
    faults = enumerate_faults(c, model)
    vecs = sorted(free_vectors(c)) if vectors is None else [tuple(v) for v in vectors]
    report = evaluate_test_set(c, vecs, faults)
    best = minimal_complete_test_set(c, model, faults) if minimal else None
    return Campaign(c.name, model, report, best)
