"""Circuit model and the text netlist format.

A circuit is a straight-line list of gate instances over ``width`` lines.
Every line carries one input role and one output role, written as two masks:

* input mask over ``{-, 0, 1}``: ``-`` is a free line (a primary input, or a
  feedback sink when named by a ``.feedback`` binding), ``0``/``1`` a constant;
* output mask over ``{o, g, -}``: primary output, garbage, or a line whose
  only use is to drive a feedback binding.

File format, one directive per line, ``#`` starts a comment::

    .name d_ff_pos
    .lines 4
    .vars clk q c d
    .constants --0-
    .outputs go-g
    .feedback c -> q
    .init 0
    .begin
    pk4 clk q c d
    .end

``.inputs`` is accepted as a synonym of ``.constants``. ``.test <var>``
designates the line read by the online checker.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from revseq.gatelib import GateKind, builtin

GATE_TOKENS = {
    "n1": "NOT",
    "c2": "CNOT",
    "t3": "TOFFOLI",
    "fr3": "FREDKIN",
    "pe3": "PERES",
    "f2g3": "F2G",
    "pk4": "PAREEK",
}
TOKEN_FOR_GATE = {v: k for k, v in GATE_TOKENS.items()}

_ID = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\[\]']*$")


class NetlistError(ValueError):
    """Base class for netlist parse and validation failures."""


class NetlistSyntaxError(NetlistError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class UnknownGateError(NetlistSyntaxError):
    pass


class CircuitValidationError(NetlistError):
    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


@dataclass(frozen=True)
class Violation:
    kind: str  # out-of-range | duplicate-line | arity | role-conflict | dangling-feedback | ...
    location: str
    message: str = ""

    def __str__(self):
        return f"[{self.kind}] {self.location}: {self.message}"


@dataclass(frozen=True)
class GateInstance:
    kind: GateKind
    lines: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(self.lines))


@dataclass(frozen=True)
class FeedbackBinding:
    source: int
    sink: int


@dataclass(frozen=True)
class Circuit:
    name: str
    vars: tuple[str, ...]
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    gates: tuple[GateInstance, ...] = ()
    feedbacks: tuple[FeedbackBinding, ...] = ()
    init: tuple[int, ...] | None = None
    test_line: int | None = None
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("vars", "inputs", "outputs", "gates", "feedbacks"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.init is not None:
            object.__setattr__(self, "init", tuple(self.init))
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.vars)})

    @property
    def width(self) -> int:
        return len(self.vars)

    @property
    def is_sequential(self) -> bool:
        return bool(self.feedbacks)

    def line(self, var: str) -> int:
        try:
            return self._index[var]
        except KeyError:
            raise KeyError(f"{self.name}: no line named {var!r}") from None

    @property
    def sink_lines(self) -> tuple[int, ...]:
        return tuple(fb.sink for fb in self.feedbacks)

    @property
    def source_lines(self) -> tuple[int, ...]:
        return tuple(fb.source for fb in self.feedbacks)

    @property
    def constant_lines(self) -> tuple[int, ...]:
        return tuple(i for i, m in enumerate(self.inputs) if m in "01")

    @property
    def primary_inputs(self) -> tuple[int, ...]:
        sinks = set(self.sink_lines)
        return tuple(i for i, m in enumerate(self.inputs) if m == "-" and i not in sinks)

    @property
    def primary_outputs(self) -> tuple[int, ...]:
        return tuple(i for i, m in enumerate(self.outputs) if m == "o")

    @property
    def garbage_lines(self) -> tuple[int, ...]:
        return tuple(i for i, m in enumerate(self.outputs) if m == "g")

    def initial_state(self) -> tuple[int, ...]:
        if self.init is None:
            return (0,) * len(self.feedbacks)
        return self.init

    def with_gates(self, gates: Iterable[GateInstance]) -> Circuit:
        return replace(self, gates=tuple(gates))


def gate(name: str, *lines: int) -> GateInstance:
    return GateInstance(builtin(name), tuple(lines))


def validate(c: Circuit) -> list[Violation]:
    """Check every structural invariant; an empty list means valid."""
    out: list[Violation] = []
    n = c.width
    if len(set(c.vars)) != n:
        out.append(Violation("duplicate-var", ".vars", "line names must be unique"))
    for v in c.vars:
        if not _ID.match(v):
            out.append(Violation("bad-identifier", ".vars", repr(v)))
    if len(c.inputs) != n:
        out.append(Violation("mask-length", ".constants", f"{len(c.inputs)} != {n}"))
    elif set(c.inputs) - {"-", "0", "1"}:
        out.append(Violation("bad-mask", ".constants", "".join(c.inputs)))
    if len(c.outputs) != n:
        out.append(Violation("mask-length", ".outputs", f"{len(c.outputs)} != {n}"))
    elif set(c.outputs) - {"o", "g", "-"}:
        out.append(Violation("bad-mask", ".outputs", "".join(c.outputs)))

    for k, g in enumerate(c.gates):
        loc = f"gate {k} ({g.kind.name})"
        if len(g.lines) != g.kind.arity:
            out.append(Violation("arity", loc, f"{len(g.lines)} lines for arity {g.kind.arity}"))
        bad = [i for i in g.lines if not 0 <= i < n]
        if bad:
            out.append(Violation("out-of-range", loc, f"line index {bad[0]} not < {n}"))
        if len(set(g.lines)) != len(g.lines):
            out.append(Violation("duplicate-line", loc, f"lines {list(g.lines)} repeat"))

    sinks_seen: set[int] = set()
    sources: set[int] = set()
    for k, fb in enumerate(c.feedbacks):
        loc = f"feedback {k}"
        if not (0 <= fb.source < n and 0 <= fb.sink < n):
            out.append(Violation("dangling-feedback", loc, f"{fb} references a missing line"))
            continue
        if fb.sink in sinks_seen:
            out.append(Violation("duplicate-sink", loc, f"line {c.vars[fb.sink]} fed twice"))
        sinks_seen.add(fb.sink)
        sources.add(fb.source)
        if len(c.inputs) == n and c.inputs[fb.sink] != "-":
            out.append(Violation("role-conflict", loc,
                                 f"sink {c.vars[fb.sink]} is a constant line"))
        if len(c.outputs) == n and c.outputs[fb.source] != "-":
            out.append(Violation("role-conflict", loc,
                                 f"source {c.vars[fb.source]} is marked {c.outputs[fb.source]!r}"))
    if len(c.outputs) == n:
        for i, m in enumerate(c.outputs):
            if m == "-" and i not in sources:
                out.append(Violation("dangling-feedback", f"line {c.vars[i]}",
                                     "marked feedback-source but drives no binding"))
    if c.init is not None:
        if len(c.init) != len(c.feedbacks):
            out.append(Violation("init-length", ".init",
                                 f"{len(c.init)} bits for {len(c.feedbacks)} feedbacks"))
        if set(c.init) - {0, 1}:
            out.append(Violation("bad-mask", ".init", repr(c.init)))
    if c.test_line is not None and not 0 <= c.test_line < n:
        out.append(Violation("out-of-range", ".test", f"line index {c.test_line}"))
    return out


def check(c: Circuit) -> Circuit:
    violations = validate(c)
    if violations:
        raise CircuitValidationError(violations)
    return c


def parse(text: str) -> Circuit:
    """Parse netlist text into a validated :class:`Circuit`."""
    name = None
    nlines = None
    vars_: list[str] | None = None
    inputs = outputs = None
    feedback_refs: list[tuple[str, str, int]] = []
    init = None
    test_ref = None
    gate_refs: list[tuple[str, list[str], int, int]] = []
    state = "header"

    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        stripped = body.strip()
        if not stripped:
            continue
        col = len(body) - len(body.lstrip()) + 1
        toks = stripped.split()
        head = toks[0]

        if state == "gates":
            if head == ".end":
                state = "done"
                continue
            if head.startswith("."):
                raise NetlistSyntaxError(f"directive {head} inside .begin/.end", lineno, col)
            if head not in GATE_TOKENS:
                raise UnknownGateError(f"unknown gate token {head!r}", lineno, col)
            gate_refs.append((head, toks[1:], lineno, col))
            continue
        if state == "done":
            raise NetlistSyntaxError(f"content after .end: {head!r}", lineno, col)

        args = toks[1:]
        if head == ".name":
            _expect(len(args) == 1, ".name takes one identifier", lineno, col)
            name = args[0]
        elif head == ".lines":
            _expect(len(args) == 1 and args[0].isdigit(), ".lines takes a count", lineno, col)
            nlines = int(args[0])
        elif head == ".vars":
            vars_ = args
        elif head in (".constants", ".inputs"):
            _expect(len(args) == 1, f"{head} takes one mask", lineno, col)
            inputs = tuple(args[0])
        elif head == ".outputs":
            _expect(len(args) == 1, ".outputs takes one mask", lineno, col)
            outputs = tuple(args[0])
        elif head == ".feedback":
            _expect(len(args) == 3 and args[1] == "->", ".feedback <src> -> <sink>", lineno, col)
            feedback_refs.append((args[0], args[2], lineno))
        elif head == ".init":
            _expect(len(args) == 1 and set(args[0]) <= {"0", "1"}, ".init takes bits",
                    lineno, col)
            init = tuple(int(ch) for ch in args[0])
        elif head == ".test":
            _expect(len(args) == 1, ".test takes one identifier", lineno, col)
            test_ref = (args[0], lineno)
        elif head == ".begin":
            state = "gates"
        else:
            raise NetlistSyntaxError(f"unknown directive {head!r}", lineno, col)

    if state != "done":
        raise NetlistSyntaxError("missing .begin/.end gate section", lineno_or_end(text))
    if vars_ is None:
        raise NetlistSyntaxError("missing .vars", 1)
    if nlines is not None and nlines != len(vars_):
        raise NetlistSyntaxError(f".lines {nlines} but {len(vars_)} vars", 1)
    index = {v: i for i, v in enumerate(vars_)}

    def resolve(ref: str, lineno: int) -> int:
        if ref not in index:
            raise NetlistSyntaxError(f"undeclared line {ref!r}", lineno)
        return index[ref]

    gates = []
    for tok, refs, lineno, col in gate_refs:
        kind = builtin(GATE_TOKENS[tok])
        if len(refs) != kind.arity:
            raise NetlistSyntaxError(f"{tok} takes {kind.arity} lines, got {len(refs)}",
                                     lineno, col)
        gates.append(GateInstance(kind, tuple(resolve(r, lineno) for r in refs)))
    feedbacks = []
    for src, sink, lineno in feedback_refs:
        if src not in index or sink not in index:
            raise CircuitValidationError([Violation(
                "dangling-feedback", f"line {lineno}", f"{src} -> {sink}")])
        feedbacks.append(FeedbackBinding(index[src], index[sink]))

    c = Circuit(
        name=name or "circuit",
        vars=tuple(vars_),
        inputs=inputs if inputs is not None else ("-",) * len(vars_),
        outputs=outputs if outputs is not None else ("o",) * len(vars_),
        gates=tuple(gates),
        feedbacks=tuple(feedbacks),
        init=init,
        test_line=resolve(test_ref[0], test_ref[1]) if test_ref else None,
    )
    return check(c)


def lineno_or_end(text: str) -> int:
    return max(1, len(text.splitlines()))


def _expect(cond: bool, message: str, line: int, col: int):
    if not cond:
        raise NetlistSyntaxError(message, line, col)


def serialize(c: Circuit) -> str:
    """Canonical text form; ``parse(serialize(c)) == c`` for valid circuits."""
    out = [f".name {c.name}", f".lines {c.width}", ".vars " + " ".join(c.vars)]
    # default masks (all primary inputs / all primary outputs) are left implicit
    if any(m != "-" for m in c.inputs):
        out.append(".constants " + "".join(c.inputs))
    if any(m != "o" for m in c.outputs):
        out.append(".outputs " + "".join(c.outputs))
    for fb in c.feedbacks:
        out.append(f".feedback {c.vars[fb.source]} -> {c.vars[fb.sink]}")
    if c.init is not None:
        out.append(".init " + "".join(str(b) for b in c.init))
    if c.test_line is not None:
        out.append(f".test {c.vars[c.test_line]}")
    out.append(".begin")
    for g in c.gates:
        out.append(" ".join([TOKEN_FOR_GATE[g.kind.name], *(c.vars[i] for i in g.lines)]))
    out.append(".end")
    return "\n".join(out) + "\n"


def read(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def write(c: Circuit, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize(c))
