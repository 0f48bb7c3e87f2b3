"""Quantum-cost accounting over NOT / CNOT / controlled-V primitives.

Each library gate expands to a fixed primitive template. Costs then drop by
local rewriting only:

* commutation moves, legal when every crossed primitive commutes with the
  moved one: disjoint lines; a shared control and nothing else; or two
  controlled-V / controlled-V+ on the same (control, target);
* merging an adjacent CNOT with a controlled-V(+) on the same two lines into
  one 2x2 box of unit cost; a box then absorbs any further adjacent CNOT or
  controlled-V(+) on its line pair, since the product is still one 2x2 unit;
* cancelling an adjacent CV / CV+ pair on the same (control, target).

V is never simulated here; only the boolean fragment (NOT, CNOT) has an
evaluator, used to check moves on pure boolean sequences.
"""

from __future__ import annotations

import heapq
import os
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from revseq.gatelib import BitVec
from revseq.netlist import Circuit

KINDS = ("NOT", "CNOT", "CV", "CVD", "BOX")
_V_FAMILY = ("CV", "CVD")

DEFAULT_BUDGET = 100_000


class NeedsBreakFeedbackError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Primitive:
    kind: str
    target: int
    control: int | None = None
    members: tuple[Primitive, ...] = field(default=(), compare=True)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown primitive {self.kind!r}")
        if self.kind == "NOT":
            if self.control is not None:
                raise ValueError("NOT takes no control")
        elif self.control is None or self.control == self.target:
            raise ValueError(f"{self.kind} needs a control distinct from its target")

    @property
    def lines(self) -> frozenset[int]:
        if self.control is None:
            return frozenset((self.target,))
        return frozenset((self.control, self.target))

    def shift(self, mapping: Sequence[int]) -> Primitive:
        """Relabel lines through ``mapping`` (template port -> circuit line)."""
        return Primitive(
            self.kind,
            mapping[self.target],
            None if self.control is None else mapping[self.control],
            tuple(m.shift(mapping) for m in self.members),
        )

    def __str__(self):
        if self.kind == "NOT":
            return f"NOT({self.target})"
        if self.kind == "BOX":
            return f"BOX({self.control},{self.target})[{' '.join(map(str, self.members))}]"
        return f"{self.kind}({self.control},{self.target})"


def NOT(t):
    return Primitive("NOT", t)


def CNOT(c, t):
    return Primitive("CNOT", t, c)


def CV(c, t):
    return Primitive("CV", t, c)


def CVD(c, t):
    return Primitive("CVD", t, c)


def BOX(*members: Primitive) -> Primitive:
    lines = frozenset().union(*(m.lines for m in members))
    if len(lines) != 2:
        raise ValueError("a box must act on exactly two lines")
    flat = tuple(x for m in members for x in (m.members or (m,)))
    return Primitive("BOX", flat[0].target, flat[0].control, flat)


@dataclass(frozen=True)
class PrimitiveSeq:
    width: int
    ops: tuple[Primitive, ...]

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        for op in self.ops:
            if any(not 0 <= i < self.width for i in op.lines):
                raise ValueError(f"{op} outside width {self.width}")

    def __len__(self):
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def to_text(self) -> str:
        rows = []
        for op in self.ops:
            ctrl = "-" if op.control is None else str(op.control)
            row = f"{op.kind} {ctrl} {op.target}"
            if op.members:
                row += "  # " + " ".join(map(str, op.members))
            rows.append(row)
        return "\n".join(rows) + ("\n" if rows else "")


# Templates over gate ports 0..k-1, in time order.
TOFFOLI_TEMPLATE = (CV(1, 2), CNOT(0, 1), CVD(1, 2), CNOT(0, 1), CV(0, 2))
PERES_TEMPLATE = (CV(1, 2), CV(0, 2), CNOT(0, 1), CVD(1, 2))
# Fredkin = CNOT(c,b) . Toffoli(a,b,c) . CNOT(c,b), with the controlled-V on
# a moved forward and the two trailing CNOTs (same target) exchanged.
FREDKIN_EXPANDED = (CNOT(2, 1), CV(1, 2), CV(0, 2), CNOT(0, 1), CVD(1, 2), CNOT(2, 1),
                    CNOT(0, 1))
FREDKIN_TEMPLATE = (BOX(CNOT(2, 1), CV(1, 2)), CV(0, 2), CNOT(0, 1),
                    BOX(CVD(1, 2), CNOT(2, 1)), CNOT(0, 1))
F2G_TEMPLATE = (CNOT(0, 1), CNOT(0, 2))
# Pareek(A,B,C,D) as one Toffoli and four CNOTs. D becomes B^D (= S) and B
# becomes D; the Toffoli(A, D; B) and a second CNOT(D, B) leave A'B^AD on B,
# which is then copied onto C.
PAREEK_GATES = ((CNOT, 1, 3), (CNOT, 3, 1), ("TOFFOLI", 0, 3, 1), (CNOT, 3, 1), (CNOT, 1, 2))


def _pareek_template() -> tuple[Primitive, ...]:
    ops: list[Primitive] = []
    for g in PAREEK_GATES:
        if g[0] == "TOFFOLI":
            ops.extend(p.shift({0: g[1], 1: g[2], 2: g[3]}) for p in TOFFOLI_TEMPLATE)
        else:
            ops.append(g[0](g[1], g[2]))
    return tuple(ops)


PAREEK_TEMPLATE = _pareek_template()

TEMPLATES = {
    "NOT": (NOT(0),),
    "CNOT": (CNOT(0, 1),),
    "TOFFOLI": TOFFOLI_TEMPLATE,
    "PERES": PERES_TEMPLATE,
    "FREDKIN": FREDKIN_TEMPLATE,
    "F2G": F2G_TEMPLATE,
    "PAREEK": PAREEK_TEMPLATE,
}


def decompose(c: Circuit) -> PrimitiveSeq:
    if c.feedbacks:
        raise NeedsBreakFeedbackError(f"{c.name} is sequential; apply break_feedback first")
    ops: list[Primitive] = []
    for g in c.gates:
        ops.extend(p.shift(g.lines) for p in TEMPLATES[g.kind.name])
    return PrimitiveSeq(c.width, tuple(ops))


def raw_cost(seq: PrimitiveSeq | Iterable[Primitive]) -> int:
    return len(tuple(seq))


def commutes(p: Primitive, q: Primitive) -> bool:
    shared = p.lines & q.lines
    if not shared:
        return True
    if p.kind in ("NOT", "BOX") or q.kind in ("NOT", "BOX"):
        return False
    if p.control == q.control and p.target != q.target:
        return True
    if (p.kind in _V_FAMILY and q.kind in _V_FAMILY
            and (p.control, p.target) == (q.control, q.target)):
        return True
    return False


def move(seq: PrimitiveSeq, i: int, j: int) -> tuple[bool, PrimitiveSeq]:
    """Relocate op ``i`` to position ``j``; returns ``(legal, result)``.

    An illegal move returns the sequence unchanged.
    """
    n = len(seq.ops)
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"positions {i}, {j} outside 0..{n - 1}")
    op = seq.ops[i]
    lo, hi = (i + 1, j + 1) if j > i else (j, i)
    if not all(commutes(op, q) for q in seq.ops[lo:hi]):
        return False, seq
    ops = list(seq.ops)
    del ops[i]
    ops.insert(j, op)
    return True, PrimitiveSeq(seq.width, tuple(ops))


def _mergeable(p: Primitive, q: Primitive) -> bool:
    if p.kind == "NOT" or q.kind == "NOT" or p.lines != q.lines:
        return False
    if "BOX" in (p.kind, q.kind):
        return True
    kinds = {p.kind, q.kind}
    return "CNOT" in kinds and len(kinds & set(_V_FAMILY)) == 1


def _cancels(p: Primitive, q: Primitive) -> bool:
    return ({p.kind, q.kind} == {"CV", "CVD"}
            and (p.control, p.target) == (q.control, q.target))


def merge_boxes(seq: PrimitiveSeq) -> PrimitiveSeq:
    """Collapse adjacent CNOT + CV(+) pairs on one line pair into boxes.

    Greedy left to right until nothing changes. Either orientation of the
    pair qualifies, and an existing box swallows its neighbours on the same
    two lines.
    """
    ops = list(seq.ops)
    changed = True
    while changed:
        changed = False
        for k in range(len(ops) - 1):
            if _mergeable(ops[k], ops[k + 1]):
                ops[k:k + 2] = [BOX(ops[k], ops[k + 1])]
                changed = True
                break
    return PrimitiveSeq(seq.width, tuple(ops))


def cancel_pairs(seq: PrimitiveSeq) -> PrimitiveSeq:
    ops = list(seq.ops)
    changed = True
    while changed:
        changed = False
        for k in range(len(ops) - 1):
            if _cancels(ops[k], ops[k + 1]):
                del ops[k:k + 2]
                changed = True
                break
    return PrimitiveSeq(seq.width, tuple(ops))


def reduce(seq: PrimitiveSeq) -> PrimitiveSeq:
    """Cancellation then merging, repeated to a fixpoint."""
    while True:
        nxt = merge_boxes(cancel_pairs(seq))
        if nxt == seq:
            return seq
        seq = nxt


class Optimized(NamedTuple):
    seq: PrimitiveSeq
    cost: int
    moves: int
    exhausted: bool  # budget ran out before the search space was closed


def default_budget() -> int:
    env = os.environ.get("REVSEQ_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def optimize(seq: PrimitiveSeq, budget: int | None = None) -> Optimized:
    """Best-first search over legal adjacent moves, scoring each reachable
    ordering by the cost of its reduced form.

    Ties go to fewer moves, then to the lexicographically smallest (leftmost)
    ordering, so the result does not depend on anything but the input.
    """
    if budget is None:
        budget = default_budget()
    if budget <= 0:
        raise ValueError("budget must be positive")
    start = seq.ops
    best_red = reduce(seq)
    best = (raw_cost(best_red), 0, best_red.ops)
    seen = {start}
    heap = [(best[0], 0, start)]
    expanded = 0
    while heap and expanded < budget:
        score, depth, ops = heapq.heappop(heap)
        expanded += 1
        for k in range(len(ops) - 1):
            if not commutes(ops[k], ops[k + 1]):
                continue
            nxt = ops[:k] + (ops[k + 1], ops[k]) + ops[k + 2:]
            if nxt in seen:
                continue
            seen.add(nxt)
            red = reduce(PrimitiveSeq(seq.width, nxt))
            cand = (raw_cost(red), depth + 1, red.ops)
            if cand < best:
                best = cand
            heapq.heappush(heap, (cand[0], depth + 1, nxt))
    return Optimized(PrimitiveSeq(seq.width, best[2]), best[0], best[1], bool(heap))


def simulate_boolean(seq: PrimitiveSeq, bits: Sequence[int]) -> BitVec:
    """Evaluate a NOT/CNOT-only sequence on a bit vector."""
    state = list(bits)
    for op in seq.ops:
        if op.kind == "NOT":
            state[op.target] ^= 1
        elif op.kind == "CNOT":
            state[op.target] ^= state[op.control]
        else:
            raise ValueError(f"{op.kind} has no boolean semantics")
    return tuple(state)
