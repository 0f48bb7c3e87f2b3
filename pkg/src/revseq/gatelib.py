"""Built-in reversible gates and their structural checkers.

Every gate is stored twice: as the functional form it is defined by, and as
an explicit lookup table built (and checked) from that form at construction
time. Bit vectors are plain tuples of 0/1 ints, most significant line first.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

BitVec = tuple[int, ...]

MAX_ARITY = 8


class GateLookupError(KeyError):
    """Raised for an unknown gate name."""


class ArityError(ValueError):
    """Raised when a bit vector does not match a gate's arity."""


@dataclass(frozen=True, order=True)
class HwComplexity:
    """Counts of two-input XOR (alpha), two-input AND (beta) and NOT (delta)."""

    alpha: int = 0
    beta: int = 0
    delta: int = 0

    def __post_init__(self):
        if min(self.alpha, self.beta, self.delta) < 0:
            raise ValueError(f"negative hardware complexity: {self}")

    def __add__(self, other: HwComplexity) -> HwComplexity:
        return HwComplexity(
            self.alpha + other.alpha, self.beta + other.beta, self.delta + other.delta
        )

    def __mul__(self, k: int) -> HwComplexity:
        return HwComplexity(self.alpha * k, self.beta * k, self.delta * k)

    __rmul__ = __mul__

    def dominates(self, other: HwComplexity) -> bool:
        """True if no component exceeds ``other`` and at least one is smaller."""
        mine = (self.alpha, self.beta, self.delta)
        theirs = (other.alpha, other.beta, other.delta)
        return all(a <= b for a, b in zip(mine, theirs)) and mine != theirs

    def as_dict(self) -> dict[str, int]:
        return {"a": self.alpha, "b": self.beta, "d": self.delta}

    @classmethod
    def from_dict(cls, d: dict) -> HwComplexity:
        return cls(int(d.get("a", 0)), int(d.get("b", 0)), int(d.get("d", 0)))

    def __str__(self) -> str:
        return f"{self.alpha}a+{self.beta}b+{self.delta}d"


def bits_from_int(value: int, width: int) -> BitVec:
    """``bits_from_int(9, 4) == (1, 0, 0, 1)``."""
    if not 0 <= value < (1 << width):
        raise ValueError(f"{value} does not fit in {width} bits")
    return tuple((value >> (width - 1 - i)) & 1 for i in range(width))


def bits_to_int(bits: Sequence[int]) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | (b & 1)
    return value


def bits_from_str(text: str) -> BitVec:
    text = text.strip()
    if not text or set(text) - {"0", "1"}:
        raise ValueError(f"not a bit string: {text!r}")
    return tuple(int(ch) for ch in text)


def bits_to_str(bits: Iterable[int]) -> str:
    return "".join(str(b) for b in bits)


def parity(bits: Iterable[int]) -> int:
    p = 0
    for b in bits:
        p ^= b
    return p


@dataclass(frozen=True, eq=False)
class GateKind:
    """A named k-line reversible gate.

    ``function`` maps a k-tuple of bits to a k-tuple of bits. ``table`` is the
    cached permutation of ``range(2**k)``, filled in from ``function``.
    """

    name: str
    arity: int
    function: Callable[..., BitVec] = field(repr=False)
    quantum_cost: int = 0
    hw_complexity: HwComplexity = HwComplexity()
    table: tuple[int, ...] = field(init=False, repr=False)
    rows: tuple[BitVec, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 1 <= self.arity <= MAX_ARITY:
            raise ArityError(f"arity {self.arity} outside 1..{MAX_ARITY}")
        table = []
        for x in range(1 << self.arity):
            out = tuple(self.function(*bits_from_int(x, self.arity)))
            if len(out) != self.arity or set(out) - {0, 1}:
                raise ValueError(f"{self.name}: bad output {out!r} for input {x}")
            table.append(bits_to_int(out))
        object.__setattr__(self, "table", tuple(table))
        object.__setattr__(self, "rows", tuple(bits_from_int(y, self.arity) for y in table))

    def __call__(self, *bits: int) -> BitVec:
        return bits_from_int(self.table[bits_to_int(bits)], self.arity)

    def __eq__(self, other):
        if not isinstance(other, GateKind):
            return NotImplemented
        return (self.name, self.arity, self.table) == (other.name, other.arity, other.table)

    def __hash__(self):
        return hash((self.name, self.arity, self.table))

    def inverse_table(self) -> tuple[int, ...]:
        if not is_reversible(self):
            raise ValueError(f"{self.name} is not reversible")
        inv = [0] * len(self.table)
        for x, y in enumerate(self.table):
            inv[y] = x
        return tuple(inv)


def _not(a):
    return (1 - a,)


def _cnot(a, b):
    return (a, a ^ b)


def _toffoli(a, b, c):
    return (a, b, (a & b) ^ c)


def _fredkin(a, b, c):
    na = 1 - a
    return (a, (na & b) | (a & c), (a & b) | (na & c))


def _peres(a, b, c):
    return (a, a ^ b, (a & b) ^ c)


def _f2g(a, b, c):
    return (a, a ^ b, a ^ c)


def _pareek(a, b, c, d):
    q = ((1 - a) & b) ^ (a & d)
    return (a, q, q ^ c, b ^ d)


_A, _B, _D = HwComplexity(1, 0, 0), HwComplexity(0, 1, 0), HwComplexity(0, 0, 1)

# name -> (arity, function, quantum cost, hardware complexity)
_BUILTINS = {
    "NOT": (1, _not, 1, _D),
    "CNOT": (2, _cnot, 1, _A),
    "TOFFOLI": (3, _toffoli, 5, _A + _B),
    "FREDKIN": (3, _fredkin, 5, 2 * _A + 4 * _B + _D),
    "PERES": (3, _peres, 4, 2 * _A + _B),
    "F2G": (3, _f2g, 2, 2 * _A),
    "PAREEK": (4, _pareek, 7, 3 * _A + 2 * _B + _D),
}

BUILTIN_NAMES = tuple(_BUILTINS)

_cache: dict[str, GateKind] = {}


def builtin(name: str) -> GateKind:
    """Return the built-in gate called ``name`` (case-insensitive)."""
    key = name.upper()
    if key not in _BUILTINS:
        raise GateLookupError(f"unknown gate {name!r}; expected one of {BUILTIN_NAMES}")
    if key not in _cache:
        arity, fn, qc, hc = _BUILTINS[key]
        _cache[key] = GateKind(key, arity, fn, qc, hc)
    return _cache[key]


def eval_gate(g: GateKind, bits: Sequence[int]) -> BitVec:
    if len(bits) != g.arity:
        raise ArityError(f"{g.name} expects {g.arity} bits, got {len(bits)}")
    return g.rows[bits_to_int(bits)]


@functools.cache
def is_reversible(g: GateKind) -> bool:
    return len(set(g.table)) == len(g.table)


@functools.cache
def is_parity_preserving(g: GateKind) -> bool:
    return all(bin(x).count("1") % 2 == bin(y).count("1") % 2 for x, y in enumerate(g.table))


@functools.cache
def is_conservative(g: GateKind) -> bool:
    return all(bin(x).count("1") == bin(y).count("1") for x, y in enumerate(g.table))


def truth_table(g: GateKind) -> list[tuple[BitVec, BitVec]]:
    """All ``2**arity`` rows in ascending input order."""
    return [
        (bits_from_int(x, g.arity), bits_from_int(y, g.arity)) for x, y in enumerate(g.table)
    ]
