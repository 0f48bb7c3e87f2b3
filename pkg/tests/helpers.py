"""Shared generators and oracles for the test suite."""

import numpy as np

from revseq.gatelib import bits_from_int, builtin
from revseq.netlist import Circuit, FeedbackBinding, GateInstance


def random_circuit(rng, k):
    width = rng.randint(1, 9)
    vars_ = tuple(f"v{i}" for i in range(width))
    arities = [(n, builtin(n).arity) for n in ("NOT", "CNOT", "TOFFOLI", "FREDKIN",
                                               "PERES", "F2G", "PAREEK")]
    gates = []
    for _ in range(rng.randint(0, 8)):
        name, a = rng.choice([x for x in arities if x[1] <= width])
        gates.append(GateInstance(builtin(name), tuple(rng.sample(range(width), a))))
    inputs = [rng.choice("--01") for _ in range(width)]
    outputs = [rng.choice("oog") for _ in range(width)]
    feedbacks = []
    sinks = [i for i in range(width) if inputs[i] == "-"]
    rng.shuffle(sinks)
    for sink in sinks[:rng.randint(0, min(3, len(sinks)))]:
        src = rng.randrange(width)
        outputs[src] = "-"
        feedbacks.append(FeedbackBinding(src, sink))
    init = tuple(rng.randint(0, 1) for _ in feedbacks) if feedbacks and rng.random() < 0.5 else None
    test = rng.randrange(width) if rng.random() < 0.2 else None
    return Circuit(f"rand{k}", vars_, tuple(inputs), tuple(outputs), tuple(gates),
                   tuple(feedbacks), init, test)


_X = np.array([[0, 1], [1, 0]], dtype=complex)
_V = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
_TARGET = {"CNOT": _X, "CV": _V, "CVD": _V.conj().T}


def unitary(op, width):
    dim = 2 ** width
    if op.kind == "BOX":
        u = np.eye(dim, dtype=complex)
        for m in op.members:
            u = unitary(m, width) @ u
        return u
    u = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = bits_from_int(col, width)
        if op.kind == "NOT" or bits[op.control]:
            m = _X if op.kind == "NOT" else _TARGET[op.kind]
            b = bits[op.target]
            for nb in (0, 1):
                nbits = list(bits)
                nbits[op.target] = nb
                u[int("".join(map(str, nbits)), 2), col] += m[nb, b]
        else:
            u[col, col] = 1
    return u


def seq_unitary(ops, width):
    u = np.eye(2 ** width, dtype=complex)
    for op in ops:
        u = unitary(op, width) @ u
    return u


def permutation_matrix(table):
    """Unitary of a classical reversible map given as a permutation table."""
    n = len(table)
    u = np.zeros((n, n), dtype=complex)
    for x, y in enumerate(table):
        u[y, x] = 1
    return u
