"""``revseq`` command line.

Exit status: 0 on success, 1 when an analysis verdict fails (an incomplete
test set, say), 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from revseq import catalog as cat
from revseq import fault, metrics, qcost, sim
from revseq.gatelib import (bits_from_str, bits_to_str, is_conservative, is_parity_preserving,
                            is_reversible, parity)
from revseq.netlist import Circuit, NetlistError, read, serialize

OK, FAIL, USAGE = 0, 1, 2
EXHAUSTIVE_WIDTH = 20


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load(path: str) -> Circuit:
    try:
        return read(path)
    except OSError as e:
        raise UsageError(f"{path}: {e.strerror}") from e


def _circuit_props(c: Circuit) -> dict:
    """Whole-cascade verdicts, computed exhaustively over all line vectors."""
    if c.width > EXHAUSTIVE_WIDTH:
        raise UsageError(f"{c.name}: {c.width} lines is too wide for an exhaustive check")
    perm = sim.permutation(c)
    pairs = list(enumerate(perm))
    return {
        "reversible": len(set(perm)) == len(perm),
        "parity_preserving": all(bin(x).count("1") % 2 == bin(y).count("1") % 2
                                 for x, y in pairs),
        "conservative": all(bin(x).count("1") == bin(y).count("1") for x, y in pairs),
        "width": c.width,
    }


def cmd_check(args) -> tuple[int, str]:
    c = _load(args.file)
    flat = sim.break_feedback(c)
    gates = [{"index": k, "gate": g.kind.name,
              "reversible": is_reversible(g.kind),
              "parity_preserving": is_parity_preserving(g.kind),
              "conservative": is_conservative(g.kind)} for k, g in enumerate(c.gates)]
    whole = _circuit_props(flat)
    if args.json:
        return OK, _dump({"circuit": c.name, "gates": gates, "whole": whole,
                          "sequential": c.is_sequential})
    fmt = lambda d: " ".join(f"{k}={str(d[k]).lower()}"  # noqa: E731
                             for k in ("reversible", "parity_preserving", "conservative"))
    lines = [f"gate {g['index']} {g['gate']} {fmt(g)}" for g in gates]
    lines.append(f"circuit {c.name} {fmt(whole)}")
    return OK, "\n".join(lines) + "\n"


def cmd_truth(args) -> tuple[int, str]:
    c = _load(args.file)
    if c.is_sequential:
        raise UsageError(f"{c.name} is sequential; truth tables need a combinational circuit")
    rows = [(v, sim.eval_combinational(c, v)) for v in sim.free_vectors(c)]
    if args.json:
        return OK, _dump({"circuit": c.name, "vars": list(c.vars),
                          "rows": [{"in": bits_to_str(a), "out": bits_to_str(b)}
                                   for a, b in rows]})
    head = " ".join(c.vars)
    out = [f"# {head}"] + [f"{bits_to_str(a)} -> {bits_to_str(b)}" for a, b in rows]
    return OK, "\n".join(out) + "\n"


def _stimulus(path: str) -> sim.Stimulus:
    try:
        return sim.Stimulus.read_csv(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise UsageError(f"{path}: {e.strerror}") from e


def _init_bits(text: str | None):
    if text is None:
        return None
    try:
        return bits_from_str(text)
    except ValueError as e:
        raise UsageError(str(e)) from e


def _hooks(c: Circuit, site: str | None):
    if not site:
        return None
    return fault.fault_hooks(c, fault.FaultSpec.from_label(site))


def cmd_sim(args) -> tuple[int, str]:
    c = _load(args.file)
    tr = sim.run_sequential(c, _stimulus(args.stimulus), init=_init_bits(args.init),
                            cycles=args.cycles)
    if args.trace:
        Path(args.trace).write_text(tr.to_csv(), encoding="utf-8", newline="\n")
    outs = c.primary_outputs
    if args.json:
        return OK, _dump({"circuit": c.name, "cycles": [
            {"cycle": t, "inputs": bits_to_str(cy.inputs), "outputs": bits_to_str(cy.outputs),
             "state": bits_to_str(cy.state),
             "primary": {c.vars[i]: cy.outputs[i] for i in outs}}
            for t, cy in enumerate(tr.cycles)]})
    head = ["cycle", *(f"out.{c.vars[i]}" for i in outs), "state"]
    lines = [" ".join(head)]
    for t, cy in enumerate(tr.cycles):
        lines.append(" ".join([str(t), *(str(cy.outputs[i]) for i in outs),
                               bits_to_str(cy.state) or "-"]))
    return OK, "\n".join(lines) + "\n"


def cmd_metrics(args) -> tuple[int, str]:
    c = _load(args.file)
    report = metrics.compute_metrics(c)
    refs = metrics.load_references(args.refs)
    if args.design:
        if args.design not in refs:
            raise UsageError(f"no reference data for design {args.design!r}")
        sets = [refs[args.design]]
    else:
        sets = [r for r in refs.values() if r.catalog == c.name]
    comparisons, divs, rows = [], [], [(c.name, report.row())]
    for rs in sets:
        rows.append((f"published ({rs.design})", rs.published.row()))
        divs += [{"design": rs.design, **d} for d in metrics.divergences(report, rs.published)]
        for cmp_, ref in zip(metrics.compare(report, rs.rows), rs.rows):
            rows.append((ref.citation, ref.metrics.row()))
            rows.append((f"improvement w.r.t. {ref.citation}", cmp_.cells()))
            comparisons.append({"design": rs.design, **cmp_.as_dict()})
    if args.csv:
        Path(args.csv).write_text(metrics.table_csv(rows), encoding="utf-8", newline="\n")
    if args.json:
        return OK, _dump({"circuit": c.name, "metrics": report.as_dict(),
                          "comparisons": comparisons, "divergences": divs})
    text = metrics.render_table(rows)
    for d in divs:
        text += (f"divergence [{d['design']}] {d['field']}: computed {d['computed']}, "
                 f"published {d['published']}\n")
    return OK, text


def cmd_qcost(args) -> tuple[int, str]:
    c = _load(args.file)
    flat = sim.break_feedback(c)
    seq = qcost.decompose(flat)
    raw = qcost.raw_cost(seq)
    result = None
    if args.optimize:
        result = qcost.optimize(seq, args.budget)
    best = result.seq if result else seq
    if args.emit:
        Path(args.emit).write_text(best.to_text(), encoding="utf-8", newline="\n")
    if args.json:
        body = {"circuit": c.name, "raw": raw, "primitives": best.to_text().splitlines()}
        if result:
            body.update(optimized=result.cost, moves=result.moves,
                        budget_exhausted=result.exhausted)
        return OK, _dump(body)
    line = f"raw={raw}"
    if result:
        line += f" optimized={result.cost}"
        if result.exhausted:
            print("note: search budget exhausted; best cost found so far", file=sys.stderr)
    return OK, line + "\n"


def _read_vectors(path: str, c: Circuit) -> list[tuple[int, ...]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"{path}: {e.strerror}") from e
    vecs = []
    for n, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        try:
            v = bits_from_str(body)
        except ValueError as e:
            raise UsageError(f"{path}:{n}: {e}") from e
        if len(v) != c.width:
            raise UsageError(f"{path}:{n}: expected {c.width} bits")
        vecs.append(v)
    return vecs


def cmd_faults(args) -> tuple[int, str]:
    c = _load(args.file)
    model = fault.FaultModel.parse(args.model)
    if args.online:
        if not args.stimulus:
            raise UsageError("--online needs --stimulus")
        tr = sim.run_sequential(c, _stimulus(args.stimulus), hooks=_hooks(c, args.inject))
        verdicts = fault.online_check(c, tr)
        if args.json:
            return OK, _dump({"circuit": c.name, "inject": args.inject,
                              "verdicts": [v.value for v in verdicts]})
        return OK, "".join(f"{t} {v.value}\n" for t, v in enumerate(verdicts))

    flat = sim.break_feedback(c)
    if args.free:
        flat = fault.free_constants(flat, args.free.split(","))
    if args.inject:
        f = fault.FaultSpec.from_label(args.inject)
        rows = []
        for v in sim.free_vectors(flat):
            good, bad = sim.cascade(flat, v), fault.inject(flat, f, v)
            rows.append({"in": bits_to_str(v), "good": bits_to_str(good), "faulty": bits_to_str(bad),
                         "parity_flag": parity(v) != parity(bad)})
        if args.json:
            return OK, _dump({"circuit": c.name, "fault": f.as_dict(), "rows": rows})
        return OK, "".join(f"{r['in']} good={r['good']} faulty={r['faulty']}\n" for r in rows)

    vectors = _read_vectors(args.testset, flat) if args.testset else None
    camp = fault.campaign(flat, model, vectors, minimal=args.minimal)
    if args.csv:
        Path(args.csv).write_text(camp.to_csv(), encoding="utf-8", newline="\n")
    status = OK
    if args.testset and not camp.report.complete:
        status = FAIL
    if args.minimal and not camp.minimal.complete:
        status = FAIL
    if args.json:
        return status, camp.to_json()
    rep = camp.report
    lines = [f"circuit {c.name} model {model.value}",
             f"faults {len(rep.faults)} detected {len(rep.faults) - len(rep.undetected)} "
             f"coverage {rep.coverage:.4f}"]
    if camp.minimal:
        lines.append("minimal " + " ".join(bits_to_str(v) for v in camp.minimal.vectors))
        und = camp.minimal.undetectable
    else:
        und = rep.undetected
    if und:
        lines.append("undetected " + " ".join(f.label() for f in und))
    return status, "\n".join(lines) + "\n"


def cmd_catalog(args) -> tuple[int, str]:
    if args.action == "list":
        if args.json:
            return OK, _dump({"entries": cat.names()})
        return OK, "".join(f"{n}\n" for n in cat.names())
    if args.action == "emit":
        if not args.target:
            raise UsageError("catalog emit needs a directory")
        index = cat.emit_all(args.target)
        if args.json:
            return OK, _dump({"directory": args.target, "entries": sorted(index)})
        return OK, f"wrote {len(index)} circuits to {args.target}\n"
    if not args.target:
        raise UsageError("catalog show needs an entry name")
    try:
        e = cat.build(args.target)
    except cat.UnknownEntryError as err:
        raise UsageError(str(err.args[0])) from err
    body = {"name": e.name, "summary": e.summary, "metrics": e.metrics.as_dict(),
            "expected_metrics": e.expected_metrics.as_dict(), "divergent": list(e.divergent),
            "divergences": e.divergences(), "oracle": e.oracle,
            "parity_preserving": e.parity_preserving}
    if args.json:
        return OK, _dump(body)
    text = f"# {e.summary}\n# oracle: {e.oracle}\n" + serialize(e.circuit)
    for d in body["divergences"]:
        text += f"# divergence {d['field']}: computed {d['computed']}, published {d['published']}\n"
    return OK, text


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="revseq",
                                description="Reversible sequential circuit workbench.")
    sub = p.add_subparsers(dest="verb", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        return sp

    sp = add("check", cmd_check, "reversibility / parity / conservativeness verdicts")
    sp.add_argument("file")
    sp = add("truth", cmd_truth, "truth table of a combinational circuit")
    sp.add_argument("file")
    sp = add("sim", cmd_sim, "cycle-accurate simulation")
    sp.add_argument("file")
    sp.add_argument("--stimulus", required=True)
    sp.add_argument("--cycles", type=int)
    sp.add_argument("--init")
    sp.add_argument("--trace")
    sp = add("metrics", cmd_metrics, "the five design metrics and comparisons")
    sp.add_argument("file")
    sp.add_argument("--refs")
    sp.add_argument("--design", help="reference table key (default: match circuit name)")
    sp.add_argument("--csv")
    sp = add("qcost", cmd_qcost, "quantum cost before and after rewriting")
    sp.add_argument("file")
    sp.add_argument("--optimize", action="store_true")
    sp.add_argument("--budget", type=int, default=None)
    sp.add_argument("--emit", help="write the primitive sequence as text")
    sp = add("faults", cmd_faults, "fault campaigns and test sets")
    sp.add_argument("file")
    sp.add_argument("--model", choices=("stuck", "flip"), required=True)
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--testset")
    mode.add_argument("--minimal", action="store_true")
    mode.add_argument("--online", action="store_true")
    sp.add_argument("--stimulus")
    sp.add_argument("--inject", metavar="SITE", help="fault label such as g0.out1:flip")
    sp.add_argument("--free", help="comma-separated constant lines to drive as inputs")
    sp.add_argument("--csv")
    sp = add("catalog", cmd_catalog, "built-in designs")
    sp.add_argument("action", choices=("list", "emit", "show"))
    sp.add_argument("target", nargs="?")
    return p


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if getattr(args, "budget", None) is not None and args.budget <= 0:
        print("revseq: --budget must be positive", file=stderr)
        return USAGE
    try:
        status, text = args.fn(args)
    except (UsageError, NetlistError, sim.SimulationError, fault.FaultSiteError,
            fault.NoTestLineError, fault.ParityPreconditionError,
            fault.ExhaustiveLimitError, ValueError, KeyError) as e:
        msg = e.args[0] if e.args else str(e)
        print(f"revseq: {msg}", file=stderr)
        return USAGE
    stdout.write(text)
    return status


def main() -> None:
    sys.exit(run())
