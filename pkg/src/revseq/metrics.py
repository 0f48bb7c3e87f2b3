"""The five design metrics and percentage comparison against literature rows.

Metrics are pure sums over the gate attribute table: gate count, garbage
outputs, constant inputs, quantum cost and hardware complexity.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from importlib import resources
from pathlib import Path

from revseq.gatelib import HwComplexity
from revseq.netlist import Circuit

FIELDS = ("gc", "go", "ci", "qc")
HEADERS = ("Gate Count", "Garbage Output", "Constant Input", "Quantum Cost",
           "Hardware Complexity")


class UndefinedBaselineError(ValueError):
    """The existing design's value is zero, so no percentage exists."""


@dataclass(frozen=True)
class MetricsReport:
    gate_count: int = 0
    garbage_outputs: int = 0
    constant_inputs: int = 0
    quantum_cost: int = 0
    hw_complexity: HwComplexity = HwComplexity()

    def __add__(self, other: MetricsReport) -> MetricsReport:
        return MetricsReport(
            self.gate_count + other.gate_count,
            self.garbage_outputs + other.garbage_outputs,
            self.constant_inputs + other.constant_inputs,
            self.quantum_cost + other.quantum_cost,
            self.hw_complexity + other.hw_complexity,
        )

    def value(self, key: str) -> int | HwComplexity:
        return {"gc": self.gate_count, "go": self.garbage_outputs,
                "ci": self.constant_inputs, "qc": self.quantum_cost,
                "hc": self.hw_complexity}[key]

    def as_dict(self) -> dict:
        return {"gc": self.gate_count, "go": self.garbage_outputs,
                "ci": self.constant_inputs, "qc": self.quantum_cost,
                "hc": self.hw_complexity.as_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> MetricsReport:
        return cls(int(d["gc"]), int(d["go"]), int(d["ci"]), int(d["qc"]),
                   HwComplexity.from_dict(d.get("hc", {})))

    def row(self) -> tuple[str, ...]:
        return (*(str(self.value(k)) for k in FIELDS), str(self.hw_complexity))


def compute_metrics(c: Circuit) -> MetricsReport:
    hc = HwComplexity()
    for g in c.gates:
        hc = hc + g.kind.hw_complexity
    return MetricsReport(
        gate_count=len(c.gates),
        garbage_outputs=len(c.garbage_lines),
        constant_inputs=len(c.constant_lines),
        quantum_cost=sum(g.kind.quantum_cost for g in c.gates),
        hw_complexity=hc,
    )


def improvement_exact(proposed: int, existing: int) -> Decimal:
    if existing == 0:
        raise UndefinedBaselineError("existing design value is 0")
    return Decimal(100) - Decimal(proposed) * 100 / Decimal(existing)


def improvement(proposed: int, existing: int, places: int = 1) -> Decimal:
    """``100 - proposed/existing*100``, rounded half-up to ``places`` decimals.

    >>> improvement(1, 5), improvement(7, 8)
    (Decimal('80.0'), Decimal('12.5'))
    """
    q = Decimal(1).scaleb(-places)
    return improvement_exact(proposed, existing).quantize(q, rounding=ROUND_HALF_UP)


def format_percent(value: Decimal) -> str:
    """Drop a zero fraction the way the printed tables do: ``80.0 -> '80%'``."""
    text = f"{value.normalize():f}" if value == value.to_integral() else f"{value}"
    return text + "%"


def printed_places(cell: str) -> int:
    """Decimal places of a printed cell such as ``'83.3%'`` or ``'12.5'``."""
    num = cell.strip().rstrip("%")
    return len(num.split(".")[1]) if "." in num else 0


def hc_verdict(proposed: HwComplexity, existing: HwComplexity) -> str:
    if proposed == existing:
        return "Equal"
    return "Improved" if proposed.dominates(existing) else "Not improved"


@dataclass(frozen=True)
class ReferenceRow:
    citation: str
    metrics: MetricsReport
    printed: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class ReferenceSet:
    """One comparison table: the published row for our design plus literature rows."""

    design: str
    catalog: str
    published: MetricsReport
    rows: tuple[ReferenceRow, ...]


def _parse_refs(data: dict) -> dict[str, ReferenceSet]:
    out = {}
    for design, body in data["designs"].items():
        rows = tuple(
            ReferenceRow(r["citation"], MetricsReport.from_dict(r), dict(r.get("printed", {})))
            for r in body.get("references", [])
        )
        out[design] = ReferenceSet(design, body["catalog"],
                                   MetricsReport.from_dict(body["published"]), rows)
    return out


def load_references(path: str | Path | None = None) -> dict[str, ReferenceSet]:
    """Load the bundled literature data, or a file with the same layout."""
    if path is None:
        text = resources.files("revseq.data").joinpath("references.json").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return _parse_refs(json.loads(text))


def references_for(catalog_name: str, refs: dict[str, ReferenceSet] | None = None
                   ) -> list[ReferenceSet]:
    refs = load_references() if refs is None else refs
    return [r for r in refs.values() if r.catalog == catalog_name]


@dataclass(frozen=True)
class Comparison:
    citation: str
    percent: dict  # metric key -> rounded Decimal
    exact: dict    # metric key -> unrounded Decimal
    hc: str

    def cells(self) -> tuple[str, ...]:
        return (*(format_percent(self.percent[k]) for k in FIELDS), self.hc)

    def as_dict(self) -> dict:
        return {"citation": self.citation,
                "improvement": {k: float(v) for k, v in self.percent.items()},
                "raw": {k: float(v) for k, v in self.exact.items()},
                "hc": self.hc}


def compare(report: MetricsReport, refs: list[ReferenceRow] | tuple[ReferenceRow, ...],
            places: int | None = None) -> list[Comparison]:
    """One improvement row per reference.

    Each percentage is rounded to the precision printed for that cell when the
    reference row carries printed cells, otherwise to ``places`` (default 1).
    """
    out = []
    for ref in refs:
        pct, raw = {}, {}
        for k in FIELDS:
            existing = ref.metrics.value(k)
            raw[k] = improvement_exact(report.value(k), existing)
            if places is not None:
                p = places
            elif k in ref.printed:
                p = printed_places(ref.printed[k])
            else:
                p = 1
            pct[k] = improvement(report.value(k), existing, p)
        out.append(Comparison(ref.citation, pct, raw,
                              hc_verdict(report.hw_complexity, ref.metrics.hw_complexity)))
    return out


def divergences(computed: MetricsReport, published: MetricsReport) -> list[dict]:
    """Fields where the computed metrics differ from a published row."""
    out = []
    for k in (*FIELDS, "hc"):
        a, b = computed.value(k), published.value(k)
        if a != b:
            out.append({"field": k, "computed": str(a), "published": str(b)})
    return out


def render_table(rows: list[tuple[str, tuple[str, ...]]]) -> str:
    """Plain-text table in the layout of the comparison tables."""
    header = ("", *HEADERS)
    body = [(label, *cells) for label, cells in rows]
    widths = [max(len(r[i]) for r in [header, *body]) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip()
             for r in [header, *body]]
    return "\n".join(lines) + "\n"


def table_csv(rows: list[tuple[str, tuple[str, ...]]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["design", *HEADERS])
    for label, cells in rows:
        w.writerow([label, *cells])
    return buf.getvalue()
