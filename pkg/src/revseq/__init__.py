"""Reversible sequential logic: gates, netlists, simulation, costs and faults."""

from revseq.gatelib import HwComplexity, builtin, eval_gate, truth_table
from revseq.metrics import MetricsReport, compute_metrics, improvement
from revseq.netlist import Circuit, parse, serialize, validate
from revseq.sim import Stimulus, break_feedback, eval_combinational, run_sequential

__all__ = [
    "Circuit", "HwComplexity", "MetricsReport", "Stimulus",
    "break_feedback", "builtin", "compute_metrics", "eval_combinational", "eval_gate",
    "improvement", "parse", "run_sequential", "serialize", "truth_table", "validate",
]

__version__ = "0.1.0"
