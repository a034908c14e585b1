"""Adaptive noise cancellation with RLS, fast transversal RLS and gradient
adaptive lattice filters, plus the benchmark harness that compares them."""
from .filters import FTF, GAL, RLS, FilterConfig, StepResult, make_filter, process
from .harness import ExperimentSpec, RunRecord, SignalSpec, run_comparison, run_experiment, run_sweep
from .metrics import MetricsReport
from .noisegen import ChannelSpec, NoiseSpec
from .siggen import SignalBuffer

__version__ = "0.1.0"
