"""Dual-input noise canceller experiments.

The topology: one reference noise stream ``v1`` is drawn, passed through an
unknown FIR channel to give the primary interference ``v0``, and both are
scaled by the same factor so that the clean signal ``s`` sits at the
requested SNR against the scaled ``v0``::

    d(n) = s(n) + c * v0(n)        primary input (desired response)
    x(n) = c * v1(n)               reference input
    e(n) = d(n) - y(n)             canceller output, the recovered signal
"""
from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import metrics
from .filters import FilterConfig, make_filter, process
from .noisegen import ChannelSpec, NoiseSpec, channel_filter, gen_noise, mix_at_snr
from .siggen import DEFAULT_FS, SignalBuffer, gen_chirp, gen_sawtooth, gen_sinusoid, load_wav

SIGNAL_KINDS = ("sinusoid", "sawtooth", "chirp", "audio")
SWEEP_PARAMS = ("order", "lambda", "mu", "snr")
DEFAULT_SAMPLES = 20000
DEFAULT_SNR_DB = 10.0
DEFAULT_CHANNEL = "random:4"

# input SNR of each replicated table; the correlation table uses the default
TABLES = {1: DEFAULT_SNR_DB, 3: 30.0, 4: 10.0, 5: -10.0}
TABLE_SIGNALS = ("chirp", "sinusoid", "sawtooth", "audio")
TABLE_METRIC = {1: "corr_coeff", 3: "output_snr_db", 4: "output_snr_db", 5: "output_snr_db"}


@dataclass(frozen=True)
class SignalSpec:
    """Clean test signal. Unset frequencies take per-kind defaults."""

    kind: str = "sinusoid"
    freq_hz: float | None = None
    f0_hz: float = 100.0
    f1_hz: float = 1000.0
    amplitude: float = 1.0
    sample_rate_hz: float = DEFAULT_FS
    path: str | None = None

    def __post_init__(self):
        if self.kind not in SIGNAL_KINDS:
            raise ValueError(f"unknown signal {self.kind!r}; expected one of {SIGNAL_KINDS}")
        if self.kind == "audio" and not self.path:
            raise ValueError("audio signal needs a WAV path")
        if self.kind != "audio" and self.path:
            raise ValueError("a WAV path is only valid with the audio signal")
        if self.freq_hz is None and self.kind in ("sinusoid", "sawtooth"):
            object.__setattr__(self, "freq_hz", 440.0 if self.kind == "sinusoid" else 100.0)


@dataclass(frozen=True)
class ExperimentSpec:
    signal: SignalSpec = field(default_factory=SignalSpec)
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    channel: ChannelSpec | str = DEFAULT_CHANNEL
    input_snr_db: float = DEFAULT_SNR_DB
    filter_cfg: FilterConfig = field(default_factory=FilterConfig)
    n_samples: int = DEFAULT_SAMPLES
    seed: int = 0
    mse_window: int = 100

    @property
    def algorithm(self) -> str:
        return self.filter_cfg.algorithm

    def validate(self):
        if int(self.n_samples) != self.n_samples or self.n_samples < 1:
            raise ValueError("n_samples must be a positive integer")
        if self.mse_window < 1:
            raise ValueError("mse_window must be positive")
        if self.n_samples < 10 * self.mse_window:
            raise ValueError(
                f"n_samples ({self.n_samples}) must be at least 10x mse_window ({self.mse_window})")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if isinstance(self.input_snr_db, float) and math.isnan(self.input_snr_db):
            raise ValueError("input_snr_db is NaN")
        length = _channel_length(self.channel)
        # an order-M lattice has M+1 ladder taps
        taps = self.filter_cfg.order + (1 if self.algorithm == "gal" else 0)
        if length > taps:
            raise ValueError(f"channel length {length} exceeds filter length {taps}")

    def to_dict(self) -> dict:
        chan = self.channel
        return {
            "signal": asdict(self.signal),
            "noise": asdict(self.noise),
            "channel": list(chan.taps) if isinstance(chan, ChannelSpec) else chan,
            "input_snr_db": self.input_snr_db,
            "algorithm": self.algorithm,
            "filter": self.filter_cfg.to_dict(),
            "n_samples": self.n_samples,
            "seed": self.seed,
            "mse_window": self.mse_window,
        }


@dataclass(eq=False)
class RunRecord:
    spec: ExperimentSpec
    report: metrics.MetricsReport
    traces: dict | None = None
    rescues: int = 0

    def summary_entry(self, include_timing=False) -> dict:
        scalars = self.report.scalars()
        if not include_timing:
            scalars.pop("convergence_seconds")
        entry = {"spec": self.spec.to_dict(), "metrics": scalars}
        if self.spec.algorithm == "ftf":
            entry["ftf_rescues"] = self.rescues
        return entry


def _channel_length(chan) -> int:
    if isinstance(chan, ChannelSpec):
        return len(chan)
    kind, _, length = str(chan).partition(":")
    if kind != "random" or not length.isdigit() or int(length) < 1:
        raise ValueError(f"channel must be a ChannelSpec or 'random:L', got {chan!r}")
    return int(length)


def _derived_seeds(seed: int):
    noise_ss, chan_ss = np.random.SeedSequence(seed).spawn(2)
    return (int(noise_ss.generate_state(1, np.uint64)[0]),
            int(chan_ss.generate_state(1, np.uint64)[0]))


def make_signal(sig: SignalSpec, n_samples: int) -> SignalBuffer:
    if sig.kind == "sinusoid":
        return gen_sinusoid(sig.freq_hz, sig.amplitude, n_samples, sig.sample_rate_hz)
    if sig.kind == "sawtooth":
        return gen_sawtooth(sig.freq_hz, sig.amplitude, n_samples, sig.sample_rate_hz)
    if sig.kind == "chirp":
        return gen_chirp(sig.f0_hz, sig.f1_hz, sig.amplitude, n_samples, sig.sample_rate_hz)
    audio = load_wav(sig.path)
    return audio.with_samples(sig.amplitude * audio.samples[:n_samples])


def resolve(spec: ExperimentSpec) -> ExperimentSpec:
    """Fix every random choice: the noise seed and the channel taps.

    Both derive from ``spec.seed`` only, so runs that differ in algorithm or
    filter settings see identical inputs. An audio signal also fixes
    ``n_samples`` and the sample rate to what the file provides.
    """
    spec.validate()
    noise_seed, chan_seed = _derived_seeds(spec.seed)
    chan = spec.channel
    if not isinstance(chan, ChannelSpec):
        chan = ChannelSpec.random(_channel_length(chan), chan_seed)
    sig = spec.signal
    n = spec.n_samples
    if sig.kind == "audio":
        audio = load_wav(sig.path)
        n = min(n, len(audio))
        sig = replace(sig, sample_rate_hz=audio.sample_rate_hz)
    out = replace(spec, noise=replace(spec.noise, seed=noise_seed), channel=chan,
                  signal=sig, n_samples=n)
    out.validate()
    return out


def build_inputs(spec: ExperimentSpec):
    """Clean signal, primary input, reference input and the noise scale."""
    s = make_signal(spec.signal, spec.n_samples)
    v1 = gen_noise(spec.noise, spec.n_samples, s.sample_rate_hz)
    v0 = channel_filter(v1, spec.channel)
    _, scale = mix_at_snr(s, v0, spec.input_snr_db)
    d = s.with_samples(s.samples + scale * v0.samples)
    x = s.with_samples(scale * v1.samples)
    return s, d, x, scale


def run_experiment(spec: ExperimentSpec, keep_traces=True) -> RunRecord:
    spec = resolve(spec)
    s, d, x, _ = build_inputs(spec)
    filt = make_filter(spec.filter_cfg)
    t0 = time.perf_counter()
    y, e = process(filt, x, d)
    elapsed = time.perf_counter() - t0

    curve = metrics.mse_curve(e, spec.mse_window)
    conv = metrics.convergence_time(curve)
    # wall clock of the filtering loop, prorated to the convergence sample
    conv_s = None if conv is None else elapsed * (conv + 1) / spec.n_samples
    report = metrics.MetricsReport(
        mse_curve=curve,
        convergence_samples=conv,
        convergence_seconds=conv_s,
        corr_coeff=metrics.correlation_coefficient(s, e),
        output_snr_db=metrics.output_snr(s, e),
        input_snr_db=spec.input_snr_db,
    )
    traces = None
    if keep_traces:
        traces = {"d": d.samples, "x": x.samples, "y": y.samples, "e": e.samples}
    return RunRecord(spec, report, traces, getattr(filt, "rescue_count", 0))


def run_many(specs, jobs=1, keep_traces=True):
    """Run independent experiments, optionally in worker processes.

    Results come back in the order of ``specs``.
    """
    specs = list(specs)
    if jobs <= 1 or len(specs) <= 1:
        return [run_experiment(s, keep_traces) for s in specs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_experiment, specs, [keep_traces] * len(specs)))


def comparison_specs(base: ExperimentSpec):
    return [replace(base, filter_cfg=base.filter_cfg.with_(algorithm=a))
            for a in ("rls", "ftf", "gal")]


def run_comparison(base: ExperimentSpec, jobs=1, keep_traces=True):
    """Same signal, noise and seed through RLS, FTF and GAL, in that order."""
    return run_many(comparison_specs(base), jobs, keep_traces)


def sweep_specs(base: ExperimentSpec, param: str, values):
    if param not in SWEEP_PARAMS:
        raise ValueError(f"unknown sweep parameter {param!r}; expected one of {SWEEP_PARAMS}")
    specs = []
    for v in values:
        if param == "order":
            specs.append(replace(base, filter_cfg=base.filter_cfg.with_(order=int(v))))
        elif param == "lambda":
            specs.append(replace(base, filter_cfg=base.filter_cfg.with_(forgetting_factor=float(v))))
        elif param == "mu":
            specs.append(replace(base, filter_cfg=base.filter_cfg.with_(step_size=float(v))))
        else:
            specs.append(replace(base, input_snr_db=float(v)))
    for s in specs:
        s.validate()
    return specs


def run_sweep(base: ExperimentSpec, param: str, values, jobs=1, keep_traces=True):
    """One run per value of ``param``; everything else, the seed included, fixed."""
    return run_many(sweep_specs(base, param, values), jobs, keep_traces)


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

CSV_HEADER = ("n", "d", "x", "y", "e", "mse_windowed")


def write_csv(record: RunRecord, path) -> None:
    """Per-sample trace; ``mse_windowed`` is blank until the window fills."""
    if record.traces is None:
        raise ValueError("record has no traces")
    tr = record.traces
    mse = {i: v for i, v in record.report.mse_curve}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for i, row in enumerate(zip(tr["d"].tolist(), tr["x"].tolist(),
                                    tr["y"].tolist(), tr["e"].tolist())):
            m = mse.get(i)
            w.writerow([i, *map(repr, row), "" if m is None else repr(m)])


def read_csv(path) -> dict:
    cols = {k: [] for k in CSV_HEADER}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        for row in reader:
            for k, v in zip(CSV_HEADER, row):
                cols[k].append(v)
    out = {"n": np.array([int(v) for v in cols["n"]])}
    for k in ("d", "x", "y", "e"):
        out[k] = np.array([float(v) for v in cols[k]])
    out["mse_windowed"] = np.array([float(v) if v else np.nan for v in cols["mse_windowed"]])
    return out


def _dump(doc, path):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_summary(records, path, include_timing=False) -> None:
    """JSON document with one entry per record: spec echo plus metrics.

    Wall-clock convergence seconds vary between machines and runs, so they
    are left out unless ``include_timing`` is set.
    """
    _dump({"records": [r.summary_entry(include_timing) for r in records]}, path)


def read_summary(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def trace_name(record: RunRecord) -> str:
    s = record.spec
    return (f"{s.signal.kind}_{s.noise.kind}_{s.algorithm}"
            f"_snr{s.input_snr_db:g}_seed{s.seed}.csv")


# ---------------------------------------------------------------------------
# replicated table grid
# ---------------------------------------------------------------------------

def table_specs(base: ExperimentSpec, table: int, audio_path=None):
    """Specs for one replicated table; ``None`` in place of a skipped row."""
    rows = {}
    for kind in TABLE_SIGNALS:
        if kind == "audio" and not audio_path:
            rows[kind] = None
            continue
        sig = SignalSpec(kind=kind, path=audio_path if kind == "audio" else None)
        spec = replace(base, signal=sig, noise=replace(base.noise, kind="white"),
                       input_snr_db=TABLES[table])
        rows[kind] = comparison_specs(spec)
    return rows


def run_tables(base: ExperimentSpec, audio_path=None, jobs=1, keep_traces=False):
    """Run the grids behind tables 1, 3, 4 and 5.

    Returns ``{table: {signal: [rls, ftf, gal] records or None}}``. Identical
    specs (table 1 and table 4 share an SNR) are run once.
    """
    layout = {t: table_specs(base, t, audio_path) for t in TABLES}
    unique = []
    for rows in layout.values():
        for specs in rows.values():
            for s in specs or ():
                if s not in unique:
                    unique.append(s)
    results = dict(zip(unique, run_many(unique, jobs, keep_traces)))
    return {t: {sig: None if specs is None else [results[s] for s in specs]
                for sig, specs in rows.items()}
            for t, rows in layout.items()}


def write_table_summary(table: int, rows: dict, path, include_timing=False) -> None:
    metric = TABLE_METRIC[table]
    doc = {"table": table, "metric": metric, "input_snr_db": TABLES[table],
           "rows": [], "records": []}
    for sig, recs in rows.items():
        if recs is None:
            doc["rows"].append({"signal": sig, "status": "skipped",
                                "reason": "no audio file given"})
            continue
        row = {"signal": sig, "status": "ok"}
        for r in recs:
            row[r.spec.algorithm] = getattr(r.report, metric)
        doc["rows"].append(row)
        doc["records"].extend(r.summary_entry(include_timing) for r in recs)
    _dump(doc, path)


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
