"""Median-of-repetitions timing of naive vs optimized kernel variants."""

from __future__ import annotations

import csv
import io
import statistics
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Mapping

import numpy as np

from .dsp.beamform import Beamformer, beamform_oracle
from .dsp.filter import FilterConfig, circular_convolve_oracle, filter_apply
from .errors import EquivalenceFailure

DISCLAIMER = ("Timings are machine-dependent: they describe this host only and "
              "cannot be compared with figures measured on other hardware.")
MIN_TIME_NS = 1
TOLERANCE = 1e-4


@dataclass
class BenchRow:
    kernel: str
    dims: str
    baseline_label: str
    baseline_us: float
    variant_label: str
    variant_us: float

    @property
    def speedup(self) -> float:
        return self.baseline_us / self.variant_us


@dataclass
class BenchReport:
    rows: list[BenchRow]
    repetitions: int
    warmup: int
    timestamp: str
    samples: dict[str, list[int]] = field(default_factory=dict)  # label -> ns per rep


def max_scaled_error(got: np.ndarray, ref: np.ndarray, scale: np.ndarray | float) -> float:
    """Largest ``|got - ref| / scale``, elementwise; a zero scale demands exactness."""
    err = np.abs(np.asarray(got, dtype=np.complex128) - ref)
    scale = np.broadcast_to(np.asarray(scale, dtype=np.float64), err.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(scale > 0, err / np.where(scale > 0, scale, 1.0), np.where(err > 0, np.inf, 0.0))
    return float(ratio.max()) if ratio.size else 0.0


def _time_ns(fn: Callable[[], np.ndarray], reps: int, warmup: int) -> tuple[list[int], float]:
    sink = 0.0
    for _ in range(warmup):
        sink += float(np.abs(fn()).sum())
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter_ns()
        out = fn()
        t1 = time.perf_counter_ns()
        samples.append(max(t1 - t0, MIN_TIME_NS))
        # consuming the result keeps the call from being optimized away
        sink += float(np.abs(out).sum())
    return samples, sink


def bench_variants(
    kernel: str,
    dims: str,
    variants: Mapping[str, Callable[[], np.ndarray]],
    check: Callable[[np.ndarray], float],
    reps: int,
    warmup: int,
    tolerance: float = TOLERANCE,
) -> BenchReport:
    """Verify every variant with ``check``, then time them.

    The first entry of ``variants`` is the baseline. ``check`` maps an output
    to its error against the reference; nothing is timed unless every
    variant is within ``tolerance``.
    """
    if reps < 1 or warmup < 0:
        raise ValueError("need reps >= 1 and warmup >= 0")
    for label, fn in variants.items():
        err = check(fn())
        if not err <= tolerance:
            raise EquivalenceFailure(
                f"{kernel} variant {label!r} deviates from the reference by {err:.3g} "
                f"(tolerance {tolerance:g}); refusing to time it")

    samples: dict[str, list[int]] = {}
    for label, fn in variants.items():
        samples[label], _ = _time_ns(fn, reps, warmup)
    medians = {k: statistics.median(v) / 1000.0 for k, v in samples.items()}

    labels = list(variants)
    base = labels[0]
    rows = [BenchRow(kernel, dims, base, medians[base], lab, medians[lab]) for lab in labels[1:]]
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return BenchReport(rows, reps, warmup, stamp, samples)


def run_bench(kernel: str, dims: Mapping[str, int] | None = None, reps: int = 1000,
              warmup: int = 100, seed: int = 0) -> BenchReport:
    dims = dict(dims or {})
    rng = np.random.default_rng(seed)

    def crandn(*shape):
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)).astype(np.complex64)

    if kernel == "beamform":
        A, f, b = dims.get("antennas", 64), dims.get("f", 36), dims.get("b", 60)
        W, S = crandn(A, f), crandn(f, b)
        bf = Beamformer(W)
        ref = beamform_oracle(W, S)
        scale = np.abs(W).astype(np.float64) @ np.abs(S).astype(np.float64)
        variants = {"naive": lambda: bf.apply(S, "naive"),
                    "optimized": lambda: bf.apply(S, "optimized")}
        label = f"antennas={A} f={f} b={b}"
        return bench_variants(kernel, label, variants, lambda out: max_scaled_error(out, ref, scale),
                              reps, warmup)

    if kernel == "fftfilter":
        n = dims.get("n", 2048)
        s, h = crandn(n), crandn(n)
        cfg = FilterConfig.from_taps(h)
        ref = circular_convolve_oracle(s, h).astype(np.complex128)
        scale = max(float(np.abs(ref).max()), 1.0)
        variants = {"naive": lambda: filter_apply(s, cfg, variant="naive"),
                    "optimized": lambda: filter_apply(s, cfg, variant="optimized")}
        return bench_variants(kernel, f"n={n}", variants, lambda out: max_scaled_error(out, ref, scale),
                              reps, warmup)

    raise ValueError(f"unknown kernel {kernel!r}; expected beamform or fftfilter")


def _us(t: float) -> str:
    return f"{t:.1f}" if t >= 1 else f"{t:.3f}"


def format_table(report: BenchReport) -> str:
    out = [f"# {DISCLAIMER}",
           f"# repetitions={report.repetitions} warmup={report.warmup} statistic=median "
           f"at {report.timestamp}"]
    for row in report.rows:
        out.append(f"# {row.kernel} {row.dims}: Original = {row.baseline_label}, New = {row.variant_label}")
    header = ("Original (μs)", "New (μs)", "Speedup factor")
    out.append("\t".join(header))
    for row in report.rows:
        out.append(f"{_us(row.baseline_us)}\t{_us(row.variant_us)}\t{row.speedup:.1f}")
    return "\n".join(out) + "\n"


def format_csv(report: BenchReport) -> str:
    buf = io.StringIO()
    buf.write(f"# {DISCLAIMER}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["kernel", "dims", "variant", "median_us", "speedup"])
    for row in report.rows:
        writer.writerow([row.kernel, row.dims, row.baseline_label, f"{row.baseline_us:.3f}", "1.000"])
        writer.writerow([row.kernel, row.dims, row.variant_label, f"{row.variant_us:.3f}", f"{row.speedup:.3f}"])
    return buf.getvalue()
