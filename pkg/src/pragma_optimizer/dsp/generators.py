"""Shipped building-block generators: ``beamform`` and ``fftfilter``.

Each generator prints two candidates in the candidate stream format. The
declared op counts are obtained by running the instrumented Python kernel at
the requested size, so they agree with the kernels by construction.

Generated code expects these variables in scope at the pragma site:

``beamform f b``
    ``const float *w`` (f interleaved complex weights), ``const float *S``
    (f x b, row-major interleaved), ``float *R`` (b interleaved outputs).
``fftfilter n``
    ``const float *s`` (n interleaved samples), ``const float *H`` (filter
    spectrum, assumed constant for the life of the process), ``float *y``.
"""

from __future__ import annotations

import os
import stat
import sys
from pathlib import Path

import numpy as np

from ..registry import ARCH_ENV
from ..selector import OpCounts
from .beamform import beamform_row_naive, beamform_row_optimized
from .counting import FlopCounter
from .fft import is_power_of_two
from .filter import FilterConfig, filter_apply

GENERATORS = ("beamform", "fftfilter")


class UsageError(Exception):
    pass


def beamform_counts(f: int, b: int) -> dict[str, OpCounts]:
    w = np.zeros(f, dtype=np.complex64)
    S = np.zeros((f, b), dtype=np.complex64)
    out = {}
    for label, kernel in (("fma_planar", beamform_row_optimized), ("naive", beamform_row_naive)):
        c = FlopCounter()
        kernel(w, S, c)
        out[label] = c.counts
    return out


def fftfilter_counts(n: int) -> dict[str, OpCounts]:
    cfg = FilterConfig(n, np.ones(n, dtype=np.complex64))
    s = np.zeros(n, dtype=np.complex64)
    out = {}
    for label, variant in (("fma_plan", "optimized"), ("naive", "naive")):
        c = FlopCounter()
        filter_apply(s, cfg, c, variant)
        out[label] = c.counts
    return out


# -- C templates ---------------------------------------------------------------

_BEAMFORM_FMA = """\
static void bb_beamform_fma_{f}x{b}(const float *w, const float *S, float *R)
{{
    float wr[{fdim}], wi[{fdim}];
    for (int k = 0; k < {f}; ++k) {{
        wr[k] = w[2 * k];
        wi[k] = w[2 * k + 1];
    }}
    for (int j = 0; j < {b}; ++j) {{
        float re = 0.0f, im = 0.0f;
        for (int k = 0; k < {f}; ++k) {{
            const float sr = S[2 * (k * {b} + j)];
            const float si = S[2 * (k * {b} + j) + 1];
            re = fmaf(wr[k], sr, re);
            re = fmaf(-wi[k], si, re);
            im = fmaf(wr[k], si, im);
            im = fmaf(wi[k], sr, im);
        }}
        R[2 * j] = re;
        R[2 * j + 1] = im;
    }}
}}"""

_BEAMFORM_NAIVE = """\
static void bb_beamform_naive_{f}x{b}(const float *w, const float *S, float *R)
{{
    for (int j = 0; j < {b}; ++j) {{
        float re = 0.0f, im = 0.0f;
        for (int k = 0; k < {f}; ++k) {{
            const float wr = w[2 * k], wi = w[2 * k + 1];
            const float sr = S[2 * (k * {b} + j)], si = S[2 * (k * {b} + j) + 1];
            re += wr * sr - wi * si;
            im += wr * si + wi * sr;
        }}
        R[2 * j] = re;
        R[2 * j + 1] = im;
    }}
}}"""

_FFT_PLAN = """\
typedef struct {{
    int ready;
    int rev[{n}];
    float twr[{half}], twi[{half}];
    float hr[{n}], hi[{n}];
}} bb_fftfilter_plan_{n}_t;
static bb_fftfilter_plan_{n}_t bb_fftfilter_plan_{n};

static void bb_fftfilter_plan_{n}_init(bb_fftfilter_plan_{n}_t *p, const float *H)
{{
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < {n}; ++i) {{
        int r = 0;
        for (int bit = 1, top = {n} >> 1; bit < {n}; bit <<= 1, top >>= 1)
            if (i & bit) r |= top;
        p->rev[i] = r;
        p->hr[i] = H[2 * i] / {n}.0f;
        p->hi[i] = H[2 * i + 1] / {n}.0f;
    }}
    for (int k = 0; k < {half}; ++k) {{
        p->twr[k] = (float)cos(2.0 * pi * k / {n});
        p->twi[k] = (float)sin(2.0 * pi * k / {n});
    }}
    p->ready = 1;
}}

/* in-place radix-2 DIT on planar data; sign = -1 forward, +1 inverse */
static void bb_fft_planned_{n}(const bb_fftfilter_plan_{n}_t *p, float *re, float *im, float sign)
{{
    for (int m = 2; m <= {n}; m <<= 1) {{
        const int half = m / 2, stride = {n} / m;
        for (int g = 0; g < {n}; g += m) {{
            for (int j = 0; j < half; ++j) {{
                const float wr = p->twr[j * stride], wi = sign * p->twi[j * stride];
                const int a = g + j, b = g + j + half;
                const float tr = fmaf(wr, re[b], -(wi * im[b]));
                const float ti = fmaf(wr, im[b], wi * re[b]);
                re[b] = re[a] - tr;
                im[b] = im[a] - ti;
                re[a] += tr;
                im[a] += ti;
            }}
        }}
    }}
}}

static void bb_fftfilter_fma_{n}(const bb_fftfilter_plan_{n}_t *p, const float *s, float *y)
{{
    float re[{n}], im[{n}];
    for (int i = 0; i < {n}; ++i) {{
        re[p->rev[i]] = s[2 * i];
        im[p->rev[i]] = s[2 * i + 1];
    }}
    bb_fft_planned_{n}(p, re, im, -1.0f);
    float xr[{n}], xi[{n}];
    for (int k = 0; k < {n}; ++k) {{
        xr[p->rev[k]] = fmaf(re[k], p->hr[k], -(im[k] * p->hi[k]));
        xi[p->rev[k]] = fmaf(re[k], p->hi[k], im[k] * p->hr[k]);
    }}
    bb_fft_planned_{n}(p, xr, xi, 1.0f);
    for (int i = 0; i < {n}; ++i) {{
        y[2 * i] = xr[i];
        y[2 * i + 1] = xi[i];
    }}
}}"""

_FFT_NAIVE = """\
static void bb_fft_naive_{n}(float *x, int inverse)
{{
    const double pi = 3.14159265358979323846;
    for (int i = 1, j = 0; i < {n}; ++i) {{
        int bit = {n} >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j) {{
            float tr = x[2 * i], ti = x[2 * i + 1];
            x[2 * i] = x[2 * j];
            x[2 * i + 1] = x[2 * j + 1];
            x[2 * j] = tr;
            x[2 * j + 1] = ti;
        }}
    }}
    for (int m = 2; m <= {n}; m <<= 1) {{
        const double ang = (inverse ? 2.0 : -2.0) * pi / m;
        const double sr = cos(ang), si = sin(ang);
        for (int g = 0; g < {n}; g += m) {{
            double wr = 1.0, wi = 0.0;
            for (int j = 0; j < m / 2; ++j) {{
                float *a = x + 2 * (g + j), *b = x + 2 * (g + j + m / 2);
                const float tr = (float)wr * b[0] - (float)wi * b[1];
                const float ti = (float)wr * b[1] + (float)wi * b[0];
                b[0] = a[0] - tr;
                b[1] = a[1] - ti;
                a[0] += tr;
                a[1] += ti;
                const double t = wr * sr - wi * si;
                wi = wr * si + wi * sr;
                wr = t;
            }}
        }}
    }}
}}

static void bb_fftfilter_naive_{n}(const float *s, const float *H, float *y)
{{
    float buf[2 * {n}];
    memcpy(buf, s, sizeof buf);
    bb_fft_naive_{n}(buf, 0);
    for (int k = 0; k < {n}; ++k) {{
        const float re = buf[2 * k] * H[2 * k] - buf[2 * k + 1] * H[2 * k + 1];
        const float im = buf[2 * k] * H[2 * k + 1] + buf[2 * k + 1] * H[2 * k];
        buf[2 * k] = re;
        buf[2 * k + 1] = im;
    }}
    bb_fft_naive_{n}(buf, 1);
    for (int k = 0; k < 2 * {n}; ++k)
        y[k] = buf[k] * (1.0f / {n});
}}"""


def _candidate(label: str, counts: OpCounts, includes: list[str], functions: str, body: list[str]) -> str:
    lines = [f"=== CANDIDATE {label} ===", counts.ops_line(), "--- INCLUDES ---", *includes,
             "--- FUNCTIONS ---", *functions.splitlines(), "--- BODY ---", *body]
    return "\n".join(lines) + "\n"


def _int_arg(text: str, what: str) -> int:
    try:
        return int(text, 10)
    except ValueError:
        raise UsageError(f"{what} must be an integer, got {text!r}") from None


def beamform_stream(args: list[str], arch: str) -> str:
    if len(args) != 2:
        raise UsageError("usage: beamform <f> <b>")
    f, b = _int_arg(args[0], "f"), _int_arg(args[1], "b")
    if f < 0 or b < 1:
        raise UsageError(f"need f >= 0 and b >= 1, got f={f} b={b}")
    counts = beamform_counts(f, b)
    fmt = dict(f=f, b=b, fdim=max(f, 1))
    tag = f"/* beamform f={f} b={b}, target {arch or 'unspecified'} */"
    return (
        _candidate("fma_planar", counts["fma_planar"], ["#include <math.h>"],
                   tag + "\n" + _BEAMFORM_FMA.format(**fmt),
                   [f"bb_beamform_fma_{f}x{b}(w, S, R);"])
        + _candidate("naive", counts["naive"], [],
                     tag + "\n" + _BEAMFORM_NAIVE.format(**fmt),
                     [f"bb_beamform_naive_{f}x{b}(w, S, R);"])
    )


def fftfilter_stream(args: list[str], arch: str) -> str:
    if len(args) != 1:
        raise UsageError("usage: fftfilter <n>")
    n = _int_arg(args[0], "n")
    if n < 2 or not is_power_of_two(n):
        raise UsageError(f"n must be a power of two >= 2, got {n}")
    counts = fftfilter_counts(n)
    fmt = dict(n=n, half=n // 2)
    tag = f"/* fftfilter n={n}, target {arch or 'unspecified'} */"
    return (
        _candidate("fma_plan", counts["fma_plan"], ["#include <math.h>"],
                   tag + "\n" + _FFT_PLAN.format(**fmt),
                   [f"if (!bb_fftfilter_plan_{n}.ready)",
                    f"    bb_fftfilter_plan_{n}_init(&bb_fftfilter_plan_{n}, H);",
                    f"bb_fftfilter_fma_{n}(&bb_fftfilter_plan_{n}, s, y);"])
        + _candidate("naive", counts["naive"], ["#include <math.h>", "#include <string.h>"],
                     tag + "\n" + _FFT_NAIVE.format(**fmt),
                     [f"bb_fftfilter_naive_{n}(s, H, y);"])
    )


def main(kernel: str, argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    arch = os.environ.get(ARCH_ENV, "")
    try:
        if kernel == "beamform":
            text = beamform_stream(argv, arch)
        elif kernel == "fftfilter":
            text = fftfilter_stream(argv, arch)
        else:
            raise UsageError(f"unknown building block {kernel!r}")
    except UsageError as exc:
        print(f"{kernel}: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    return 0


_SCRIPT = """\
#!{python}
import sys
sys.path.insert(0, {src!r})
from pragma_optimizer.dsp.generators import main
sys.exit(main({kernel!r}))
"""


def make_bbs_generators(install_dir: str | os.PathLike) -> list[Path]:
    """Write the shipped generators as executables into ``install_dir``."""
    root = Path(install_dir)
    root.mkdir(parents=True, exist_ok=True)
    src = str(Path(__file__).resolve().parents[2])
    written = []
    for kernel in GENERATORS:
        path = root / kernel
        path.write_text(_SCRIPT.format(python=sys.executable, src=src, kernel=kernel), encoding="utf-8")
        path.chmod(path.stat().st_mode | stat.S_IXUSR | stat.S_IXGRP | stat.S_IXOTH)
        written.append(path)
    return written
