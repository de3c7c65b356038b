"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they
are also repeated in the terminal summary.
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import DATA, crandn
from pragma_optimizer import errors
from pragma_optimizer.bench import (
    DISCLAIMER,
    bench_variants,
    format_csv,
    format_table,
    max_scaled_error,
    run_bench,
)
from pragma_optimizer.cli import main
from pragma_optimizer.dsp import FlopCounter
from pragma_optimizer.dsp.beamform import (
    beamform_full,
    beamform_oracle,
    beamform_row_naive,
    beamform_row_optimized,
)
from pragma_optimizer.dsp.fft import fft, ifft
from pragma_optimizer.dsp.filter import FilterConfig, circular_convolve_oracle, filter_apply
from pragma_optimizer.parser import PassthroughLine, parse
from pragma_optimizer.selector import OP_CLASSES, OpCounts, load_profile, select

TOL = 1e-4
RESULTS: list[str] = []


@contextmanager
def criterion(num, title, budget_s):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        line = f"[{num}] FAIL {title} ({time.perf_counter() - t0:.2f}s): {type(exc).__name__}: {exc}"
        RESULTS.append(line)
        print(line)
        raise
    elapsed = time.perf_counter() - t0
    ok = elapsed < budget_s
    line = f"[{num}] {'PASS' if ok else 'FAIL'} {title} ({elapsed:.2f}s, budget {budget_s:g}s)"
    RESULTS.append(line)
    print(line)
    assert ok, line


class Cand:
    def __init__(self, label, counts):
        self.label, self.op_counts = label, counts


# -- 1 ------------------------------------------------------------------------------

def test_c1_golden_roundtrip(tmp_path, example_input, example_output, stub_bbs, monkeypatch):
    with criterion(1, "golden round-trip of the annotated example", 1.0):
        src = tmp_path / "example.cpp"
        src.write_text(example_input)
        assert len(example_input.splitlines()) == 14
        log = tmp_path / "argv.txt"
        monkeypatch.setenv("ALGO_ARGV_LOG", str(log))
        out = tmp_path / "out.cpp"
        assert main([str(src), "--bbs", str(stub_bbs), "--arch", "haswell", "-o", str(out)]) == 0
        assert out.read_bytes() == example_output.encode()
        assert log.read_text().split()[1:] == ["b", "c", "g", "h"]
        text = out.read_text()
        assert text.count('std::cout << "BAD" << std::endl;') == 2
        assert "#endif // PRAGMA BEGIN line 6" in text


# -- 2 ------------------------------------------------------------------------------

HEADER = "/// PRAGMA INCLUDES\n/// PRAGMA FUNCTIONS\n"
SEVEN_ERRORS = [
    ("/// PRAGMA END\n", errors.UnbalancedEnd, 1),
    (HEADER + "/// PRAGMA BEGIN k\n", errors.UnclosedBegin, 3),
    (HEADER + "/// PRAGMA BEGIN a\n/// PRAGMA BEGIN b\n", errors.NestedBegin, 4),
    ("/// PRAGMA INCLUDES\n/// PRAGMA BEGIN a\n/// PRAGMA FUNCTIONS\n", errors.AnchorInRegion, 3),
    (HEADER + "/// PRAGMA FUNCTIONS\n", errors.DuplicateAnchor, 3),
    ("/// PRAGMA FUNCTIONS\n/// PRAGMA BEGIN a\n/// PRAGMA END\n", errors.MissingAnchor, 2),
    (HEADER + "/// PRAGMA BEGIN\n/// PRAGMA END\n", errors.EmptyKernelName, 3),
]

FUZZ_LINE = st.one_of(
    st.sampled_from(["/// PRAGMA INCLUDES", "/// PRAGMA FUNCTIONS", "/// PRAGMA BEGIN k, a,",
                     "/// PRAGMA BEGIN", "/// PRAGMA END", "/// x, y", "/// a,,b", "code;", "",
                     "  /// PRAGMA BEGIN q", "/// PRAGMA END x"]),
    st.text(max_size=24),
)


def _fuzz_once(lines, trailing):
    text = "\n".join(lines) + ("\n" if trailing else "")
    try:
        assert parse(text).text() == text
    except errors.ParseError:
        pass


@settings(max_examples=600, deadline=None, database=None)
@given(st.lists(FUZZ_LINE, max_size=25), st.booleans())
def _fuzz(lines, trailing):
    _fuzz_once(lines, trailing)


NO_PRAGMA = st.text(max_size=40).filter(lambda s: "\n" not in s and "PRAGMA" not in s)


@settings(max_examples=300, deadline=None, database=None)
@given(st.lists(NO_PRAGMA, max_size=20))
def _pragma_free(lines):
    text = "\n".join(lines)
    doc = parse(text)
    assert all(isinstance(e, PassthroughLine) for e in doc.elements)
    assert doc.text() == text


def test_c2_parser_properties():
    with criterion(2, "parser fuzzing, seven error fixtures, pragma-free round trip", 10.0):
        for text, exc, line in SEVEN_ERRORS:
            with pytest.raises(exc) as info:
                parse(text, "fixture.c")
            assert info.value.line == line, exc.__name__
        assert len({exc for _, exc, _ in SEVEN_ERRORS}) == 7
        _fuzz()
        _pragma_free()


# -- 3 ------------------------------------------------------------------------------

def test_c3_selector():
    with criterion(3, "selector examples, tie-break and monotonicity over 10^4 pairs", 5.0):
        hsw = load_profile("haswell")
        # hand-evaluated: mul 60*0.5 + add 60*1 = 90 vs fma 60*0.5 = 30
        unfused, fused = Cand("unfused", OpCounts(mul=60, add=60)), Cand("fused", OpCounts(fma=60))
        idx, costs = select([unfused, fused], hsw)
        assert idx == 1 and costs[0].cycles == 90 and costs[1].cycles == 30
        # perm 100*1 = 100 vs fma 100*0.5 = 50
        idx, costs = select([Cand("perm", OpCounts(perm=100)), Cand("fma", OpCounts(fma=100))], hsw)
        assert idx == 1 and costs[0].cycles == 100 and costs[1].cycles == 50

        rng = np.random.default_rng(7)
        profiles = [hsw, load_profile("generic-nofma")]
        for trial in range(10_000):
            p = profiles[trial % 2]
            a, b = rng.integers(0, 200, size=(2, 6))
            if not p.has_fma:
                a[0] = b[0] = 0
            ca, cb = OpCounts(*map(int, a)), OpCounts(*map(int, b))
            # tie-break: identical costs pick the lower index
            assert select([Cand("x", ca), Cand("y", ca)], p)[0] == 0
            before = select([Cand("a", ca), Cand("b", cb)], p)[0]
            op = OP_CLASSES[rng.integers(1 if not p.has_fma else 0, 6)]
            worse = OpCounts(**{**ca.as_dict(), op: getattr(ca, op) + int(rng.integers(1, 50))})
            after = select([Cand("a", worse), Cand("b", cb)], p)[0]
            assert not (before == 1 and after == 0)


# -- 4 ------------------------------------------------------------------------------

def _scaled_filter_err(got, ref):
    ref = np.asarray(ref, dtype=np.complex128)
    return float(np.max(np.abs(got - ref)) / max(1.0, np.max(np.abs(ref))))


def test_c4_kernel_oracles():
    with criterion(4, "beamforming and filter oracle equivalence", 60.0):
        rng = np.random.default_rng(20180207)
        worst = {"naive": 0.0, "optimized": 0.0}
        for trial in range(1000):
            f = int(rng.integers(0, 37))
            W, S = crandn(rng, 64, f), crandn(rng, f, 60)
            ref = beamform_oracle(W, S)
            # float32 error bound scales with the sum of term magnitudes
            scale = np.abs(W).astype(np.float64) @ np.abs(S).astype(np.float64)
            for variant in worst:
                err = max_scaled_error(beamform_full(W, S, variant), ref, scale)
                worst[variant] = max(worst[variant], err)
        print(f"    beamforming worst scaled error: {worst}")
        assert max(worst.values()) <= TOL

        ferr = 0.0
        for n in (8, 16, 32, 64):
            for _ in range(50):
                s, h = crandn(rng, n), crandn(rng, n)
                cfg = FilterConfig.from_taps(h)
                ref = circular_convolve_oracle(s, h)
                for variant in ("optimized", "naive"):
                    ferr = max(ferr, _scaled_filter_err(filter_apply(s, cfg, variant=variant), ref))
        n = 2048
        s = crandn(rng, n)
        ident = FilterConfig(n, np.ones(n, dtype=np.complex64))
        for variant in ("optimized", "naive"):
            ferr = max(ferr, _scaled_filter_err(filter_apply(s, ident, variant=variant), s))
        round_trip = float(np.max(np.abs(ifft(fft(s)) - s)) / np.max(np.abs(s)))
        print(f"    filter worst scaled error: {ferr:.3g}, n=2048 round trip: {round_trip:.3g}")
        assert ferr <= TOL and round_trip <= TOL


# -- 5 ------------------------------------------------------------------------------

def test_c5_structural_invariants():
    with criterion(5, "fused, permutation-free, FLOP-dominant optimized beamforming", 10.0):
        for f in (0, 1, 8, 36):
            for b in (1, 60):
                w, S = np.zeros(f, np.complex64), np.zeros((f, b), np.complex64)
                opt, naive = FlopCounter(), FlopCounter()
                beamform_row_optimized(w, S, opt)
                beamform_row_naive(w, S, naive)
                inner = opt.phase("inner")
                assert inner.mul == 0, (f, b)
                assert inner.perm == 0, (f, b)
                assert opt.counts.perm == 2 * f, (f, b)  # layout only, independent of b
                assert opt.counts.flops() <= naive.counts.flops(), (f, b)


# -- 6 ------------------------------------------------------------------------------

def test_c6_end_to_end_selection(shipped_bbs, capsys):
    with criterion(6, "shipped beamform generator picks per-profile winners", 5.0):
        site = str(DATA / "beamform_site.c")
        assert main([site, "--bbs", str(shipped_bbs), "--arch", "haswell", "--dry-run"]) == 0
        out = capsys.readouterr().out
        assert "beamform -> fma_planar" in out
        assert main([site, "--bbs", str(shipped_bbs), "--arch", "generic-nofma", "--dry-run"]) == 0
        out = capsys.readouterr().out
        assert "beamform -> naive" in out and "fma_planar: inadmissible" in out


# -- 7 ------------------------------------------------------------------------------

def test_c7_bench_harness():
    with criterion(7, "bench format, equivalence refusal and disclaimer (timings not asserted)", 30.0):
        report = run_bench("fftfilter", {"n": 2048}, reps=5, warmup=1)
        table = format_table(report).splitlines()
        assert table[0] == f"# {DISCLAIMER}"
        header = table.index("Original (μs)\tNew (μs)\tSpeedup factor")
        assert len(table[header + 1].split("\t")) == 3
        assert format_csv(report).startswith(f"# {DISCLAIMER}\n")

        ref = np.ones(8, dtype=np.complex64)
        with pytest.raises(errors.EquivalenceFailure):
            bench_variants("k", "d", {"naive": lambda: ref, "broken": lambda: ref * 2},
                           lambda out: max_scaled_error(out, ref, 1.0), reps=3, warmup=0)
