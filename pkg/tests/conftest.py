import os
import shutil
import stat
import sys
import textwrap
from pathlib import Path

import numpy as np
import pytest

from pragma_optimizer.dsp.generators import make_bbs_generators

DATA = Path(__file__).parent / "data"


def make_executable(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    path.chmod(path.stat().st_mode | stat.S_IXUSR)
    return path


def python_generator(path: Path, body: str) -> Path:
    """Executable Python script run by the current interpreter."""
    return make_executable(path, f"#!{sys.executable}\n" + textwrap.dedent(body))


def stream(*candidates) -> str:
    """Build a candidate stream from (label, body_lines, counts dict) tuples."""
    out = []
    for label, body, counts in candidates:
        ops = " ".join(f"{k}={counts.get(k, 0)}" for k in ("fma", "mul", "add", "perm", "load", "store"))
        out += [f"=== CANDIDATE {label} ===", f";; ops {ops}", "--- INCLUDES ---",
                "--- FUNCTIONS ---", "--- BODY ---", *body]
    return "\n".join(out) + "\n"


@pytest.fixture
def example_input() -> str:
    return (DATA / "example_input.cpp").read_text(encoding="utf-8")


@pytest.fixture
def example_output() -> str:
    return (DATA / "example_output.cpp").read_text(encoding="utf-8")


@pytest.fixture
def stub_bbs(tmp_path) -> Path:
    """A bbs directory whose only block is the `algo` stub."""
    bbs = tmp_path / "bbs"
    bbs.mkdir()
    shutil.copy(DATA / "algo_stub.sh", bbs / "algo")
    (bbs / "algo").chmod(0o755)
    return bbs


@pytest.fixture(scope="session")
def shipped_bbs(tmp_path_factory) -> Path:
    bbs = tmp_path_factory.mktemp("shipped") / "bbs"
    make_bbs_generators(bbs)
    return bbs


@pytest.fixture
def rng():
    return np.random.default_rng(20180207)


def crandn(rng, *shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)).astype(np.complex64)


gcc = shutil.which("gcc") or shutil.which("cc")
needs_cc = pytest.mark.skipif(gcc is None, reason="no C compiler")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
