"""Building-block generators: discovery, invocation and output parsing.

A generator is any executable file directly inside the ``bbs`` directory. It
receives the region parameters as argv, the target profile name in
``OPTIMIZER_ARCH``, and prints one or more candidates on stdout::

    === CANDIDATE <label> ===
    ;; ops fma=<n> mul=<n> add=<n> perm=<n> load=<n> store=<n>
    --- INCLUDES ---
    ...
    --- FUNCTIONS ---
    ...
    --- BODY ---
    ...
"""

from __future__ import annotations

import logging
import os
import re
import signal
import subprocess
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .errors import (
    GeneratorFailed,
    GeneratorTimeout,
    MalformedOutput,
    MissingBbsDir,
    NoCandidates,
    UnknownKernel,
)
from .parser import split_lines
from .selector import OP_CLASSES, OpCounts

log = logging.getLogger(__name__)

ARCH_ENV = "OPTIMIZER_ARCH"
DEFAULT_TIMEOUT = 30.0

CANDIDATE_RE = re.compile(r"=== CANDIDATE ([A-Za-z_][A-Za-z0-9_]*) ===\Z")
OPS_RE = re.compile(
    r";; ops " + " ".join(rf"{c}=(\d+)" for c in OP_CLASSES) + r"\Z")
INCLUDES_MARK = "--- INCLUDES ---"
FUNCTIONS_MARK = "--- FUNCTIONS ---"
BODY_MARK = "--- BODY ---"
# Lines starting with these are reserved for framing, so a misspelt marker is
# reported where it occurs instead of being swallowed as code.
MARKER_PREFIXES = ("=== ", "--- ", ";; ops")


@dataclass(frozen=True)
class BuildingBlockId:
    name: str
    executable_path: Path


@dataclass(frozen=True)
class GeneratedFragment:
    includes: tuple[str, ...]
    functions: tuple[str, ...]
    body: tuple[str, ...]


@dataclass(frozen=True)
class Candidate:
    label: str
    fragment: GeneratedFragment
    op_counts: OpCounts


def load_registry(bbs_dir: str | os.PathLike) -> dict[str, BuildingBlockId]:
    """Map kernel name to generator for every executable file in ``bbs_dir``."""
    root = Path(bbs_dir)
    if not root.is_dir():
        raise MissingBbsDir(f"building-block directory not found: {root}")
    registry: dict[str, BuildingBlockId] = {}
    for entry in sorted(root.iterdir()):
        if not entry.is_file():
            continue
        if not os.access(entry, os.X_OK):
            log.warning("skipping non-executable file %s", entry)
            continue
        registry[entry.name] = BuildingBlockId(entry.name, entry.resolve())
    return registry


def lookup(registry: Mapping[str, BuildingBlockId], name: str) -> BuildingBlockId:
    try:
        return registry[name]
    except KeyError:
        known = ", ".join(sorted(registry)) or "none"
        raise UnknownKernel(f"no building block named {name!r} (available: {known})") from None


def parse_candidate_stream(text: str, name: str = "?") -> list[Candidate]:
    """Parse generator stdout into candidates, strictly."""
    lines = [ln.rstrip("\r") for ln in split_lines(text)[0]]
    candidates: list[Candidate] = []
    labels: set[str] = set()
    i = 0

    def bad(msg: str, at: int) -> MalformedOutput:
        return MalformedOutput(msg, at + 1, name)

    def expect(at: int, marker: str) -> None:
        if at >= len(lines):
            raise bad(f"unexpected end of output, expected {marker!r}", at)
        if lines[at] != marker:
            raise bad(f"expected {marker!r}, got {lines[at]!r}", at)

    def section(at: int) -> tuple[list[str], int]:
        out = []
        while at < len(lines) and not lines[at].startswith(MARKER_PREFIXES):
            out.append(lines[at])
            at += 1
        return out, at

    while i < len(lines):
        m = CANDIDATE_RE.match(lines[i])
        if m is None:
            raise bad(f"expected a candidate header, got {lines[i]!r}", i)
        label = m.group(1)
        if label in labels:
            raise bad(f"duplicate candidate label {label!r}", i)
        labels.add(label)
        header = i
        i += 1
        if i >= len(lines):
            raise bad("unexpected end of output, expected ';; ops' line", i)
        ops = OPS_RE.match(lines[i])
        if ops is None:
            raise bad(f"malformed ops line {lines[i]!r}", i)
        counts = OpCounts(*(int(v) for v in ops.groups()))
        i += 1
        expect(i, INCLUDES_MARK)
        includes, i = section(i + 1)
        expect(i, FUNCTIONS_MARK)
        functions, i = section(i + 1)
        expect(i, BODY_MARK)
        body, i = section(i + 1)
        if i < len(lines) and not CANDIDATE_RE.match(lines[i]):
            raise bad(f"misplaced marker {lines[i]!r}", i)
        if not body:
            raise bad(f"candidate {label!r} has an empty body", header)
        candidates.append(Candidate(label, GeneratedFragment(tuple(includes), tuple(functions), tuple(body)), counts))
    return candidates


def invoke(
    block: BuildingBlockId,
    params: Sequence[str],
    arch: str,
    timeout: float = DEFAULT_TIMEOUT,
) -> list[Candidate]:
    """Run one generator and return its candidates in emission order."""
    env = dict(os.environ)
    env[ARCH_ENV] = arch
    try:
        proc = subprocess.Popen(
            [str(block.executable_path), *params],
            env=env,
            stdin=subprocess.DEVNULL,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            start_new_session=True,
        )
    except OSError as exc:
        raise GeneratorFailed(block.name, -1, str(exc)) from exc
    try:
        out, err = proc.communicate(timeout=timeout)
    except subprocess.TimeoutExpired:
        # kill the whole group so grandchildren cannot hold the pipes open
        try:
            os.killpg(proc.pid, signal.SIGKILL)
        except ProcessLookupError:
            pass
        proc.communicate()
        raise GeneratorTimeout(f"generator {block.name!r} exceeded {timeout:g} s") from None

    stderr = err.decode("utf-8", errors="replace")
    if stderr:
        sys.stderr.write(stderr)
    if proc.returncode != 0:
        raise GeneratorFailed(block.name, proc.returncode, stderr)
    try:
        stdout = out.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedOutput(f"output is not UTF-8 ({exc})", 1, block.name) from exc
    candidates = parse_candidate_stream(stdout, block.name)
    if not candidates:
        raise NoCandidates(f"generator {block.name!r} emitted no candidates")
    return candidates
