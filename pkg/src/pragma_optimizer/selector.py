"""Throughput cost model and variant selection.

Cost of a candidate on a profile is ``sum(count[c] * recip_throughput[c])``
over the six instruction classes, evaluated with :class:`fractions.Fraction`
so that comparisons are exact.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from .errors import InadmissibleCandidate, NoAdmissibleCandidate, ProfileError

OP_CLASSES = ("fma", "mul", "add", "perm", "load", "store")


@dataclass(frozen=True)
class OpCounts:
    fma: int = 0
    mul: int = 0
    add: int = 0
    perm: int = 0
    load: int = 0
    store: int = 0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"op count {f.name}={v!r} must be a nonnegative integer")

    def __add__(self, other: OpCounts) -> OpCounts:
        return OpCounts(*(a + b for a, b in zip(self.values(), other.values())))

    def scaled(self, k: int) -> OpCounts:
        return OpCounts(*(k * a for a in self.values()))

    def values(self) -> tuple[int, ...]:
        return tuple(getattr(self, c) for c in OP_CLASSES)

    def as_dict(self) -> dict[str, int]:
        return dict(zip(OP_CLASSES, self.values()))

    def flops(self) -> int:
        """Arithmetic work with an FMA weighted as two operations."""
        return self.mul + 2 * self.fma + self.add

    def ops_line(self) -> str:
        return ";; ops " + " ".join(f"{k}={v}" for k, v in self.as_dict().items())


@dataclass(frozen=True)
class ArchProfile:
    name: str
    vector_bits: int
    has_fma: bool
    recip_throughput: Mapping[str, Fraction]

    def __post_init__(self):
        missing = set(OP_CLASSES) - set(self.recip_throughput)
        if missing:
            raise ProfileError(f"profile {self.name!r} lacks recip.{sorted(missing)[0]}")
        for c, v in self.recip_throughput.items():
            if v <= 0:
                raise ProfileError(f"profile {self.name!r}: recip.{c} must be positive")

    def admits(self, counts: OpCounts) -> bool:
        return self.has_fma or counts.fma == 0


@dataclass(frozen=True)
class CostEstimate:
    cycles: Fraction
    candidate_label: str = ""


def estimate_cost(counts: OpCounts, arch: ArchProfile, label: str = "") -> CostEstimate:
    if not arch.admits(counts):
        raise InadmissibleCandidate(
            f"candidate {label or '?'} uses fma but profile {arch.name!r} has none")
    rt = arch.recip_throughput
    cycles = sum((n * rt[c] for c, n in zip(OP_CLASSES, counts.values()) if n), Fraction(0))
    return CostEstimate(cycles, label)


def select(candidates: Sequence, arch: ArchProfile) -> tuple[int, list[CostEstimate | None]]:
    """Pick the cheapest admissible candidate; ties go to the earliest one.

    ``candidates`` are objects with ``label`` and ``op_counts``. The returned
    list holds one estimate per candidate, ``None`` where inadmissible.
    """
    if not candidates:
        raise ValueError("select() needs at least one candidate")
    costs: list[CostEstimate | None] = []
    best = None
    for i, cand in enumerate(candidates):
        if not arch.admits(cand.op_counts):
            costs.append(None)
            continue
        est = estimate_cost(cand.op_counts, arch, cand.label)
        costs.append(est)
        if best is None or est.cycles < costs[best].cycles:
            best = i
    if best is None:
        raise NoAdmissibleCandidate(
            f"no candidate is admissible on profile {arch.name!r} "
            f"({', '.join(c.label for c in candidates)})")
    return best, costs


# -- profile files -----------------------------------------------------------

_INT_KEYS = {"vector_bits"}
_BOOL_KEYS = {"has_fma"}
_KNOWN_KEYS = {"name"} | _INT_KEYS | _BOOL_KEYS | {f"recip.{c}" for c in OP_CLASSES}


def parse_profile(text: str, origin: str = "<profile>") -> ArchProfile:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ProfileError(f"{origin}:{lineno}: expected key=value, got {raw.strip()!r}")
        if key in values:
            raise ProfileError(f"{origin}:{lineno}: duplicate key {key!r}")
        if key not in _KNOWN_KEYS:
            raise ProfileError(f"{origin}:{lineno}: unknown key {key!r}")
        values[key] = value

    for key in ("name", "vector_bits", "has_fma"):
        if key not in values:
            raise ProfileError(f"{origin}: missing key {key!r}")

    try:
        vector_bits = int(values["vector_bits"])
    except ValueError:
        raise ProfileError(f"{origin}: vector_bits must be an integer") from None
    if vector_bits <= 0:
        raise ProfileError(f"{origin}: vector_bits must be positive")
    if values["has_fma"] not in ("true", "false"):
        raise ProfileError(f"{origin}: has_fma must be 'true' or 'false'")

    recip: dict[str, Fraction] = {}
    for c in OP_CLASSES:
        key = f"recip.{c}"
        if key not in values:
            raise ProfileError(f"{origin}: missing key {key!r}")
        try:
            recip[c] = Fraction(values[key])
        except (ValueError, ZeroDivisionError):
            raise ProfileError(f"{origin}: {key} is not a number: {values[key]!r}") from None

    return ArchProfile(values["name"], vector_bits, values["has_fma"] == "true", recip)


def shipped_profiles() -> list[str]:
    root = resources.files(__package__) / "profiles"
    return sorted(p.name[: -len(".profile")] for p in root.iterdir() if p.name.endswith(".profile"))


def load_profile(name_or_path: str | os.PathLike) -> ArchProfile:
    """Load a profile from a file path, or by name from the shipped set."""
    path = Path(name_or_path)
    if path.is_file():
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ProfileError(f"cannot read profile {path}: {exc}") from exc
        return parse_profile(text, str(path))
    res = resources.files(__package__) / "profiles" / f"{name_or_path}.profile"
    if not res.is_file():
        raise ProfileError(
            f"unknown architecture {str(name_or_path)!r} "
            f"(shipped: {', '.join(shipped_profiles())})")
    return parse_profile(res.read_text(encoding="utf-8"), f"{name_or_path}.profile")
