"""Operation counting for the instrumented kernels.

Counts are in real scalar lanes: a complex element moved through a shuffle
is two ``perm`` lanes, a complex load is two ``load`` lanes, and so on.
Dividing every class by the lane width of a SIMD register gives instruction
counts, and the selector's argmin does not change under that scaling.

Each count is booked under a phase (``layout``, ``inner``, ``epilogue``) so
tests can look at the hot loop in isolation.
"""

from __future__ import annotations

from collections import defaultdict

from ..selector import OP_CLASSES, OpCounts

PHASES = ("layout", "inner", "epilogue")


class FlopCounter:
    def __init__(self):
        self._counts: dict[str, dict[str, int]] = defaultdict(lambda: dict.fromkeys(OP_CLASSES, 0))

    def add(self, phase: str, **ops: int) -> None:
        if phase not in PHASES:
            raise ValueError(f"unknown phase {phase!r}")
        bucket = self._counts[phase]
        for op, n in ops.items():
            if op not in bucket:
                raise ValueError(f"unknown op class {op!r}")
            bucket[op] += int(n)

    def phase(self, name: str) -> OpCounts:
        return OpCounts(**self._counts[name]) if name in self._counts else OpCounts()

    @property
    def counts(self) -> OpCounts:
        total = OpCounts()
        for name in PHASES:
            total = total + self.phase(name)
        return total

    def __repr__(self) -> str:
        return f"FlopCounter({self.counts})"


def tally(counter: FlopCounter | None, phase: str, **ops: int) -> None:
    if counter is not None:
        counter.add(phase, **ops)
