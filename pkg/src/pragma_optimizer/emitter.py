"""Rewrite an annotated source with the selected building blocks."""

from __future__ import annotations

from dataclasses import dataclass, field

from .parser import (
    AnnotatedSource,
    FunctionsAnchor,
    IncludesAnchor,
    PassthroughLine,
    PragmaRegion,
    Region,
    join_lines,
)
from .registry import Candidate

DEFAULT_GUARD = "OPTIMIZER_ACTIVATED"
DEFAULT_INDENT_UNIT = "    "


def merge_lines(blocks: list[tuple[str, ...]]) -> list[str]:
    """Concatenate line blocks, dropping repeats (trailing whitespace ignored)."""
    seen: set[str] = set()
    out: list[str] = []
    for block in blocks:
        for line in block:
            key = line.rstrip()
            if key in seen:
                continue
            seen.add(key)
            out.append(line)
    return out


def merge_blocks(blocks: list[tuple[str, ...]]) -> list[str]:
    """Concatenate line blocks, dropping blocks identical to an earlier one.

    Helper code is deduplicated a whole block at a time: two different
    functions legitimately share lines such as a closing brace.
    """
    seen: set[tuple[str, ...]] = set()
    out: list[str] = []
    for block in blocks:
        key = tuple(line.rstrip() for line in block)
        if not key or key in seen:
            continue
        seen.add(key)
        out.extend(block)
    return out


@dataclass
class RewritePlan:
    source: AnnotatedSource
    winners: list[Candidate]  # one per region, in region order
    merged_includes: list[str] = field(init=False)
    merged_functions: list[str] = field(init=False)

    def __post_init__(self):
        n_regions = len(self.source.regions)
        if len(self.winners) != n_regions:
            raise ValueError(f"{n_regions} regions but {len(self.winners)} winners")
        self.merged_includes = merge_lines([w.fragment.includes for w in self.winners])
        self.merged_functions = merge_blocks([w.fragment.functions for w in self.winners])

    @property
    def region_winners(self) -> dict[int, Candidate]:
        """Winner per region, keyed by the BEGIN line number."""
        return {r.begin.line.index: w for r, w in zip(self.source.regions, self.winners)}


def endif_label(region: PragmaRegion) -> int:
    # 0-based index of the BEGIN line: reproduces "line 6" for a BEGIN on line 7.
    return region.begin.line.index - 1


def _guarded_block(out: list[str], lines: list[str], guard: str) -> None:
    if out and out[-1].strip():
        out.append("")
    out.append(f"#ifdef {guard}")
    out.extend(lines)
    out.append("#endif")
    out.append("")


def emit(plan: RewritePlan, guard_macro: str = DEFAULT_GUARD, indent_unit: str = DEFAULT_INDENT_UNIT) -> str:
    out: list[str] = []
    winners = iter(plan.winners)
    for element in plan.source.elements:
        if isinstance(element, PassthroughLine):
            out.append(element.line.text)
        elif isinstance(element, IncludesAnchor):
            _guarded_block(out, plan.merged_includes, guard_macro)
        elif isinstance(element, FunctionsAnchor):
            _guarded_block(out, plan.merged_functions, guard_macro)
        elif isinstance(element, Region):
            region = element.region
            winner = next(winners)
            ind = region.indent
            out.append(f"{ind}#ifndef {guard_macro}")
            out.extend(sl.text for sl in region.fallback_lines)
            out.append(f"{ind}#else")
            for line in winner.fragment.body:
                out.append(ind + indent_unit + line if line.strip() else "")
            out.append(f"{ind}#endif // PRAGMA BEGIN line {endif_label(region)}")
    return join_lines(out, plan.source.trailing_newline)
