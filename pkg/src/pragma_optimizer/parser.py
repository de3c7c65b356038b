"""Line-level recognition of ``///`` pragma annotations in C/C++ source.

The host language is never parsed. Every input line ends up in exactly one
element of the returned :class:`AnnotatedSource`, so the original text can be
rebuilt from the model.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from .errors import (
    AnchorInRegion,
    DuplicateAnchor,
    EmptyKernelName,
    EmptyParameter,
    MissingAnchor,
    NestedBegin,
    UnbalancedEnd,
    UnclosedBegin,
)

IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

# `///`, at least one space, `PRAGMA`, at least one space, then the keyword.
_DIRECTIVE = re.compile(r"///(?!/) +PRAGMA +(INCLUDES|FUNCTIONS|BEGIN|END)(?=\s|\Z)(.*)\Z", re.S)


class DirectiveKind(Enum):
    INCLUDES = "Includes"
    FUNCTIONS = "Functions"
    BEGIN = "Begin"
    END = "End"
    CONTINUATION = "Continuation"


@dataclass(frozen=True)
class SourceLine:
    index: int  # 1-based
    text: str

    @property
    def indent(self) -> str:
        return self.text[: len(self.text) - len(self.text.lstrip(" \t"))]


@dataclass(frozen=True)
class PragmaDirective:
    kind: DirectiveKind
    line: SourceLine
    kernel_name: str = ""
    params: tuple[str, ...] = ()


@dataclass(frozen=True)
class PragmaRegion:
    begin: PragmaDirective
    end: PragmaDirective
    # Lines strictly between BEGIN and END, in file order.
    inner: tuple[Union[SourceLine, PragmaDirective], ...]

    @property
    def kernel_name(self) -> str:
        return self.begin.kernel_name

    @property
    def indent(self) -> str:
        return self.begin.line.indent

    @property
    def fallback_lines(self) -> tuple[SourceLine, ...]:
        return tuple(x for x in self.inner if isinstance(x, SourceLine))

    @property
    def continuations(self) -> tuple[PragmaDirective, ...]:
        return tuple(x for x in self.inner if isinstance(x, PragmaDirective))

    @property
    def full_params(self) -> tuple[str, ...]:
        params = list(self.begin.params)
        for c in self.continuations:
            params.extend(c.params)
        return tuple(params)

    def source_lines(self) -> list[SourceLine]:
        out = [self.begin.line]
        out.extend(x if isinstance(x, SourceLine) else x.line for x in self.inner)
        out.append(self.end.line)
        return out


@dataclass(frozen=True)
class PassthroughLine:
    line: SourceLine


@dataclass(frozen=True)
class IncludesAnchor:
    line: SourceLine


@dataclass(frozen=True)
class FunctionsAnchor:
    line: SourceLine


@dataclass(frozen=True)
class Region:
    region: PragmaRegion


Element = Union[PassthroughLine, IncludesAnchor, FunctionsAnchor, Region]


@dataclass(frozen=True)
class AnnotatedSource:
    elements: tuple[Element, ...]
    path: str = "<input>"
    trailing_newline: bool = True

    @property
    def regions(self) -> list[PragmaRegion]:
        return [e.region for e in self.elements if isinstance(e, Region)]

    def source_lines(self) -> list[SourceLine]:
        lines: list[SourceLine] = []
        for e in self.elements:
            if isinstance(e, Region):
                lines.extend(e.region.source_lines())
            else:
                lines.append(e.line)
        return lines

    def text(self) -> str:
        return join_lines([ln.text for ln in self.source_lines()], self.trailing_newline)


def split_lines(text: str) -> tuple[list[str], bool]:
    """Split on ``\\n`` only; report whether the text ended with a newline."""
    if text == "":
        return [], False
    parts = text.split("\n")
    if parts[-1] == "":
        parts.pop()
        return parts, True
    return parts, False


def join_lines(lines: list[str], trailing_newline: bool) -> str:
    out = "\n".join(lines)
    if trailing_newline and lines:
        out += "\n"
    return out


def _split_params(raw: str, line: int, path: str) -> list[str]:
    pieces = [p.strip() for p in raw.split(",")]
    if pieces and pieces[-1] == "":
        pieces.pop()  # trailing comma, or nothing at all
    for p in pieces:
        if p == "":
            raise EmptyParameter("empty parameter between commas", line, path)
    return pieces


def _classify(sl: SourceLine, path: str) -> PragmaDirective | None:
    """Return a directive for PRAGMA lines, None for anything else."""
    stripped = sl.text.lstrip(" \t")
    m = _DIRECTIVE.match(stripped)
    if m is None:
        return None
    keyword, rest = m.group(1), m.group(2)
    if keyword == "BEGIN":
        pieces = rest.split(",", 1)
        name = pieces[0].strip()
        if not name:
            raise EmptyKernelName("PRAGMA BEGIN without a kernel name", sl.index, path)
        if not IDENTIFIER.match(name):
            raise EmptyKernelName(f"invalid kernel name {name!r}", sl.index, path)
        params = _split_params(pieces[1], sl.index, path) if len(pieces) > 1 else []
        return PragmaDirective(DirectiveKind.BEGIN, sl, name, tuple(params))
    if rest.strip():
        # e.g. `/// PRAGMA END foo`: not a directive we know
        return None
    return PragmaDirective(DirectiveKind[keyword], sl)


def parse(source_text: str, path: str = "<input>") -> AnnotatedSource:
    raw_lines, trailing = split_lines(source_text)
    elements: list[Element] = []
    seen_anchor: dict[DirectiveKind, int] = {}
    open_begin: PragmaDirective | None = None
    inner: list[Union[SourceLine, PragmaDirective]] = []
    first_region_line: int | None = None

    for i, text in enumerate(raw_lines, start=1):
        sl = SourceLine(i, text)
        d = _classify(sl, path)

        if open_begin is not None:
            if d is None:
                if sl.text.lstrip(" \t").startswith("///"):
                    body = sl.text.lstrip(" \t")[3:]
                    params = _split_params(body, i, path)
                    inner.append(PragmaDirective(DirectiveKind.CONTINUATION, sl, params=tuple(params)))
                else:
                    inner.append(sl)
            elif d.kind is DirectiveKind.END:
                elements.append(Region(PragmaRegion(open_begin, d, tuple(inner))))
                open_begin, inner = None, []
            elif d.kind is DirectiveKind.BEGIN:
                raise NestedBegin(
                    f"PRAGMA BEGIN while region opened at line {open_begin.line.index} is still open",
                    i, path)
            else:
                raise AnchorInRegion(f"PRAGMA {d.kind.name} inside a region", i, path)
            continue

        if d is None:
            elements.append(PassthroughLine(sl))
        elif d.kind is DirectiveKind.END:
            raise UnbalancedEnd("PRAGMA END without a matching PRAGMA BEGIN", i, path)
        elif d.kind is DirectiveKind.BEGIN:
            open_begin = d
            if first_region_line is None:
                first_region_line = i
        else:
            if d.kind in seen_anchor:
                raise DuplicateAnchor(
                    f"second PRAGMA {d.kind.name} (first at line {seen_anchor[d.kind]})", i, path)
            seen_anchor[d.kind] = i
            elements.append(IncludesAnchor(sl) if d.kind is DirectiveKind.INCLUDES else FunctionsAnchor(sl))

    if open_begin is not None:
        raise UnclosedBegin("PRAGMA BEGIN is never closed", open_begin.line.index, path)

    if first_region_line is not None:
        for kind in (DirectiveKind.INCLUDES, DirectiveKind.FUNCTIONS):
            at = seen_anchor.get(kind)
            if at is None:
                raise MissingAnchor(f"file has regions but no PRAGMA {kind.name}", first_region_line, path)
            if at > first_region_line:
                raise MissingAnchor(
                    f"PRAGMA {kind.name} must precede the first region", at, path)

    return AnnotatedSource(tuple(elements), path, trailing)
