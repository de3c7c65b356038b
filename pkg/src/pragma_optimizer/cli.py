"""Command-line entry point.

Exit codes: 0 success, 1 parse error, 2 generator failure (including
timeouts, malformed output and no admissible candidate), 3 unknown kernel,
4 I/O or configuration error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

from . import __version__
from .bench import format_csv, format_table, run_bench
from .dsp.generators import make_bbs_generators
from .emitter import DEFAULT_GUARD, RewritePlan, emit
from .errors import ConfigError, OptimizerError
from .parser import IDENTIFIER, parse
from .registry import DEFAULT_TIMEOUT, invoke, load_registry, lookup
from .selector import load_profile, select

log = logging.getLogger("pragma_optimizer")

MAX_PARALLEL_GENERATORS = 8


@dataclass
class RunConfig:
    input_path: Path
    output_path: Path | None
    bbs_dir: Path
    arch: str
    guard_macro: str = DEFAULT_GUARD
    indent_unit: int = 4
    dry_run: bool = False
    in_place: bool = False
    generator_timeout: float = DEFAULT_TIMEOUT

    def __post_init__(self):
        if self.in_place:
            if self.output_path is not None and Path(self.output_path).resolve() != Path(self.input_path).resolve():
                raise ConfigError("--in-place and -o name different files")
            self.output_path = self.input_path
        elif self.output_path is None:
            if not self.dry_run:
                raise ConfigError("no output file: pass -o FILE, --in-place or --dry-run")
        elif Path(self.output_path).resolve() == Path(self.input_path).resolve():
            raise ConfigError("output would overwrite the input; pass --in-place to allow it")
        if self.indent_unit < 0:
            raise ConfigError("--indent-unit must be >= 0")
        if not IDENTIFIER.match(self.guard_macro):
            raise ConfigError(f"--guard-macro {self.guard_macro!r} is not a valid macro name")
        if self.generator_timeout <= 0:
            raise ConfigError("--timeout must be positive")


def format_cycles(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    d = c.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d == 1:
        return format(Decimal(c.numerator) / Decimal(c.denominator), "f")
    return str(c)


def _write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        if path.exists():
            os.chmod(tmp, path.stat().st_mode & 0o7777)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_optimize(cfg: RunConfig, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        text = Path(cfg.input_path).read_bytes().decode("utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read {cfg.input_path}: {exc}") from exc
    path = str(cfg.input_path)
    source = parse(text, path)
    regions = source.regions

    winners = []
    if regions:
        profile = load_profile(cfg.arch)
        registry = load_registry(cfg.bbs_dir)

        def run_region(region):
            where = f"{path}:{region.begin.line.index}"
            try:
                block = lookup(registry, region.kernel_name)
                cands = invoke(block, list(region.full_params), profile.name, cfg.generator_timeout)
                idx, costs = select(cands, profile)
            except OptimizerError as exc:
                exc.where = where
                raise
            return cands, idx, costs

        workers = min(MAX_PARALLEL_GENERATORS, len(regions))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_region, regions))

        for region, (cands, idx, costs) in zip(regions, results):
            winners.append(cands[idx])
            log.info("%s:%d: %s -> %s", path, region.begin.line.index, region.kernel_name, cands[idx].label)
            if cfg.dry_run:
                out.write(f"{path}:{region.begin.line.index}: {region.kernel_name} -> {cands[idx].label} "
                          f"(cycles {format_cycles(costs[idx].cycles)})\n")
                for cand, cost in zip(cands, costs):
                    shown = "inadmissible" if cost is None else format_cycles(cost.cycles)
                    mark = "*" if cand is cands[idx] else " "
                    out.write(f"  {mark} {cand.label}: {shown}\n")

    result = emit(RewritePlan(source, winners), cfg.guard_macro, " " * cfg.indent_unit)
    if cfg.dry_run:
        if not regions:
            out.write(f"{path}: no pragma regions\n")
        return 0
    try:
        _write_atomic(Path(cfg.output_path), result)
    except OSError as exc:
        raise ConfigError(f"cannot write {cfg.output_path}: {exc}") from exc
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _optimize_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="optimizer",
                description="Replace /// PRAGMA regions with the best building block for a target.",
                epilog="Other commands: optimizer bench ..., optimizer list-kernels ..., "
                       "optimizer install-bbs DIR")
    p.add_argument("input", type=Path)
    p.add_argument("--bbs", type=Path, required=True, help="directory of building-block generators")
    p.add_argument("--arch", required=True, help="shipped profile name or path to a profile file")
    p.add_argument("-o", "--output", type=Path)
    p.add_argument("--dry-run", action="store_true", help="print winners and costs, write nothing")
    p.add_argument("--guard-macro", default=DEFAULT_GUARD)
    p.add_argument("--indent-unit", type=int, default=4, metavar="N", help="spaces added to block bodies")
    p.add_argument("--in-place", action="store_true")
    p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT, metavar="S",
                   help="per-generator wall-clock limit in seconds")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def _bench_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="optimizer bench", description="Time naive vs optimized kernel variants.")
    p.add_argument("kernel", choices=["beamform", "fftfilter"])
    p.add_argument("--f", type=int, default=36)
    p.add_argument("--b", type=int, default=60)
    p.add_argument("--antennas", type=int, default=64)
    p.add_argument("--n", type=int, default=2048)
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--warmup", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["table", "csv"], default="table")
    return p


def _main(argv: list[str]) -> int:
    if argv and argv[0] == "bench":
        args = _bench_parser().parse_args(argv[1:])
        dims = ({"antennas": args.antennas, "f": args.f, "b": args.b} if args.kernel == "beamform"
                else {"n": args.n})
        try:
            report = run_bench(args.kernel, dims, args.reps, args.warmup, args.seed)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        sys.stdout.write(format_csv(report) if args.format == "csv" else format_table(report))
        return 0

    if argv and argv[0] == "list-kernels":
        p = _Parser(prog="optimizer list-kernels")
        p.add_argument("--bbs", type=Path, required=True)
        args = p.parse_args(argv[1:])
        for name in sorted(load_registry(args.bbs)):
            print(name)
        return 0

    if argv and argv[0] == "install-bbs":
        p = _Parser(prog="optimizer install-bbs", description="Install the shipped generators.")
        p.add_argument("dir", type=Path)
        args = p.parse_args(argv[1:])
        try:
            for path in make_bbs_generators(args.dir):
                print(path)
        except OSError as exc:
            raise ConfigError(f"cannot install generators: {exc}") from exc
        return 0

    args = _optimize_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="optimizer: %(levelname)s: %(message)s")
    cfg = RunConfig(args.input, args.output, args.bbs, args.arch, args.guard_macro,
                    args.indent_unit, args.dry_run, args.in_place, args.timeout)
    return run_optimize(cfg)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        return _main(argv)
    except OptimizerError as exc:
        where = getattr(exc, "where", None)
        prefix = f"{where}: " if where else ""
        print(f"optimizer: {prefix}error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
