"""Exception hierarchy.

Every error raised by the tool derives from :class:`OptimizerError` and carries
the process exit code the CLI reports for it.
"""

from __future__ import annotations


class OptimizerError(Exception):
    exit_code = 4


# -- parsing (exit 1) --------------------------------------------------------


class ParseError(OptimizerError):
    exit_code = 1

    def __init__(self, message: str, line: int | None = None, path: str = "<input>"):
        self.message = message
        self.line = line
        self.path = path
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {message}")


class UnbalancedEnd(ParseError):
    pass


class UnclosedBegin(ParseError):
    pass


class NestedBegin(ParseError):
    pass


class AnchorInRegion(ParseError):
    pass


class DuplicateAnchor(ParseError):
    pass


class MissingAnchor(ParseError):
    pass


class EmptyKernelName(ParseError):
    pass


class EmptyParameter(ParseError):
    pass


# -- generators (exit 2) -----------------------------------------------------


class GeneratorError(OptimizerError):
    exit_code = 2


class GeneratorFailed(GeneratorError):
    def __init__(self, name: str, status: int, stderr: str = ""):
        self.name = name
        self.status = status
        self.stderr = stderr
        msg = f"generator {name!r} exited with status {status}"
        if stderr.strip():
            msg += f": {stderr.strip()}"
        super().__init__(msg)


class MalformedOutput(GeneratorError):
    def __init__(self, message: str, stream_line: int, name: str = "?"):
        self.stream_line = stream_line
        self.name = name
        super().__init__(f"generator {name!r} output line {stream_line}: {message}")


class NoCandidates(GeneratorError):
    pass


class GeneratorTimeout(GeneratorError):
    pass


class NoAdmissibleCandidate(GeneratorError):
    """Every candidate needs an instruction class the target lacks."""


class InadmissibleCandidate(OptimizerError):
    pass


# -- registry lookup (exit 3) ------------------------------------------------


class UnknownKernel(OptimizerError):
    exit_code = 3


# -- I/O and configuration (exit 4) ------------------------------------------


class ConfigError(OptimizerError):
    exit_code = 4


class MissingBbsDir(ConfigError):
    pass


class ProfileError(ConfigError):
    pass


# -- kernels -----------------------------------------------------------------


class KernelError(ValueError):
    pass


class NonPowerOfTwo(KernelError):
    pass


class SizeMismatch(KernelError):
    pass


class DimMismatch(KernelError):
    pass


class EquivalenceFailure(OptimizerError):
    exit_code = 2
