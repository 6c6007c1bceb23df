from __future__ import annotations


class PUError(Exception):
    """Base class for every error raised by pywmmd."""


class InvalidInputError(PUError, ValueError):
    pass


class LibsvmParseError(InvalidInputError):
    def __init__(self, line_no: int, message: str) -> None:
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class InsufficientSamplesError(InvalidInputError):
    def __init__(self, what: str, needed: int, available: int) -> None:
        self.what = what
        self.needed = needed
        self.available = available
        super().__init__(
            f"insufficient {what} samples: need {needed}, have {available}"
        )


class DegenerateWitnessError(PUError, ArithmeticError):
    pass


class DivergenceError(PUError, FloatingPointError):
    pass


class ScaleCapError(InvalidInputError):
    pass


class ExperimentError(PUError, RuntimeError):
    def __init__(self, rep: int, seed: int, cause: BaseException) -> None:
        self.rep = rep
        self.seed = seed
        super().__init__(f"replication {rep} failed (seed={seed}): {cause}")
