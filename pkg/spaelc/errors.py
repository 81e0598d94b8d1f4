"""
Exceptions raised by spaelc.

Every error carries the process exit code the CLI maps it to:
2 usage/config, 3 input data, 4 budget/overflow.
"""

from typing import Any

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_BUDGET = 4


class SpaelcError(Exception):
    """Base class for all spaelc errors."""

    exit_code: int = EXIT_INPUT


class RankDeficient(SpaelcError):
    """A matrix that must have full row rank does not."""

    def __init__(self, rank: int, expected: int):
        super().__init__(f"Matrix has rank {rank}, expected full row rank {expected}")
        self.rank = rank
        self.expected = expected


class TooLarge(SpaelcError):
    """A brute-force enumeration would exceed its budget."""

    exit_code = EXIT_BUDGET


class NotQrPrime(SpaelcError):
    """p is not an odd prime for which 2 is a quadratic residue."""

    def __init__(self, p: int):
        super().__init__(f"{p} is not an odd prime with 2 a quadratic residue mod p")
        self.p = p


class ParseError(SpaelcError):
    """Malformed alist (or other) input file."""

    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.line = line


class InconsistentDegrees(SpaelcError):
    """alist degree lists and index lists disagree."""


class NoSuchEdge(SpaelcError):
    """ELC requested on a (check, bit) pair that is not an incidence."""


class PivotBit(SpaelcError):
    """ELC requested on a check's own pivot bit."""


class OrbitOverflow(SpaelcError):
    """Orbit exploration found more than `cap` elements.

    `partial` holds what had been found when the cap was hit.
    """

    exit_code = EXIT_BUDGET

    def __init__(self, cap: int, partial: Any = None):
        super().__init__(f"Orbit exploration exceeded cap={cap}")
        self.cap = cap
        self.partial = partial


class ConfigError(SpaelcError):
    """Invalid run configuration."""

    exit_code = EXIT_USAGE


class NotAnAutomorphism(SpaelcError):
    """A permutation does not map the code onto itself."""
