"""MiniOO: a small statically typed object-oriented language used as the
reference code backend."""

from .backend import SUFFIX, TEST_SUFFIX, MiniOOBackend, normalize
from .checker import Checker, ParsedUnit, check_units
from .interp import DEFAULT_STEP_BUDGET, run_test
from .parser import MiniSyntaxError, parse_program
from .printer import print_program
from .syntax import TRAP_LABEL, TRAP_MESSAGE, is_trap, trap_body

__all__ = [
    "MiniOOBackend",
    "SUFFIX",
    "TEST_SUFFIX",
    "normalize",
    "Checker",
    "ParsedUnit",
    "check_units",
    "DEFAULT_STEP_BUDGET",
    "run_test",
    "MiniSyntaxError",
    "parse_program",
    "print_program",
    "TRAP_LABEL",
    "TRAP_MESSAGE",
    "is_trap",
    "trap_body",
]
