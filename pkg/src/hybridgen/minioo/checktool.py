"""Command-line type checker for MiniOO sources.

Prints one ``path:line: error: message`` line per diagnostic, the layout most
compilers use, so the external-tool adapter can drive it like any other
compiler.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..backend.contract import SourceUnit
from .backend import MiniOOBackend


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="minioo-check", description="Type-check MiniOO source files.")
    ap.add_argument("files", nargs="+", type=Path)
    args = ap.parse_args(argv)
    units = []
    for p in args.files:
        try:
            units.append(SourceUnit(str(p), p.stem, p.read_text(encoding="utf-8")))
        except OSError as exc:
            print(f"minioo-check: {exc}", file=sys.stderr)
            return 2
    result = MiniOOBackend().compile_check(units)
    for d in result.diagnostics:
        print(f"{d.path}:{d.line}: error: {d.message}")
    return 0 if result.ok else 1


if __name__ == "__main__":
    sys.exit(main())
