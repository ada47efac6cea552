"""Local factor tables: claimed factorizations of Phi_d(2), one line per d.

Grammar (UTF-8)::

    line    := [entry] [comment]
    entry   := d ":" factor {" " factor}
    factor  := prime ["^" exponent]
    comment := "#" any-text

Blank lines and comment-only lines are ignored; whitespace around tokens is
free.  Entries are claims only and are re-verified before use.
"""

from __future__ import annotations

import re
from pathlib import Path

from ..bigmath import from_decimal, to_decimal
from ..errors import TableFormatError

FactorTable = dict[int, list[tuple[int, int]]]

_FACTOR = re.compile(r"^([1-9][0-9]*)(?:\^([1-9][0-9]*))?$")
_INDEX = re.compile(r"^[1-9][0-9]*$")


def parse_factor_table(text: str) -> FactorTable:
    table: FactorTable = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, tail = line.partition(":")
        head = head.strip()
        if not sep or not _INDEX.match(head):
            raise TableFormatError(f"expected '<d>: <factors>', got {raw.strip()[:60]!r}", lineno)
        d = int(head)
        if d in table:
            raise TableFormatError(f"duplicate entry for d = {d}", lineno)
        tokens = tail.split()
        if not tokens:
            raise TableFormatError(f"no factors listed for d = {d}", lineno)
        entry = []
        for tok in tokens:
            m = _FACTOR.match(tok)
            if not m:
                raise TableFormatError(f"bad factor token {tok[:40]!r}", lineno)
            entry.append((from_decimal(m.group(1)), int(m.group(2) or 1)))
        table[d] = entry
    return table


def load_factor_table(path) -> FactorTable:
    path = Path(path)
    return parse_factor_table(path.read_text(encoding="utf-8"))


def load_tables(path) -> FactorTable:
    """Load one table file, or merge every ``*.txt`` file of a directory."""
    path = Path(path)
    if path.is_file():
        return load_factor_table(path)
    if not path.is_dir():
        raise FileNotFoundError(f"no factor table at {path}")
    merged: FactorTable = {}
    for f in sorted(path.glob("*.txt")):
        for d, entry in load_factor_table(f).items():
            known = merged.setdefault(d, [])
            known.extend(x for x in entry if x not in known)
    return merged


def format_factor_table(table: FactorTable, header: str | None = None) -> str:
    lines = [f"# {ln}" for ln in header.splitlines()] if header else []
    for d in sorted(table):
        parts = [f"{to_decimal(q)}^{e}" if e > 1 else to_decimal(q) for q, e in table[d]]
        lines.append(f"{d}: {' '.join(parts)}")
    return "\n".join(lines) + "\n"
