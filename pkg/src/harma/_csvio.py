"""CSV with '#'-prefixed provenance lines, shared by every artifact type."""

from __future__ import annotations

import csv
import math
from typing import IO, Iterable, Sequence


def fmt(x) -> str:
    """Shortest round-trip text for a float; infinities as ``inf``/``-inf``."""
    if isinstance(x, (bool,)):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def write(fh: IO[str], provenance: Iterable[tuple[str, str]],
          header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    for key, value in provenance:
        fh.write(f"# {key}: {value}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def read(fh: IO[str]) -> tuple[dict, list[str], list[list[str]]]:
    prov: dict[str, str] = {}
    body = []
    for line in fh:
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(":")
            prov[key.strip()] = value.strip()
        elif line.strip():
            body.append(line)
    rows = list(csv.reader(body))
    if not rows:
        raise ValueError("CSV has no header row")
    return prov, rows[0], rows[1:]
