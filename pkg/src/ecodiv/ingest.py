"""Reading and writing the on-disk formats.

Everything is comma-delimited UTF-8 text with a fixed header line.
Lines whose first non-blank character is ``#`` are comments; a comment
of the form ``# unit: percent`` (or ``proportion`` / ``count``) declares
what snapshot weights mean.  Fields containing commas must be
double-quoted; the decimal separator is always ``.`` regardless of
locale.

Formats
-------
snapshot           header ``species,share``; one row per species.
                   The unit must be declared (directive or caller
                   override) - magnitudes are never guessed.
taxonomy           header ``fine,coarse``; total mapping, no duplicate
                   fine labels.
similarity         header ``a,b,z`` with z in [0, 1]; pairs are
                   symmetric, unlisted pairs are 0, the diagonal is
                   fixed at 1.  Repeating a pair with a different z is
                   an error.  A self row ``X,X,1`` is the way to declare
                   a species that shares nothing with anyone.
code sizes         header ``species,total_lines`` (positive integers).
shared lines       header ``a,b,shared_lines`` (non-negative integers).
series directory   snapshot files named ``YYYYMMDDThhmmssZ.csv``; other
                   ``.csv`` names are rejected, non-CSV files ignored.

Every parse error carries the offending file path and 1-based line
number.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .community import UNITS, Community, Taxonomy, make_community
from .errors import (
    BadFilenameError,
    DuplicateFineLabelError,
    DuplicateLabelError,
    DuplicateTimestampError,
    NegativeWeightError,
    ParseError,
    ValidationError,
    ValueOutOfRangeError,
)
from .monitor import EcosystemSeries, Snapshot
from .similarity import SimilarityMatrix, _checked_pair_value

_UNIT_DIRECTIVE = re.compile(r"^#\s*unit\s*:\s*(\S+)\s*$")
_SERIES_STAMP = re.compile(r"^(\d{8})T(\d{6})Z$")


def _data_lines(path: Path) -> tuple[str | None, list[tuple[int, list[str]]]]:
    """Split a file into (unit directive, [(lineno, fields), ...]).

    Each data line is run through the csv reader individually so that
    quoted fields work while line numbers stay exact.
    """
    # utf-8-sig: spreadsheet exports often lead with a BOM
    text = path.read_text(encoding="utf-8-sig")
    unit = None
    rows: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            match = _UNIT_DIRECTIVE.match(stripped)
            if match:
                if match.group(1) not in UNITS:
                    raise ParseError(
                        path, lineno, f"unknown unit {match.group(1)!r}"
                    )
                unit = match.group(1)
            continue
        fields = next(csv.reader([raw]))
        rows.append((lineno, [f.strip() for f in fields]))
    return unit, rows


def _table(path: Path, header: tuple[str, ...]) -> tuple[str | None, list]:
    unit, rows = _data_lines(path)
    if not rows:
        raise ParseError(path, 1, f"empty file; expected header {','.join(header)!r}")
    lineno, first = rows[0]
    if tuple(first) != header:
        raise ParseError(
            path, lineno, f"expected header {','.join(header)!r}, got {first!r}"
        )
    body = []
    for lineno, fields in rows[1:]:
        if len(fields) != len(header):
            raise ParseError(
                path, lineno, f"expected {len(header)} fields, got {len(fields)}"
            )
        body.append((lineno, fields))
    return unit, body


def _parse_float(path: Path, lineno: int, text: str, what: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(path, lineno, f"{what} {text!r} is not a number") from None
    if not math.isfinite(value):
        raise ParseError(path, lineno, f"{what} {text!r} is not finite")
    return value


def _parse_int(path: Path, lineno: int, text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(path, lineno, f"{what} {text!r} is not an integer") from None


@dataclass(frozen=True)
class SnapshotFile:
    """A parsed snapshot: raw rows plus the unit they were declared in."""

    path: str
    unit: str | None
    rows: tuple[tuple[str, float], ...]

    @property
    def raw_sum(self) -> float:
        return math.fsum(w for _, w in self.rows)

    def to_community(self, name: str | None = None, unit: str | None = None) -> Community:
        effective_unit = unit or self.unit
        if effective_unit is None:
            raise ParseError(
                self.path,
                1,
                "no unit declared; add a '# unit: ...' directive or pass one "
                "explicitly",
            )
        if name is None:
            name = Path(self.path).stem
        try:
            return make_community(name, self.rows, unit=effective_unit)
        except ValidationError as exc:
            raise type(exc)(f"{self.path}: {exc}") from exc


def read_snapshot_file(path) -> SnapshotFile:
    """Parse a snapshot file without yet validating it as a community."""
    path = Path(path)
    unit, body = _table(path, ("species", "share"))
    rows = []
    seen: dict[str, int] = {}
    for lineno, (label, share_text) in body:
        if not label:
            raise ParseError(path, lineno, "empty species label")
        if label in seen:
            raise DuplicateLabelError(
                f"{path}:{lineno}: species {label!r} already given on "
                f"line {seen[label]}"
            )
        seen[label] = lineno
        share = _parse_float(path, lineno, share_text, "share")
        if share < 0.0:
            raise NegativeWeightError(
                f"{path}:{lineno}: share for {label!r} is negative ({share_text})"
            )
        rows.append((label, share))
    return SnapshotFile(path=str(path), unit=unit, rows=tuple(rows))


def load_snapshot(path, unit: str | None = None) -> Community:
    """Read one snapshot file into a community (named after the file)."""
    return read_snapshot_file(path).to_community(unit=unit)


def write_snapshot(c: Community, path) -> None:
    """Write a community as a proportion-unit snapshot file.

    Abundances are written with full precision, so loading the file back
    reproduces the community bit for bit.
    """
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as handle:
        handle.write(f"# {c.name}\n# unit: proportion\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["species", "share"])
        for label, abundance in c.species:
            writer.writerow([label, repr(abundance)])


def load_taxonomy(path) -> Taxonomy:
    """Read a fine-to-coarse label mapping (named after the file)."""
    path = Path(path)
    _, body = _table(path, ("fine", "coarse"))
    if not body:
        raise ParseError(path, 1, "taxonomy has no mapping rows")
    groups: dict[str, str] = {}
    for lineno, (fine, coarse) in body:
        if not fine or not coarse:
            raise ParseError(path, lineno, "empty label in mapping")
        if fine in groups:
            raise DuplicateFineLabelError(
                f"{path}:{lineno}: fine label {fine!r} mapped twice"
            )
        groups[fine] = coarse
    return Taxonomy(name=path.stem, groups=groups)


def load_similarity(path) -> SimilarityMatrix:
    """Read pairwise similarities; see the module docstring for the rules."""
    path = Path(path)
    _, body = _table(path, ("a", "b", "z"))
    if not body:
        raise ParseError(path, 1, "similarity file has no pair rows")
    labels: dict[str, None] = {}
    pairs: dict[tuple[str, str], float] = {}
    for lineno, (a, b, z_text) in body:
        if not a or not b:
            raise ParseError(path, lineno, "empty species label")
        z = _parse_float(path, lineno, z_text, "similarity")
        if not 0.0 <= z <= 1.0:
            raise ValueOutOfRangeError(
                f"{path}:{lineno}: similarity {z_text} outside [0, 1]"
            )
        labels.setdefault(a)
        labels.setdefault(b)
        _checked_pair_value(pairs, a, b, z, f"{path}:{lineno}")

    ordered = tuple(labels)
    index = {label: i for i, label in enumerate(ordered)}
    values = np.eye(len(ordered))
    for (a, b), z in pairs.items():
        values[index[a], index[b]] = z
        values[index[b], index[a]] = z
    return SimilarityMatrix(ordered, values)


def load_loc(path) -> list[tuple[str, int]]:
    """Read per-species code sizes (``species,total_lines``)."""
    path = Path(path)
    _, body = _table(path, ("species", "total_lines"))
    if not body:
        raise ParseError(path, 1, "code-size file has no rows")
    rows = []
    for lineno, (label, total_text) in body:
        if not label:
            raise ParseError(path, lineno, "empty species label")
        rows.append((label, _parse_int(path, lineno, total_text, "total_lines")))
    return rows


def load_shared(path) -> list[tuple[str, str, int]]:
    """Read pairwise shared line counts (``a,b,shared_lines``)."""
    path = Path(path)
    _, body = _table(path, ("a", "b", "shared_lines"))
    rows = []
    for lineno, (a, b, lines_text) in body:
        if not a or not b:
            raise ParseError(path, lineno, "empty species label")
        rows.append((a, b, _parse_int(path, lineno, lines_text, "shared_lines")))
    return rows


def _stamp_from_name(path: Path) -> datetime:
    match = _SERIES_STAMP.match(path.stem)
    if not match:
        raise BadFilenameError(
            f"{path}: series files must be named YYYYMMDDThhmmssZ.csv"
        )
    try:
        stamp = datetime.strptime(path.stem, "%Y%m%dT%H%M%SZ")
    except ValueError as exc:
        raise BadFilenameError(f"{path}: {exc}") from exc
    return stamp.replace(tzinfo=timezone.utc)


def load_series(dir_path, unit: str | None = None) -> EcosystemSeries:
    """Read every timestamped snapshot in a directory, oldest first.

    The series is named after the directory.  Two files with the same
    timestamp are rejected.
    """
    directory = Path(dir_path)
    if not directory.is_dir():
        raise NotADirectoryError(f"{directory} is not a directory")
    stamped: list[tuple[datetime, Path]] = []
    for entry in sorted(directory.iterdir()):
        if entry.suffix.lower() != ".csv" or not entry.is_file():
            continue
        stamped.append((_stamp_from_name(entry), entry))
    if not stamped:
        raise ParseError(directory, 1, "no snapshot files (*.csv) in directory")
    stamped.sort(key=lambda pair: pair[0])
    for (a, _), (b, path_b) in zip(stamped, stamped[1:]):
        if a == b:
            raise DuplicateTimestampError(
                f"{path_b}: timestamp {a.isoformat()} appears twice"
            )
    return EcosystemSeries(
        name=directory.name,
        snapshots=tuple(
            Snapshot(stamp, load_snapshot(path, unit=unit)) for stamp, path in stamped
        ),
    )
