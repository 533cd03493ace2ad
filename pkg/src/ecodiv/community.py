"""Species-abundance data model.

A :class:`Community` is a named, ordered set of species with relative
abundances that sum to one; it is the input to every diversity
computation in this package.  A :class:`Taxonomy` maps fine-grained
species labels onto coarser groups (e.g. OS version onto OS vendor) and
drives :func:`aggregate`.  All types are immutable after construction
and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple

from .errors import (
    AllZeroError,
    DuplicateLabelError,
    NegativeWeightError,
    SumOutOfToleranceError,
    UnmappedLabelError,
    ValidationError,
)

#: Absolute tolerance on the abundance total of a constructed community.
SUM_TOLERANCE = 1e-9

#: Accepted raw-sum windows per input unit.  Real market-share tables sum
#: to e.g. 99.99 because the published figures are rounded; anything more
#: than one percent off indicates corrupt data rather than rounding.
_RAW_SUM_WINDOW = {"proportion": (0.99, 1.01), "percent": (99.0, 101.0)}

UNITS = ("proportion", "percent", "count")


class Species(NamedTuple):
    label: str
    abundance: float


@dataclass(frozen=True)
class Community:
    """A named species-abundance distribution, normalised to total 1."""

    name: str
    species: tuple[Species, ...]

    def __post_init__(self):
        if not self.species:
            raise AllZeroError(f"community {self.name!r} has no species")
        seen = set()
        for label, abundance in self.species:
            if not label:
                raise ValidationError(
                    f"community {self.name!r} contains an empty species label"
                )
            if label in seen:
                raise DuplicateLabelError(
                    f"community {self.name!r}: duplicate species label {label!r}"
                )
            seen.add(label)
            if not math.isfinite(abundance) or abundance < 0.0:
                raise NegativeWeightError(
                    f"community {self.name!r}: species {label!r} has "
                    f"abundance {abundance!r}; abundances must be finite and >= 0"
                )
        total = math.fsum(a for _, a in self.species)
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise SumOutOfToleranceError(
                f"community {self.name!r}: abundances sum to {total!r}, not 1"
            )

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.species)

    @property
    def abundances(self) -> tuple[float, ...]:
        return tuple(s.abundance for s in self.species)

    def nonzero(self) -> tuple[Species, ...]:
        """Species with strictly positive abundance, in original order."""
        return tuple(s for s in self.species if s.abundance > 0.0)

    def __len__(self) -> int:
        return len(self.species)


@dataclass(frozen=True)
class Taxonomy:
    """A total mapping from fine species labels to coarse group labels."""

    name: str
    groups: Mapping[str, str]

    def __post_init__(self):
        if not self.groups:
            raise ValidationError(f"taxonomy {self.name!r} maps nothing")
        for fine, coarse in self.groups.items():
            if not fine or not coarse:
                raise ValidationError(
                    f"taxonomy {self.name!r} contains an empty label "
                    f"({fine!r} -> {coarse!r})"
                )
        object.__setattr__(self, "groups", MappingProxyType(dict(self.groups)))

    @property
    def coarse_labels(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for coarse in self.groups.values():
            seen.setdefault(coarse)
        return tuple(seen)


@dataclass(frozen=True)
class CountTable:
    """Integer head-counts per species (e.g. machines running each OS)."""

    entries: tuple[tuple[str, int], ...]

    def __post_init__(self):
        for label, count in self.entries:
            if not isinstance(count, int) or isinstance(count, bool):
                raise ValidationError(
                    f"count for {label!r} must be an integer, got {count!r}"
                )
            if count < 0:
                raise NegativeWeightError(f"count for {label!r} is negative")

    def to_community(self, name: str) -> Community:
        if sum(c for _, c in self.entries) <= 0:
            raise AllZeroError(f"count table for {name!r} has zero total")
        return make_community(name, self.entries, unit="count")


def make_community(
    name: str,
    entries: Iterable[tuple[str, float]],
    unit: str = "proportion",
) -> Community:
    """Build a :class:`Community` from raw weights.

    ``unit`` states what the weights are: ``proportion`` (nominal total 1),
    ``percent`` (nominal total 100) or ``count`` (any positive total).  The
    raw sum must fall within one percent of the nominal total for the first
    two; weights are then divided by their exact raw sum, so the result
    always sums to 1 regardless of rounding in the source table.
    """
    if unit not in UNITS:
        raise ValueError(f"unknown unit {unit!r}; expected one of {UNITS}")
    entries = list(entries)
    if not entries:
        raise AllZeroError(f"community {name!r}: no species entries")
    seen = set()
    for label, weight in entries:
        if not label:
            raise ValidationError(f"community {name!r}: empty species label")
        if label in seen:
            raise DuplicateLabelError(
                f"community {name!r}: duplicate species label {label!r}"
            )
        seen.add(label)
        if not math.isfinite(weight) or weight < 0.0:
            raise NegativeWeightError(
                f"community {name!r}: weight for {label!r} is {weight!r}"
            )
    raw_sum = math.fsum(w for _, w in entries)
    if raw_sum <= 0.0:
        raise AllZeroError(f"community {name!r}: all weights are zero")
    window = _RAW_SUM_WINDOW.get(unit)
    if window is not None and not (window[0] <= raw_sum <= window[1]):
        raise SumOutOfToleranceError(
            f"community {name!r}: raw {unit} sum is {raw_sum!r}, outside "
            f"[{window[0]}, {window[1]}]; this looks like corrupt data"
        )
    return Community(
        name,
        tuple(Species(label, weight / raw_sum) for label, weight in entries),
    )


def drop_zeros(c: Community) -> Community:
    """Remove zero-abundance species; abundances are left untouched."""
    kept = c.nonzero()
    if len(kept) == len(c.species):
        return c
    return Community(c.name, kept)


def aggregate(c: Community, taxonomy: Taxonomy) -> Community:
    """Merge the species of ``c`` into the coarse groups of ``taxonomy``.

    Every species label must be mapped; coarse species appear in order of
    first appearance and carry the summed abundance of their members.
    """
    unmapped = [label for label in c.labels if label not in taxonomy.groups]
    if unmapped:
        raise UnmappedLabelError(
            f"taxonomy {taxonomy.name!r} does not map: " + ", ".join(unmapped)
        )
    members: dict[str, list[float]] = {}
    for label, abundance in c.species:
        members.setdefault(taxonomy.groups[label], []).append(abundance)
    return Community(
        f"{c.name}/{taxonomy.name}",
        tuple(
            Species(coarse, math.fsum(values)) for coarse, values in members.items()
        ),
    )


def split_all(c: Community, k: int = 2) -> Community:
    """Split every species into ``k`` equal parts.

    Used to exercise the doubling property: the order-q diversity of
    ``split_all(c, 2)`` is exactly twice that of ``c``.  ``k=1`` returns
    the community unchanged; for larger ``k`` the parts are labelled
    ``label#1 .. label#k``.
    """
    if not isinstance(k, int) or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    if k == 1:
        return c
    parts = tuple(
        Species(f"{label}#{i}", abundance / k)
        for label, abundance in c.species
        for i in range(1, k + 1)
    )
    return Community(f"{c.name}*{k}", parts)
