"""Similarity-adjusted diversity: shared code discounts apparent variety.

Two operating systems that share most of their code also share most of
their vulnerability surface, so counting them as fully distinct species
overstates the protection diversity provides.  This module models that
kinship as a symmetric species-similarity matrix Z with unit diagonal and
entries in [0, 1], and evaluates the similarity-sensitive effective
species number

    D_q^Z = (sum_i p_i (Zp)_i^(q-1)) ** (1/(1-q)),   q != 1
    D_1^Z = exp(-sum_i p_i ln (Zp)_i)

where (Zp)_i = sum_j z_ij p_j is the "ordinariness" of species i: how
much abundance mass it effectively shares.  With Z = I this reduces
exactly to the plain Hill number; with Z all ones every species is the
same and the result is exactly 1.  Increasing any similarity can only
decrease the result.

Shared-code kinship is quantified as shared_lines / min(total_lines):
normalising by the smaller code base is the conservative choice, since
code shared with a larger system still exposes all of the smaller one.
Pairs with no recorded overlap count as fully distinct (z = 0).
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .community import Community
from .errors import (
    ConflictingPairError,
    DuplicateLabelError,
    MissingSpeciesError,
    SharedExceedsTotalError,
    UnknownLabelError,
    ValidationError,
    ValueOutOfRangeError,
)
from .indices import Q_ONE_EPS, _check_order


class SimilarityMatrix:
    """Symmetric pairwise species similarity with unit self-similarity."""

    __slots__ = ("labels", "values", "_index")

    def __init__(self, labels: Sequence[str], values):
        labels = tuple(labels)
        if not labels:
            raise ValidationError("similarity matrix needs at least one label")
        if len(set(labels)) != len(labels):
            raise DuplicateLabelError("similarity matrix labels must be unique")
        z = np.array(values, dtype=np.float64)
        n = len(labels)
        if z.shape != (n, n):
            raise ValidationError(
                f"similarity matrix shape {z.shape} does not match "
                f"{n} labels"
            )
        if not np.all(np.isfinite(z)) or z.min() < 0.0 or z.max() > 1.0:
            raise ValueOutOfRangeError("similarity values must lie in [0, 1]")
        if not np.all(np.diag(z) == 1.0):
            raise ValidationError("self-similarity must be exactly 1")
        if not np.array_equal(z, z.T):
            raise ValidationError("similarity matrix must be symmetric")
        z.setflags(write=False)
        self.labels = labels
        self.values = z
        self._index = {label: i for i, label in enumerate(labels)}

    @classmethod
    def identity(cls, labels: Sequence[str]) -> "SimilarityMatrix":
        return cls(labels, np.eye(len(labels)))

    def submatrix(self, labels: Sequence[str]) -> np.ndarray:
        """Rows/columns for ``labels`` in the given order."""
        missing = [lb for lb in labels if lb not in self._index]
        if missing:
            raise MissingSpeciesError(
                "similarity matrix does not cover: " + ", ".join(missing)
            )
        idx = [self._index[lb] for lb in labels]
        return self.values[np.ix_(idx, idx)]

    def __repr__(self) -> str:
        return f"SimilarityMatrix(labels={self.labels!r})"


def _checked_pair_value(
    pairs: dict[tuple[str, str], float], a: str, b: str, z: float, context: str
) -> None:
    """Record z for the unordered pair (a, b), rejecting contradictions."""
    if a == b:
        if z != 1.0:
            raise ConflictingPairError(
                f"{context}: self pair {a!r} implies similarity {z!r}, "
                "but self-similarity is fixed at 1"
            )
        return
    key = (a, b) if a <= b else (b, a)
    previous = pairs.get(key)
    if previous is not None and previous != z:
        raise ConflictingPairError(
            f"{context}: pair ({a!r}, {b!r}) given both {previous!r} and {z!r}"
        )
    pairs[key] = z


def similarity_from_shared_code(
    loc: Iterable[tuple[str, int]],
    shared: Iterable[tuple[str, str, int]],
) -> SimilarityMatrix:
    """Build a similarity matrix from code sizes and pairwise overlaps.

    ``loc`` lists (label, total_lines) with positive totals; ``shared``
    lists (label_a, label_b, shared_lines).  Unlisted pairs get z = 0.
    """
    totals: dict[str, int] = {}
    for label, total in loc:
        if label in totals:
            raise DuplicateLabelError(f"code size for {label!r} given twice")
        if not isinstance(total, int) or isinstance(total, bool) or total <= 0:
            raise ValidationError(
                f"total_lines for {label!r} must be a positive integer, "
                f"got {total!r}"
            )
        totals[label] = total
    if not totals:
        raise ValidationError("no code sizes given")

    pairs: dict[tuple[str, str], float] = {}
    for a, b, lines in shared:
        for label in (a, b):
            if label not in totals:
                raise UnknownLabelError(
                    f"shared-code pair references {label!r}, which has no "
                    "declared size"
                )
        if not isinstance(lines, int) or isinstance(lines, bool) or lines < 0:
            raise ValidationError(
                f"shared_lines for ({a!r}, {b!r}) must be a non-negative "
                f"integer, got {lines!r}"
            )
        cap = min(totals[a], totals[b])
        if lines > cap:
            raise SharedExceedsTotalError(
                f"pair ({a!r}, {b!r}) shares {lines} lines but the smaller "
                f"code base has only {cap}"
            )
        _checked_pair_value(pairs, a, b, lines / cap, "shared-code input")

    labels = tuple(totals)
    index = {label: i for i, label in enumerate(labels)}
    z = np.eye(len(labels))
    for (a, b), value in pairs.items():
        z[index[a], index[b]] = value
        z[index[b], index[a]] = value
    return SimilarityMatrix(labels, z)


def similarity_diversity(c: Community, z: SimilarityMatrix, q: float) -> float:
    """Effective species number of ``c`` at order q, discounted by kinship.

    The matrix must cover every species of ``c`` with positive abundance.
    The result lies in [1, hill_number(c, q)].
    """
    q = _check_order(q)
    present = c.nonzero()
    labels = [s.label for s in present]
    zsub = z.submatrix(labels)
    if np.all(zsub == 1.0):
        # Everything is mutually identical: exactly one effective species.
        return 1.0
    p = np.array([s.abundance for s in present])
    ordinariness = zsub @ p
    if abs(q - 1.0) < Q_ONE_EPS:
        return float(math.exp(-float(np.dot(p, np.log(ordinariness)))))
    return float(np.dot(p, ordinariness ** (q - 1.0)) ** (1.0 / (1.0 - q)))
