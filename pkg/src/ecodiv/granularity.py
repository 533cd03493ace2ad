"""Bracketing diversity between classification granularities.

Counting every product version as its own species overstates diversity;
collapsing versions into vendors understates it.  The truth lies between
the two measurements, so this module reports the pair as an interval:
the coarse (aggregated) diversity is the lower endpoint, the fine one
the upper.  Merging species can never increase a Hill number, so the
ordering is guaranteed.

No interpolation inside the interval is attempted: there is no defensible
rule for where the "real" figure falls, and inventing one would dress up
a guess as a measurement.
"""

from __future__ import annotations

from dataclasses import dataclass

from .community import Community, Taxonomy, aggregate
from .indices import hill_number


@dataclass(frozen=True)
class DiversityInterval:
    """Coarse/fine bounds on the effective species number at order q."""

    lower: float
    upper: float
    q: float
    taxonomy_name: str

    def __post_init__(self):
        if self.lower < 1.0 - 1e-9 or self.upper < 1.0 - 1e-9:
            raise ValueError("effective species numbers are always >= 1")
        if self.lower > self.upper * (1.0 + 1e-12) + 1e-12:
            raise ValueError(
                f"interval inverted: lower {self.lower!r} > upper {self.upper!r}"
            )

    @property
    def width(self) -> float:
        return self.upper - self.lower


def diversity_interval(
    c_fine: Community, taxonomy: Taxonomy, q: float
) -> DiversityInterval:
    """Bound the order-q diversity of ``c_fine`` across granularities.

    The lower endpoint is the Hill number of the community aggregated
    through ``taxonomy``; the upper endpoint is the Hill number of the
    fine community itself.  Raises
    :class:`~ecodiv.errors.UnmappedLabelError` if the taxonomy misses any
    species.
    """
    coarse = aggregate(c_fine, taxonomy)
    return DiversityInterval(
        lower=hill_number(coarse, q),
        upper=hill_number(c_fine, q),
        q=float(q),
        taxonomy_name=taxonomy.name,
    )
