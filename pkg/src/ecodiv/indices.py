"""Diversity indices and their common currency, the effective number of species.

Raw indices (Shannon entropy, Gini-Simpson, Simpson concentration, Renyi
and Tsallis entropies, richness) each live on their own scale and cannot
be compared directly.  Converting each to the number of equally-abundant
species that would produce the same index value puts them all on one
scale; that converted value is the Hill number of the matching order q:

    D_q = (sum_i p_i^q) ** (1 / (1 - q)),   q != 1
    D_1 = exp(-sum_i p_i ln p_i)            (the q -> 1 limit)

q = 0 gives richness, q = 1 the exponential of Shannon entropy, q = 2 the
inverse Simpson concentration.  Every function here takes a
:class:`~ecodiv.community.Community`; species with zero abundance are
ignored by all power sums (0 ln 0 := 0), so a community keeps its zero
entries without affecting any order q > 0.

Sums use :func:`math.fsum`, so results are exactly invariant under species
reordering.  Natural logarithms throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .community import Community
from .errors import NegativeOrderError, ValueOutOfRangeError

#: Orders closer to 1 than this are evaluated through the Shannon limit
#: form; the direct formula loses all precision to cancellation there.
Q_ONE_EPS = 1e-9

INDEX_KINDS = (
    "richness",
    "shannon",
    "gini_simpson",
    "simpson_concentration",
    "renyi",
    "tsallis",
)


def _check_order(q: float) -> float:
    q = float(q)
    if not math.isfinite(q) or q < 0.0:
        raise NegativeOrderError(f"diversity order must be finite and >= 0, got {q!r}")
    return q


def _positive(c: Community) -> list[float]:
    return [a for _, a in c.species if a > 0.0]


def shannon_entropy(c: Community) -> float:
    """Shannon-Wiener entropy H = -sum p_i ln p_i, in nats."""
    h = -math.fsum(p * math.log(p) for p in _positive(c))
    return h if h != 0.0 else 0.0


def shannon_diversity(c: Community) -> float:
    """exp(H): Shannon entropy converted to an effective species number.

    Evaluated both as exp(H) and as the equivalent product
    prod (1/p_i)^(p_i); the two must agree to 1e-12 relative, which guards
    the exponentiation against implementation slips.  The exp form is
    returned.
    """
    d_exp = math.exp(shannon_entropy(c))
    d_prod = math.prod((1.0 / p) ** p for p in _positive(c))
    if abs(d_exp - d_prod) > 1e-12 * d_exp:
        raise ArithmeticError(
            f"exp-entropy and product forms disagree: {d_exp!r} vs {d_prod!r}"
        )
    return d_exp


def richness(c: Community) -> int:
    """Number of species with non-zero abundance."""
    return len(_positive(c))


def simpson_concentration(c: Community) -> float:
    """sum p_i^2: probability two random individuals share a species."""
    return math.fsum(p * p for p in _positive(c))


def gini_simpson(c: Community) -> float:
    """1 - sum p_i^2: probability two random individuals differ."""
    return 1.0 - simpson_concentration(c)


def renyi_entropy(c: Community, q: float) -> float:
    """Renyi entropy of order q, in nats; the Shannon limit at q = 1."""
    q = _check_order(q)
    if abs(q - 1.0) < Q_ONE_EPS:
        return shannon_entropy(c)
    return math.log(math.fsum(p**q for p in _positive(c))) / (1.0 - q)


def tsallis_entropy(c: Community, q: float) -> float:
    """Tsallis (HCDT) entropy of order q; the Shannon limit at q = 1."""
    q = _check_order(q)
    if abs(q - 1.0) < Q_ONE_EPS:
        return shannon_entropy(c)
    return (1.0 - math.fsum(p**q for p in _positive(c))) / (q - 1.0)


def hill_number(c: Community, q: float) -> float:
    """Effective number of species at order q (the Hill number).

    Always lies in [1, richness]; equals the species count exactly for a
    uniform community at every q, and doubles when every species is split
    in half.
    """
    q = _check_order(q)
    if abs(q - 1.0) < Q_ONE_EPS:
        return shannon_diversity(c)
    return math.fsum(p**q for p in _positive(c)) ** (1.0 / (1.0 - q))


def to_effective_number(index_kind: str, value: float, q: float | None = None) -> float:
    """Convert a raw index value to its effective number of species.

    ``index_kind`` names the index the value came from; ``q`` is required
    for the parametric kinds (``renyi``, ``tsallis``).  The conversions:

    ========================  =============================
    richness                  value
    shannon                   exp(value)
    gini_simpson              1 / (1 - value)
    simpson_concentration     1 / value
    renyi (any q)             exp(value)
    tsallis (q != 1)          (1 - (q - 1) value) ** (1/(1-q))
    tsallis (q = 1)           exp(value)
    ========================  =============================
    """
    if index_kind not in INDEX_KINDS:
        raise ValueError(
            f"unknown index kind {index_kind!r}; expected one of {INDEX_KINDS}"
        )
    value = float(value)
    if not math.isfinite(value):
        raise ValueOutOfRangeError(f"{index_kind} value must be finite, got {value!r}")
    if index_kind == "richness":
        if value < 1.0:
            raise ValueOutOfRangeError(f"richness must be >= 1, got {value!r}")
        return value
    if index_kind == "shannon":
        if value < 0.0:
            raise ValueOutOfRangeError(f"entropy must be >= 0, got {value!r}")
        return math.exp(value)
    if index_kind == "gini_simpson":
        if not 0.0 <= value < 1.0:
            raise ValueOutOfRangeError(
                f"Gini-Simpson values lie in [0, 1), got {value!r}"
            )
        return 1.0 / (1.0 - value)
    if index_kind == "simpson_concentration":
        if not 0.0 < value <= 1.0:
            raise ValueOutOfRangeError(
                f"Simpson concentration lies in (0, 1], got {value!r}"
            )
        return 1.0 / value
    if q is None:
        raise ValueError(f"index kind {index_kind!r} needs its order q")
    q = _check_order(q)
    if value < 0.0:
        raise ValueOutOfRangeError(f"{index_kind} entropy must be >= 0, got {value!r}")
    if index_kind == "renyi" or abs(q - 1.0) < Q_ONE_EPS:
        return math.exp(value)
    base = 1.0 - (q - 1.0) * value
    if base <= 0.0:
        raise ValueOutOfRangeError(
            f"tsallis value {value!r} is outside the order-{q} range"
        )
    return base ** (1.0 / (1.0 - q))


@dataclass(frozen=True)
class DiversityProfile:
    """Effective species number across a sweep of orders q."""

    orders: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.orders:
            raise ValueError("a diversity profile needs at least one order")
        for q, value in self.orders:
            if q < 0.0:
                raise NegativeOrderError(f"profile order {q!r} is negative")
            if value < 1.0 - 1e-9:
                raise ValueError(f"effective species number {value!r} below 1")
        by_q = sorted(self.orders)
        for (_, hi), (_, lo) in zip(by_q, by_q[1:]):
            # Hill numbers are non-increasing in q; allow float wobble only.
            if lo > hi * (1.0 + 1e-9) + 1e-12:
                raise ValueError("profile values increase with q")

    @property
    def qs(self) -> tuple[float, ...]:
        return tuple(q for q, _ in self.orders)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for _, v in self.orders)


def diversity_profile(c: Community, orders: Iterable[float]) -> DiversityProfile:
    """Sweep :func:`hill_number` over ``orders`` (each must be >= 0)."""
    qs: Sequence[float] = [_check_order(q) for q in orders]
    if not qs:
        raise ValueError("orders must be non-empty")
    return DiversityProfile(tuple((q, hill_number(c, q)) for q in qs))
