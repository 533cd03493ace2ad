"""Diversity analytics in effective-number-of-species units.

Quantifies how concentrated a categorical population is - operating
system market shares, supercomputer OS families, or any other
species-abundance distribution - using true diversities (Hill numbers),
brackets the measurement across classification granularities, discounts
it for shared-code kinship, simulates extinction risk, and watches
series of snapshots for diversity drops.
"""

from .community import (
    Community,
    CountTable,
    Species,
    Taxonomy,
    aggregate,
    drop_zeros,
    make_community,
    split_all,
)
from .granularity import DiversityInterval, diversity_interval
from .indices import (
    DiversityProfile,
    diversity_profile,
    gini_simpson,
    hill_number,
    renyi_entropy,
    richness,
    shannon_diversity,
    shannon_entropy,
    simpson_concentration,
    to_effective_number,
    tsallis_entropy,
)
from .monitor import Alarm, AlarmPolicy, EcosystemSeries, Snapshot
from .similarity import (
    SimilarityMatrix,
    similarity_diversity,
    similarity_from_shared_code,
)
from .survival import (
    SpeciesFate,
    SurvivalModel,
    SurvivalReport,
    simulate,
    survival_vs_diversity_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "Alarm",
    "AlarmPolicy",
    "Community",
    "CountTable",
    "DiversityInterval",
    "DiversityProfile",
    "EcosystemSeries",
    "SimilarityMatrix",
    "Snapshot",
    "Species",
    "SpeciesFate",
    "SurvivalModel",
    "SurvivalReport",
    "Taxonomy",
    "aggregate",
    "diversity_interval",
    "diversity_profile",
    "drop_zeros",
    "gini_simpson",
    "hill_number",
    "make_community",
    "renyi_entropy",
    "richness",
    "shannon_diversity",
    "shannon_entropy",
    "similarity_diversity",
    "similarity_from_shared_code",
    "simpson_concentration",
    "simulate",
    "split_all",
    "survival_vs_diversity_sweep",
    "to_effective_number",
    "tsallis_entropy",
]
