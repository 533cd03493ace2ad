"""Monte Carlo survival analysis for species-abundance communities.

The model couples neutral Wright-Fisher drift with targeted shocks.  The
community is discretised to N individuals; each step resamples all N
from the current frequencies (drift) and then, with probability
``shock_rate``, an exploit-like event strikes one species - chosen among
the survivors with probability proportional to its frequency raised to
``targeting_exponent``, so dominant species attract proportionally more
fire for exponents above zero - and removes ``shock_kill_fraction`` of
its individuals (rounded down) before the population is resampled back
up to N.  A species that reaches zero never returns.

Neutral drift has a textbook analytic property used as the test oracle:
without shocks a species eventually fixes with probability equal to its
initial frequency.

Determinism: a report is a pure function of (community, model).  Trial t
draws from its own random stream derived from (seed, t) - see
``_mc_py`` for the exact derivation - and trials are aggregated in fixed
chunks of :data:`TRIAL_CHUNK` regardless of thread count, so results are
bit-identical no matter how execution is scheduled.

Two interchangeable kernels exist: a compiled one (built from
``_mc_cy.pyx``) and a pure-Python reference.  The compiled kernel is
preferred at import time when present; set ``ECODIV_KERNEL=py`` or
``ECODIV_KERNEL=cy`` to force a choice.  Both produce bit-identical
output; the pure kernel is typically two orders of magnitude slower
(see ``benchmarks/bench_kernels.py``).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..community import Community
from ..errors import InvalidModelError
from ..indices import hill_number
from . import _mc_py

try:
    from . import _mc_cy
except ImportError:  # extension not built; fall back to the reference kernel
    _mc_cy = None

#: Trials per aggregation chunk.  Fixed so that the float summation tree
#: of per-chunk results never depends on the worker count.
TRIAL_CHUNK = 64


def _select_kernel():
    forced = os.environ.get("ECODIV_KERNEL", "").strip().lower()
    if forced == "py":
        return _mc_py, "python"
    if forced == "cy":
        if _mc_cy is None:
            raise ImportError(
                "ECODIV_KERNEL=cy but the compiled kernel is not available"
            )
        return _mc_cy, "compiled"
    if forced:
        raise ValueError(f"ECODIV_KERNEL must be 'py' or 'cy', got {forced!r}")
    if _mc_cy is not None:
        return _mc_cy, "compiled"
    return _mc_py, "python"


_KERNEL, _KERNEL_NAME = _select_kernel()


def kernel_name() -> str:
    """Which Monte Carlo kernel this process selected at import."""
    return _KERNEL_NAME


@dataclass(frozen=True)
class SurvivalModel:
    """Parameters of the drift-plus-shocks simulator."""

    population_size: int
    shock_rate: float = 0.0
    shock_kill_fraction: float = 0.5
    targeting_exponent: float = 0.0
    horizon: int = 1000
    trials: int = 10000
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.population_size, int) or self.population_size < 2:
            raise InvalidModelError(
                f"population_size must be an integer >= 2, "
                f"got {self.population_size!r}"
            )
        for field in ("shock_rate", "shock_kill_fraction"):
            value = getattr(self, field)
            if not (isinstance(value, (int, float)) and 0.0 <= value <= 1.0):
                raise InvalidModelError(f"{field} must lie in [0, 1], got {value!r}")
        tau = self.targeting_exponent
        if not (isinstance(tau, (int, float)) and math.isfinite(tau) and tau >= 0.0):
            raise InvalidModelError(
                f"targeting_exponent must be finite and >= 0, got {tau!r}"
            )
        for field in ("horizon", "trials"):
            value = getattr(self, field)
            if not isinstance(value, int) or value < 1:
                raise InvalidModelError(
                    f"{field} must be a positive integer, got {value!r}"
                )
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise InvalidModelError(
                f"seed must be a 64-bit unsigned integer, got {self.seed!r}"
            )


@dataclass(frozen=True)
class SpeciesFate:
    """Per-species outcome across all trials."""

    label: str
    extinction_probability: float
    #: Mean first step at which the count hit zero; trials still alive at
    #: the horizon enter the mean at the horizon value and set ``censored``.
    mean_time_to_extinction: float
    censored: bool


@dataclass(frozen=True)
class SurvivalReport:
    """Aggregated simulation outcome; bit-reproducible from its inputs."""

    per_species: tuple[SpeciesFate, ...]
    #: (step, fraction of trials with >= 2 species alive), step 0 first.
    survival_curve: tuple[tuple[int, float], ...]
    #: Mean order-1 effective species number per step (dead trials count 0).
    diversity_trajectory: tuple[float, ...]
    trials_run: int
    seed: int

    @property
    def ecosystem_survival_probability(self) -> float:
        """Fraction of trials with >= 2 species alive at the horizon."""
        return self.survival_curve[-1][1]

    def to_dict(self) -> dict:
        return {
            "per_species": [
                {
                    "label": f.label,
                    "extinction_probability": f.extinction_probability,
                    "mean_time_to_extinction": f.mean_time_to_extinction,
                    "censored": f.censored,
                }
                for f in self.per_species
            ],
            "survival_curve": [
                {"step": step, "fraction_alive2": frac}
                for step, frac in self.survival_curve
            ],
            "diversity_trajectory": list(self.diversity_trajectory),
            "trials_run": self.trials_run,
            "seed": self.seed,
        }


def initial_counts(c: Community, n_pop: int) -> np.ndarray:
    """Discretise abundances to integer counts by largest remainder.

    Preserves the total exactly and minimises per-species bias; ties in
    the fractional parts break toward earlier species.
    """
    shares = [n_pop * a for _, a in c.species]
    base = [math.floor(x) for x in shares]
    remainder = n_pop - sum(base)
    order = sorted(range(len(base)), key=lambda i: (-(shares[i] - base[i]), i))
    for i in order[:remainder]:
        base[i] += 1
    return np.array(base, dtype=np.int64)


def _run_trials(counts0, model: SurvivalModel, threads: int | None, kernel):
    n_chunks = (model.trials + TRIAL_CHUNK - 1) // TRIAL_CHUNK
    s = len(counts0)
    steps = model.horizon + 1

    def one_chunk(index: int):
        lo = index * TRIAL_CHUNK
        hi = min(model.trials, lo + TRIAL_CHUNK)
        extinct = np.zeros(s, dtype=np.int64)
        tte = np.zeros(s, dtype=np.int64)
        alive2 = np.zeros(steps, dtype=np.int64)
        div = np.zeros(steps, dtype=np.float64)
        kernel.run_chunk(
            counts0,
            model.population_size,
            model.shock_rate,
            model.shock_kill_fraction,
            model.targeting_exponent,
            model.horizon,
            model.seed,
            lo,
            hi,
            extinct,
            tte,
            alive2,
            div,
        )
        return extinct, tte, alive2, div

    if threads is None:
        threads = os.cpu_count() or 1
    threads = max(1, min(int(threads), n_chunks))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        chunks = list(pool.map(one_chunk, range(n_chunks)))

    # Fold in ascending chunk order: integer sums are exact and the float
    # additions happen in one fixed order whatever the thread count was.
    extinct = np.zeros(s, dtype=np.int64)
    tte = np.zeros(s, dtype=np.int64)
    alive2 = np.zeros(steps, dtype=np.int64)
    div = np.zeros(steps, dtype=np.float64)
    for c_extinct, c_tte, c_alive2, c_div in chunks:
        extinct += c_extinct
        tte += c_tte
        alive2 += c_alive2
        div += c_div
    return extinct, tte, alive2, div


def _simulate_with_kernel(
    c: Community, model: SurvivalModel, threads: int | None, kernel
) -> SurvivalReport:
    if not any(a > 0.0 for _, a in c.species):
        raise InvalidModelError(f"community {c.name!r} has no non-zero species")
    counts0 = initial_counts(c, model.population_size)
    extinct, tte, alive2, div = _run_trials(counts0, model, threads, kernel)
    trials = model.trials
    per_species = tuple(
        SpeciesFate(
            label=label,
            extinction_probability=int(extinct[i]) / trials,
            mean_time_to_extinction=int(tte[i]) / trials,
            censored=int(extinct[i]) < trials,
        )
        for i, (label, _) in enumerate(c.species)
    )
    curve = tuple((t, int(alive2[t]) / trials) for t in range(model.horizon + 1))
    trajectory = tuple(float(div[t]) / trials for t in range(model.horizon + 1))
    return SurvivalReport(
        per_species=per_species,
        survival_curve=curve,
        diversity_trajectory=trajectory,
        trials_run=trials,
        seed=model.seed,
    )


def simulate(
    c: Community, model: SurvivalModel, threads: int | None = None
) -> SurvivalReport:
    """Estimate extinction and survival probabilities for ``c``.

    ``threads`` bounds the worker pool (default: all available cores);
    it affects wall time only, never the report.

    Note that discretisation truncates rare species: with N individuals,
    anything below roughly 1/(2N) of the population may start at count
    zero and be reported extinct at step 0.  Pick N large enough to
    resolve the smallest share you care about.
    """
    return _simulate_with_kernel(c, model, threads, _KERNEL)


def survival_vs_diversity_sweep(
    communities: list[Community],
    model: SurvivalModel,
    threads: int | None = None,
) -> list[tuple[float, float]]:
    """Initial order-1 diversity vs ecosystem survival, community by community.

    Every community is simulated under the same model (including the same
    seed), so the sweep isolates the effect of the starting distribution.
    Output order matches input order.
    """
    if not communities:
        raise InvalidModelError("sweep needs at least one community")
    pairs = []
    for c in communities:
        report = simulate(c, model, threads=threads)
        pairs.append((hill_number(c, 1.0), report.ecosystem_survival_probability))
    return pairs
