"""Pure-Python Monte Carlo kernel (reference implementation).

The compiled kernel in ``_mc_cy.pyx`` mirrors this module operation for
operation; both must produce bit-identical output for the same inputs.
Keep the two in lockstep: every random draw, every floating-point
expression and its evaluation order is part of the contract.

Randomness contract
-------------------
* Trial ``t`` of a run seeded with ``seed`` uses its own SplitMix64
  stream whose initial state is ``mix64(seed XOR ((t + 1) * GOLDEN))``
  (all arithmetic mod 2**64, GOLDEN = 0x9E3779B97F4A7C15, mix64 the
  SplitMix64 output scrambler).  Streams therefore depend only on
  (seed, trial index), never on scheduling.
* Uniforms are ``(next_u64 >> 11) * 2**-53`` in [0, 1).
* A binomial draw consumes exactly one uniform (single-uniform CDF
  inversion), even in the degenerate n == 0 / p <= 0 / p >= 1 cases.
* A multinomial resample over S species consumes exactly S - 1 uniforms
  (conditional binomials in species order; the last species takes the
  remainder).

Step contract (one step of one trial)
-------------------------------------
1. Resample N individuals from the current count frequencies
   (neutral drift).
2. Draw one uniform u; a shock happens iff u < shock_rate.
3. On a shock: pick a target among the currently alive species with
   probability proportional to (count/N)**targeting_exponent (one
   uniform), remove floor(kill_fraction * count_target) individuals,
   and, if any were removed and anyone survives, resample back up to N
   from the post-shock counts.  If the shock wiped out the whole
   population the trial is dead: counts stay all-zero for good.

A species whose count reaches zero stays at zero (its resampling weight
is zero), so extinction is permanent by construction.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def _mix64(z: int) -> int:
    """SplitMix64 output scrambler (Stafford mix 13)."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class _Rng:
    """Per-trial SplitMix64 stream."""

    __slots__ = ("state",)

    def __init__(self, seed: int, trial: int):
        self.state = _mix64(seed ^ (((trial + 1) * _GOLDEN) & _MASK64))

    def uniform(self) -> float:
        s = (self.state + _GOLDEN) & _MASK64
        self.state = s
        return (_mix64(s) >> 11) * _INV_2_53


def _binomial(n: int, p: float, rng: _Rng) -> int:
    """Binomial(n, p) by single-uniform inversion of the CDF.

    Walks the probability mass upward from k = 0 using the ratio
    recurrence.  When (1-p)**n underflows, the walk starts in log space;
    the skipped lower-tail mass is below 1e-290 and can never matter
    against a 53-bit uniform.
    """
    u = rng.uniform()
    if n <= 0 or p <= 0.0:
        return 0
    if p >= 1.0:
        return n
    lp = n * math.log1p(-p)
    k = 0
    r = p / (1.0 - p)
    while lp < -708.0 and k < n:
        lp = lp + math.log(((n - k) * r) / (k + 1))
        k = k + 1
    pmf = math.exp(lp)
    cdf = pmf
    while cdf < u and k < n:
        k = k + 1
        pmf = pmf * (((n - k + 1) * r) / k)
        cdf = cdf + pmf
    return k


def _resample(dest: list, counts: list, total: int, n_draw: int, rng: _Rng) -> None:
    """Multinomial draw of ``n_draw`` individuals from weights ``counts``."""
    s = len(counts)
    n_rem = n_draw
    t_rem = total
    for i in range(s - 1):
        c = counts[i]
        if t_rem > 0:
            p = c / t_rem
        else:
            p = 0.0
        k = _binomial(n_rem, p, rng)
        dest[i] = k
        n_rem -= k
        t_rem -= c
    dest[s - 1] = n_rem


def _step(
    counts: list,
    scratch: list,
    weights: list,
    n_pop: int,
    total: int,
    shock_rate: float,
    kill_fraction: float,
    targeting_exponent: float,
    rng: _Rng,
) -> int:
    """Advance one trial by one step in place; returns the new total."""
    s = len(counts)
    if total <= 0:
        return 0
    _resample(scratch, counts, total, n_pop, rng)
    for i in range(s):
        counts[i] = scratch[i]
    total = n_pop

    u = rng.uniform()
    if u < shock_rate:
        wsum = 0.0
        last_alive = -1
        for i in range(s):
            c = counts[i]
            if c > 0:
                w = math.pow(c / n_pop, targeting_exponent)
                weights[i] = w
                wsum += w
                last_alive = i
            else:
                weights[i] = 0.0
        if wsum > 0.0:
            r = rng.uniform() * wsum
            target = last_alive
            acc = 0.0
            for i in range(s):
                w = weights[i]
                if w > 0.0:
                    acc += w
                    if r < acc:
                        target = i
                        break
            kills = int(math.floor(kill_fraction * counts[target]))
            if kills > 0:
                counts[target] -= kills
                total = n_pop - kills
                if total > 0:
                    _resample(scratch, counts, total, n_pop, rng)
                    for i in range(s):
                        counts[i] = scratch[i]
                    total = n_pop
                # else: the shock emptied the population; the trial stays
                # dead (every count is zero from here on).
    return total


def _diversity(counts: list, n_pop: int, total: int) -> float:
    """Order-1 effective species number of the counts; 0 for a dead trial."""
    if total <= 0:
        return 0.0
    h = 0.0
    for c in counts:
        if c > 0:
            pr = c / n_pop
            term = pr * math.log(pr)
            h += term
    return math.exp(-h)


def run_chunk(
    counts0,
    n_pop: int,
    shock_rate: float,
    kill_fraction: float,
    targeting_exponent: float,
    horizon: int,
    seed: int,
    trial_lo: int,
    trial_hi: int,
    extinct_acc,
    tte_acc,
    alive2_acc,
    div_acc,
) -> None:
    """Run trials [trial_lo, trial_hi) and accumulate their statistics.

    ``extinct_acc[i]`` counts trials where species i ended extinct;
    ``tte_acc[i]`` sums extinction steps (censored trials contribute
    ``horizon``); ``alive2_acc[t]`` counts (trial, step) pairs with at
    least two species alive; ``div_acc[t]`` sums the order-1 diversity.
    Step index 0 is the initial state.
    """
    s = len(counts0)
    counts = [0] * s
    scratch = [0] * s
    weights = [0.0] * s
    tte = [0] * s

    for trial in range(trial_lo, trial_hi):
        rng = _Rng(seed, trial)
        total = 0
        for i in range(s):
            counts[i] = counts0[i]
            total += counts0[i]
        alive = 0
        for i in range(s):
            if counts[i] > 0:
                alive += 1
                tte[i] = -1
            else:
                tte[i] = 0
        if alive >= 2:
            alive2_acc[0] += 1
        div_acc[0] += _diversity(counts, n_pop, total)

        for t in range(1, horizon + 1):
            total = _step(
                counts,
                scratch,
                weights,
                n_pop,
                total,
                shock_rate,
                kill_fraction,
                targeting_exponent,
                rng,
            )
            alive = 0
            for i in range(s):
                if counts[i] > 0:
                    alive += 1
                elif tte[i] < 0:
                    tte[i] = t
            if alive >= 2:
                alive2_acc[t] += 1
            div_acc[t] += _diversity(counts, n_pop, total)

        for i in range(s):
            if tte[i] < 0:
                tte_acc[i] += horizon
            else:
                extinct_acc[i] += 1
                tte_acc[i] += tte[i]


def trial_count_trajectory(
    counts0,
    n_pop: int,
    shock_rate: float,
    kill_fraction: float,
    targeting_exponent: float,
    horizon: int,
    seed: int,
    trial: int,
) -> list[tuple[int, ...]]:
    """Counts after every step of one trial (index 0 = initial state).

    Exercises exactly the same stepping code and random stream as
    :func:`run_chunk`; used by tests to check conservation and
    absorption step by step.
    """
    s = len(counts0)
    counts = list(counts0)
    scratch = [0] * s
    weights = [0.0] * s
    rng = _Rng(seed, trial)
    total = sum(counts)
    states = [tuple(counts)]
    for _ in range(horizon):
        total = _step(
            counts,
            scratch,
            weights,
            n_pop,
            total,
            shock_rate,
            kill_fraction,
            targeting_exponent,
            rng,
        )
        states.append(tuple(counts))
    return states
