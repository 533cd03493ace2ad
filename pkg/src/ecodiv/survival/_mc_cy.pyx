# cython: language_level=3
# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Monte Carlo kernel.

Operation-for-operation mirror of ``_mc_py``; see that module for the
randomness and stepping contract.  Both kernels must return bit-identical
results: keep every expression, cast and evaluation order in sync, and
build with floating-point contraction disabled.
"""

import numpy as np

from libc.math cimport exp, floor, log, log1p, pow

ctypedef unsigned long long u64
ctypedef long long i64

cdef u64 _GOLDEN = 0x9E3779B97F4A7C15
cdef double _INV_2_53 = 1.0 / 9007199254740992.0


cdef inline u64 _mix64(u64 z) noexcept nogil:
    z = (z ^ (z >> 30)) * <u64>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <u64>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline u64 _stream_state(u64 seed, u64 trial) noexcept nogil:
    return _mix64(seed ^ ((trial + 1) * _GOLDEN))


cdef inline double _uniform(u64* state) noexcept nogil:
    state[0] = state[0] + _GOLDEN
    return <double>(_mix64(state[0]) >> 11) * _INV_2_53


cdef i64 _binomial(i64 n, double p, u64* state) noexcept nogil:
    cdef double u = _uniform(state)
    cdef double lp, r, pmf, cdf
    cdef i64 k
    if n <= 0 or p <= 0.0:
        return 0
    if p >= 1.0:
        return n
    lp = <double>n * log1p(-p)
    k = 0
    r = p / (1.0 - p)
    while lp < -708.0 and k < n:
        lp = lp + log((<double>(n - k) * r) / <double>(k + 1))
        k = k + 1
    pmf = exp(lp)
    cdf = pmf
    while cdf < u and k < n:
        k = k + 1
        pmf = pmf * ((<double>(n - k + 1) * r) / <double>k)
        cdf = cdf + pmf
    return k


cdef void _resample(i64* dest, i64* counts, i64 s, i64 total, i64 n_draw,
                    u64* state) noexcept nogil:
    cdef i64 n_rem = n_draw
    cdef i64 t_rem = total
    cdef i64 i, k, c
    cdef double p
    for i in range(s - 1):
        c = counts[i]
        if t_rem > 0:
            p = <double>c / <double>t_rem
        else:
            p = 0.0
        k = _binomial(n_rem, p, state)
        dest[i] = k
        n_rem -= k
        t_rem -= c
    dest[s - 1] = n_rem


cdef i64 _step(i64* counts, i64* scratch, double* weights, i64 s, i64 n_pop,
               i64 total, double shock_rate, double kill_fraction,
               double targeting_exponent, u64* state) noexcept nogil:
    cdef double u, w, wsum, r, acc
    cdef i64 i, c, target, last_alive, kills
    if total <= 0:
        return 0
    _resample(scratch, counts, s, total, n_pop, state)
    for i in range(s):
        counts[i] = scratch[i]
    total = n_pop

    u = _uniform(state)
    if u < shock_rate:
        wsum = 0.0
        last_alive = -1
        for i in range(s):
            c = counts[i]
            if c > 0:
                w = pow(<double>c / <double>n_pop, targeting_exponent)
                weights[i] = w
                wsum += w
                last_alive = i
            else:
                weights[i] = 0.0
        if wsum > 0.0:
            r = _uniform(state) * wsum
            target = last_alive
            acc = 0.0
            for i in range(s):
                w = weights[i]
                if w > 0.0:
                    acc += w
                    if r < acc:
                        target = i
                        break
            kills = <i64>floor(kill_fraction * <double>counts[target])
            if kills > 0:
                counts[target] -= kills
                total = n_pop - kills
                if total > 0:
                    _resample(scratch, counts, s, total, n_pop, state)
                    for i in range(s):
                        counts[i] = scratch[i]
                    total = n_pop
    return total


cdef double _diversity(i64* counts, i64 s, i64 n_pop, i64 total) noexcept nogil:
    cdef double h, pr, term
    cdef i64 i, c
    if total <= 0:
        return 0.0
    h = 0.0
    for i in range(s):
        c = counts[i]
        if c > 0:
            pr = <double>c / <double>n_pop
            term = pr * log(pr)
            h += term
    return exp(-h)


def run_chunk(counts0, long long n_pop, double shock_rate,
              double kill_fraction, double targeting_exponent,
              long long horizon, unsigned long long seed,
              long long trial_lo, long long trial_hi,
              extinct_acc, tte_acc, alive2_acc, div_acc):
    """See ``_mc_py.run_chunk``; identical semantics, compiled."""
    cdef i64[::1] counts0_v = np.ascontiguousarray(counts0, dtype=np.int64)
    cdef i64[::1] extinct_v = extinct_acc
    cdef i64[::1] tte_acc_v = tte_acc
    cdef i64[::1] alive2_v = alive2_acc
    cdef double[::1] div_v = div_acc

    cdef i64 s = counts0_v.shape[0]
    counts_arr = np.zeros(s, dtype=np.int64)
    scratch_arr = np.zeros(s, dtype=np.int64)
    weights_arr = np.zeros(s, dtype=np.float64)
    tte_arr = np.zeros(s, dtype=np.int64)
    cdef i64[::1] counts = counts_arr
    cdef i64[::1] scratch = scratch_arr
    cdef double[::1] weights = weights_arr
    cdef i64[::1] tte = tte_arr

    cdef u64 state
    cdef i64 trial, total, alive, i, t

    with nogil:
        for trial in range(trial_lo, trial_hi):
            state = _stream_state(seed, <u64>trial)
            total = 0
            for i in range(s):
                counts[i] = counts0_v[i]
                total += counts0_v[i]
            alive = 0
            for i in range(s):
                if counts[i] > 0:
                    alive += 1
                    tte[i] = -1
                else:
                    tte[i] = 0
            if alive >= 2:
                alive2_v[0] += 1
            div_v[0] += _diversity(&counts[0], s, n_pop, total)

            for t in range(1, horizon + 1):
                total = _step(&counts[0], &scratch[0], &weights[0], s, n_pop,
                              total, shock_rate, kill_fraction,
                              targeting_exponent, &state)
                alive = 0
                for i in range(s):
                    if counts[i] > 0:
                        alive += 1
                    elif tte[i] < 0:
                        tte[i] = t
                if alive >= 2:
                    alive2_v[t] += 1
                div_v[t] += _diversity(&counts[0], s, n_pop, total)

            for i in range(s):
                if tte[i] < 0:
                    tte_acc_v[i] += horizon
                else:
                    extinct_v[i] += 1
                    tte_acc_v[i] += tte[i]
