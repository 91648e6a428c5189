"""Pure numpy fallback for :mod:`maxbounds._kernels`."""
import numpy as np


def abs_max_rows(values):
    values = np.asarray(values, dtype=np.float64)
    return np.abs(values).max(axis=1)


def upcross_times(y, a, b):
    y = np.asarray(y, dtype=np.float64)
    below = np.flatnonzero(y < a)
    above = np.flatnonzero(y > b)
    out = []
    pos = 0
    targets = (below, above)
    while True:
        idx = targets[len(out) % 2]
        k = np.searchsorted(idx, pos)
        if k == len(idx):
            break
        j = int(idx[k])
        out.append(j)
        pos = j + 1
    return np.asarray(out, dtype=np.int64)


def upcross_counts(values, a, b):
    values = np.asarray(values, dtype=np.float64)
    m = values.shape[0]
    seeking_low = np.ones(m, dtype=bool)
    counts = np.zeros(m, dtype=np.int64)
    for col in values.T:
        hit_low = seeking_low & (col < a)
        hit_high = ~seeking_low & (col > b)
        counts += hit_high
        seeking_low = (seeking_low & ~hit_low) | hit_high
    return counts


def lemma3_check_rows(values, a, b, k_extra):
    values = np.asarray(values, dtype=np.float64)
    width = b - a
    checks = bad = 0
    first_bad = -1
    for i, y in enumerate(values):
        times = upcross_times(y, a, b)
        count = len(times)
        u = count // 2
        y_end = y[-1]
        for k in range(1, u + k_extra + 1):
            lo, hi = 2 * k - 2, 2 * k - 1
            y_lo = y[times[lo]] if lo < count else y_end
            y_hi = y[times[hi]] if hi < count else y_end
            lhs = width if u >= k else 0.0
            rhs = y_hi - y_lo
            if lo < count and hi >= count:
                rhs = -(y_end - y_lo) + rhs
            checks += 1
            if lhs > rhs:
                bad += 1
                if first_bad < 0:
                    first_bad = i
    return checks, bad, first_bad


def pair_moment_means(values, p):
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[1]
    out = np.zeros((n, n))
    for lag in range(1, n):
        d = np.abs(values[:, lag:] - values[:, :-lag]) ** p
        means = d.mean(axis=0)
        idx = np.arange(n - lag)
        out[idx, idx + lag] = means
        out[idx + lag, idx] = means
    return out
