"""Independent oracles used by the tests.

Everything here is implemented from first principles, separately from
the package code it checks: a textbook predict/update Kalman filter and
RTS smoother, the closed-form conjugate Normal-Gamma posterior and
evidence, and exact CRP partition probabilities by enumeration.
"""

import math

import numpy as np
from scipy.special import gammaln


def dense_kalman_filter(timestamps, observations, obs_var, present, v, m0, v0):
    """Textbook scalar Kalman filter in predict/update form."""
    means, variances = [], []
    m, p = m0, v0
    for t in range(len(timestamps)):
        if t > 0:
            p = p + v * (timestamps[t] - timestamps[t - 1])
        if present[t]:
            r = obs_var[t] if np.ndim(obs_var) else obs_var
            k_gain = p / (p + r)
            m = m + k_gain * (observations[t] - m)
            p = (1.0 - k_gain) * p
        means.append(m)
        variances.append(p)
    return np.array(means), np.array(variances)


def rts_smoother(timestamps, fwd_means, fwd_vars, v):
    """Textbook Rauch-Tung-Striebel smoother for the same scalar model."""
    n = len(timestamps)
    sm = np.array(fwd_means, dtype=float)
    sv = np.array(fwd_vars, dtype=float)
    for t in range(n - 2, -1, -1):
        q = v * (timestamps[t + 1] - timestamps[t])
        p_pred = fwd_vars[t] + q
        c = fwd_vars[t] / p_pred
        sm[t] = fwd_means[t] + c * (sm[t + 1] - fwd_means[t])
        sv[t] = fwd_vars[t] + c * c * (sv[t + 1] - p_pred)
    return sm, sv


def normal_gamma_posterior(data, mu0, lambda0, a0, b0):
    """Exact conjugate posterior parameters (mu_n, lambda_n, a_n, b_n)."""
    data = np.asarray(data, dtype=float)
    n = data.size
    xbar = data.mean()
    lambda_n = lambda0 + n
    mu_n = (lambda0 * mu0 + n * xbar) / lambda_n
    a_n = a0 + 0.5 * n
    ss = float(((data - xbar) ** 2).sum())
    b_n = b0 + 0.5 * (ss + lambda0 * n * (xbar - mu0) ** 2 / lambda_n)
    return mu_n, lambda_n, a_n, b_n


def normal_gamma_evidence(data, mu0, lambda0, a0, b0):
    """Exact log marginal likelihood of the conjugate Normal-Gamma model."""
    data = np.asarray(data, dtype=float)
    n = data.size
    _, lambda_n, a_n, b_n = normal_gamma_posterior(data, mu0, lambda0, a0, b0)
    return float(
        gammaln(a_n) - gammaln(a0)
        + a0 * math.log(b0) - a_n * math.log(b_n)
        + 0.5 * (math.log(lambda0) - math.log(lambda_n))
        - 0.5 * n * math.log(2.0 * math.pi)
    )


def set_partitions(items):
    """All set partitions of a list (Bell-number enumeration)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for smaller in set_partitions(rest):
        for i in range(len(smaller)):
            yield smaller[:i] + [[first] + smaller[i]] + smaller[i + 1 :]
        yield [[first]] + smaller


def crp_partition_logprob(blocks, alpha, n):
    """log P(partition) under CRP(alpha) for a partition given as blocks."""
    k = len(blocks)
    logp = k * math.log(alpha)
    for block in blocks:
        logp += gammaln(len(block))  # (|B| - 1)!
    logp -= sum(math.log(alpha + i) for i in range(n))
    return logp


def exact_crp_shape_distribution(n, alpha):
    """Exact probability of each partition shape (sorted block sizes)."""
    shapes = {}
    for partition in set_partitions(list(range(n))):
        shape = tuple(sorted(len(b) for b in partition))
        p = math.exp(crp_partition_logprob(partition, alpha, n))
        shapes[shape] = shapes.get(shape, 0.0) + p
    return shapes
