"""Sparse variational Kalman filtering over scalar natural-parameter tracks.

A track is a single (topic, word) state beta that performs Brownian
motion in continuous time: between timestamps s and t its variance grows
by v * (t - s).  Pseudo-observations beta_hat of the state are Gaussian
with variance v_hat and exist only at steps where the word was actually
seen; other steps propagate the prediction unchanged.

The forward pass is the scalar Kalman filter written in gain form,

    m_t = g_t m_{t-1} + (1 - g_t) beta_hat_t,   g_t = v_hat / (P + v_hat)
    V_t = g_t P,                                P = V_{t-1} + v Delta_t

and the backward pass is the matching fixed-interval smoother

    m~_{t-1} = w m_{t-1} + (1 - w) m~_t,        w = v Delta_t / (V_{t-1} + v Delta_t)
    V~_{t-1} = V_{t-1} + (V_{t-1} / (V_{t-1} + v Delta_t))^2 (V~_t - V_{t-1} - v Delta_t)

with m~_T = m_T and V~_T = V_T.  The prior (m0, V0) applies at the first
timestamp of the track; callers that need drift before the first
observation fold it into V0.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatchError, TimeOrderError, ParameterError


@dataclass(frozen=True)
class DriftConfig:
    """Brownian drift rate (per unit time) and the track prior."""

    process_variance: float
    prior_mean: float = 0.0
    prior_variance: float = 1.0

    def __post_init__(self):
        # zero drift is allowed so static reductions are exactly testable
        if self.process_variance < 0.0:
            raise ParameterError("process_variance must be >= 0")
        if self.prior_variance <= 0.0:
            raise ParameterError("prior_variance must be > 0")


@dataclass(frozen=True)
class ObservationTrack:
    """Timestamps, pseudo-observations and their variances for one track.

    ``present[t]`` marks steps that carry an observation; ``beta_hat``
    values at absent steps are ignored.  ``obs_variance`` may be given
    as one scalar for all steps.
    """

    timestamps: np.ndarray
    beta_hat: np.ndarray
    obs_variance: np.ndarray
    present: np.ndarray

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=float)
        if ts.ndim != 1 or ts.size == 0:
            raise ParameterError("timestamps must be a nonempty 1-d sequence")
        if np.any(np.diff(ts) <= 0.0):
            raise TimeOrderError("timestamps must be strictly increasing")
        beta = np.asarray(self.beta_hat, dtype=float)
        present = np.asarray(self.present, dtype=bool)
        ov = np.broadcast_to(np.asarray(self.obs_variance, dtype=float), ts.shape).copy()
        if beta.shape != ts.shape or present.shape != ts.shape:
            raise ShapeMismatchError("beta_hat and present must align with timestamps")
        if np.any(ov <= 0.0):
            raise ParameterError("obs_variance entries must be > 0")
        if np.any(~np.isfinite(beta[present])):
            raise ParameterError("beta_hat must be finite at present steps")
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "beta_hat", beta)
        object.__setattr__(self, "obs_variance", ov)
        object.__setattr__(self, "present", present)

    def __len__(self):
        return self.timestamps.size


@dataclass(frozen=True)
class KalmanPosterior:
    forward_mean: np.ndarray
    forward_var: np.ndarray
    smoothed_mean: np.ndarray
    smoothed_var: np.ndarray


@dataclass(frozen=True)
class WordCounts:
    """Word counts per step; row t gives n_{t,w} and totals are n_t."""

    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=float)
        if c.ndim != 2:
            raise ShapeMismatchError("counts must be steps x words")
        if np.any(c < 0):
            raise ParameterError("counts must be nonnegative")
        object.__setattr__(self, "counts", c)

    @property
    def totals(self):
        return self.counts.sum(axis=1)


def forward_steps(timestamps, beta_hat, obs_variance, present, cfg, prior_mean=None, prior_var=None):
    """Vectorized filter: arrays shaped (steps, ...) over any number of tracks.

    Returns (means, variances, pred_means, pred_vars); the prediction
    arrays hold the one-step-ahead state (before the update) used by the
    lower bound.  Scalar use is the (steps,) special case.
    """
    shape = beta_hat.shape[1:]
    m_prev = np.array(np.broadcast_to(cfg.prior_mean if prior_mean is None else prior_mean, shape), dtype=float)
    v_prev = np.array(np.broadcast_to(cfg.prior_variance if prior_var is None else prior_var, shape), dtype=float)

    n = beta_hat.shape[0]
    means = np.empty_like(beta_hat, dtype=float)
    variances = np.empty_like(beta_hat, dtype=float)
    pred_means = np.empty_like(beta_hat, dtype=float)
    pred_vars = np.empty_like(beta_hat, dtype=float)
    for t in range(n):
        delta = timestamps[t] - timestamps[t - 1] if t > 0 else 0.0
        p = v_prev + cfg.process_variance * delta
        pred_means[t] = m_prev
        pred_vars[t] = p
        obs = present[t]
        gain = p / (p + obs_variance[t])
        beta = np.where(obs, beta_hat[t], 0.0)  # absent values never used
        means[t] = np.where(obs, m_prev + gain * (beta - m_prev), m_prev)
        variances[t] = np.where(obs, (1.0 - gain) * p, p)
        m_prev, v_prev = means[t], variances[t]
    return means, variances, pred_means, pred_vars


def backward_steps(timestamps, fwd_means, fwd_vars, cfg):
    """Vectorized fixed-interval smoother matching ``forward_steps``."""
    n = fwd_means.shape[0]
    sm = np.array(fwd_means, dtype=float)
    sv = np.array(fwd_vars, dtype=float)
    for t in range(n - 1, 0, -1):
        delta = timestamps[t] - timestamps[t - 1]
        denom = fwd_vars[t - 1] + cfg.process_variance * delta
        w = (cfg.process_variance * delta) / denom
        sm[t - 1] = w * fwd_means[t - 1] + (1.0 - w) * sm[t]
        ratio = fwd_vars[t - 1] / denom
        sv[t - 1] = fwd_vars[t - 1] + ratio * ratio * (sv[t] - denom)
    return sm, sv


def kalman_forward(track, cfg):
    """Filtered means and variances for one track."""
    means, variances, _, _ = forward_steps(
        track.timestamps, track.beta_hat, track.obs_variance, track.present, cfg
    )
    return means, variances


def kalman_backward(track, forward, cfg):
    """Smoothed means and variances given the forward output for the same track."""
    fwd_means, fwd_vars = (np.asarray(a, dtype=float) for a in forward)
    if fwd_means.shape != track.timestamps.shape or fwd_vars.shape != track.timestamps.shape:
        raise ShapeMismatchError("forward output does not align with the track")
    return backward_steps(track.timestamps, fwd_means, fwd_vars, cfg)


def kalman_posterior(track, cfg):
    """Convenience: run filter and smoother, return a KalmanPosterior."""
    fwd = kalman_forward(track, cfg)
    sm, sv = kalman_backward(track, fwd, cfg)
    return KalmanPosterior(fwd[0], fwd[1], sm, sv)


def kalman_lower_bound(tracks, posteriors, counts, cfg):
    """Lower bound (nats) on the likelihood of the pseudo-observations.

    ``tracks`` and ``posteriors`` map word index -> ObservationTrack /
    KalmanPosterior over a shared timestamp grid; ``counts`` is the
    steps x words count matrix over the same word order as
    ``sorted(tracks)``.  Assembles three pieces per step:

    * the word-likelihood bound
      sum_w n_{t,w} m~_{t,w} - n_t log sum_w exp(m~_{t,w} + V~_{t,w}/2),
    * minus the expected observation log-density
      -1/2 log(2 pi v_hat) - ((beta_hat - m~)^2 + V~) / (2 v_hat)
      at steps where the word is present,
    * plus the one-step predictive log q(beta_hat_t | beta_hat_{1:t-1}),
      a Gaussian with mean m_{t-1} and variance V_{t-1} + v Delta + v_hat,
      again only at present steps.
    """
    words = sorted(tracks)
    for w in words:
        if w not in posteriors:
            raise ShapeMismatchError(f"no posterior for word {w!r}")
    c = counts.counts
    if c.shape[1] != len(words):
        raise ShapeMismatchError("counts width does not match the number of tracks")

    n_steps = c.shape[0]
    sm = np.column_stack([posteriors[w].smoothed_mean for w in words])
    sv = np.column_stack([posteriors[w].smoothed_var for w in words])
    if sm.shape[0] != n_steps:
        raise ShapeMismatchError("posterior length does not match counts")

    totals = counts.totals
    log_norm = np.log(np.exp(sm + 0.5 * sv).sum(axis=1))
    bound = float((c * sm).sum() - (totals * log_norm).sum())

    for j, w in enumerate(words):
        track = tracks[w]
        post = posteriors[w]
        ts = track.timestamps
        for t in range(n_steps):
            if not track.present[t]:
                continue
            v_hat = track.obs_variance[t]
            beta = track.beta_hat[t]
            # expected log-density of the observation under the smoothed state
            expected = -0.5 * math.log(2.0 * math.pi * v_hat) - (
                (beta - post.smoothed_mean[t]) ** 2 + post.smoothed_var[t]
            ) / (2.0 * v_hat)
            bound -= expected
            # innovations term: predictive of beta_hat given the past
            if t == 0:
                pred_mean, pred_var = cfg.prior_mean, cfg.prior_variance
            else:
                delta = ts[t] - ts[t - 1]
                pred_mean = post.forward_mean[t - 1]
                pred_var = post.forward_var[t - 1] + cfg.process_variance * delta
            s = pred_var + v_hat
            bound += -0.5 * math.log(2.0 * math.pi * s) - (beta - pred_mean) ** 2 / (2.0 * s)
    return bound
