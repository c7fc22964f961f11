"""Scalar filter/smoother against textbook oracles, plus the lower bound."""

import math

import numpy as np
import pytest

from helpers import dense_kalman_filter, rts_smoother
from topicdrift.errors import ParameterError, ShapeMismatchError, TimeOrderError
from topicdrift.kalman import (
    DriftConfig,
    KalmanPosterior,
    ObservationTrack,
    WordCounts,
    kalman_backward,
    kalman_forward,
    kalman_lower_bound,
    kalman_posterior,
)


def make_track(timestamps, values, obs_var, present=None):
    values = np.asarray(values, dtype=float)
    present = np.ones(len(timestamps), dtype=bool) if present is None else np.asarray(present)
    return ObservationTrack(np.asarray(timestamps, float), values, obs_var, present)


class TestForward:
    def test_tiny_observation_noise_pins_to_observations(self):
        track = make_track([0.0, 1.0, 4.0], [1.0, -2.0, 0.5], 1e-12)
        means, variances = kalman_forward(track, DriftConfig(0.1))
        np.testing.assert_allclose(means, track.beta_hat, atol=1e-9)
        assert np.all(variances < 1e-10)

    def test_huge_observation_noise_ignores_observations(self):
        cfg = DriftConfig(0.1, prior_mean=0.3, prior_variance=2.0)
        track = make_track([0.0, 1.0, 4.0], [10.0, -20.0, 5.0], 1e12)
        means, variances = kalman_forward(track, cfg)
        np.testing.assert_allclose(means, 0.3, atol=1e-9)
        np.testing.assert_allclose(variances, [2.0, 2.1, 2.4], rtol=1e-9)

    def test_matches_dense_oracle_on_irregular_gaps(self):
        ts = np.cumsum([0.0, 1.0, 3.0, 0.5, 10.0])
        track = make_track(ts, [0.2, -0.4, 1.0, 0.3, -1.5], 0.2)
        cfg = DriftConfig(0.1, prior_mean=0.0, prior_variance=1.0)
        means, variances = kalman_forward(track, cfg)
        o_means, o_vars = dense_kalman_filter(ts, track.beta_hat, 0.2, track.present, 0.1, 0.0, 1.0)
        np.testing.assert_allclose(means, o_means, atol=1e-10)
        np.testing.assert_allclose(variances, o_vars, atol=1e-10)

    def test_absent_steps_propagate_prediction(self):
        ts = [0.0, 2.0, 5.0]
        track = make_track(ts, [1.0, 99.0, 1.0], 0.5, present=[True, False, True])
        cfg = DriftConfig(0.25, prior_variance=1.0)
        means, variances = kalman_forward(track, cfg)
        assert means[1] == means[0]
        assert variances[1] == pytest.approx(variances[0] + 0.25 * 2.0, rel=1e-12)

    def test_variance_never_exceeds_prediction(self):
        rng = np.random.default_rng(0)
        ts = np.cumsum(rng.uniform(0.1, 3.0, size=12))
        track = make_track(ts, rng.normal(size=12), 0.3)
        cfg = DriftConfig(0.2)
        _, variances = kalman_forward(track, cfg)
        prev = cfg.prior_variance
        for t in range(len(ts)):
            growth = 0.2 * (ts[t] - ts[t - 1]) if t else 0.0
            assert variances[t] <= prev + growth + 1e-15
            prev = variances[t]

    def test_depends_only_on_v_times_delta(self):
        rng = np.random.default_rng(1)
        ts = np.cumsum(rng.uniform(0.5, 2.0, size=8))
        values = rng.normal(size=8)
        a = kalman_forward(make_track(ts, values, 0.4), DriftConfig(0.3))
        b = kalman_forward(make_track(2.0 * ts, values, 0.4), DriftConfig(0.15))
        np.testing.assert_allclose(a[0], b[0], atol=1e-13)
        np.testing.assert_allclose(a[1], b[1], atol=1e-13)

    def test_rejects_unordered_timestamps(self):
        with pytest.raises(TimeOrderError):
            make_track([0.0, 2.0, 2.0], [0, 0, 0], 0.1)


class TestBackward:
    def test_terminal_equals_forward(self):
        track = make_track([0.0, 1.0, 3.0], [1.0, 0.0, -1.0], 0.2)
        cfg = DriftConfig(0.1)
        fwd = kalman_forward(track, cfg)
        sm, sv = kalman_backward(track, fwd, cfg)
        assert sm[-1] == fwd[0][-1]
        assert sv[-1] == fwd[1][-1]

    def test_vanishing_gap_copies_smoothed_value(self):
        ts = [0.0, 1.0, 1.0 + 1e-15]
        track = make_track(ts, [0.5, -0.5, 2.0], 0.2)
        cfg = DriftConfig(0.1)
        fwd = kalman_forward(track, cfg)
        sm, _ = kalman_backward(track, fwd, cfg)
        assert sm[1] == pytest.approx(sm[2], abs=1e-9)

    def test_matches_rts_oracle(self):
        rng = np.random.default_rng(2)
        ts = np.cumsum(rng.uniform(0.2, 4.0, size=5))
        track = make_track(ts, rng.normal(size=5), 0.35)
        cfg = DriftConfig(0.07, prior_mean=0.2, prior_variance=0.8)
        fwd = kalman_forward(track, cfg)
        sm, sv = kalman_backward(track, fwd, cfg)
        o_sm, o_sv = rts_smoother(ts, fwd[0], fwd[1], 0.07)
        np.testing.assert_allclose(sm, o_sm, atol=1e-10)
        np.testing.assert_allclose(sv, o_sv, atol=1e-10)

    def test_interior_means_bridge_endpoints(self):
        ts = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
        present = [True, False, False, False, True]
        track = make_track(ts, [0.0, 0, 0, 0, 4.0], 1e-6, present=present)
        cfg = DriftConfig(1e-3, prior_variance=10.0)
        post = kalman_posterior(track, cfg)
        interior = post.smoothed_mean[1:-1]
        assert np.all(interior >= post.smoothed_mean[0] - 1e-9)
        assert np.all(interior <= post.smoothed_mean[-1] + 1e-9)
        assert np.all(np.diff(post.smoothed_mean) >= -1e-9)

    def test_length_mismatch_rejected(self):
        track = make_track([0.0, 1.0], [0.0, 1.0], 0.1)
        with pytest.raises(ShapeMismatchError):
            kalman_backward(track, (np.zeros(3), np.ones(3)), DriftConfig(0.1))


class TestSparseVsDense:
    def test_tracked_words_agree_with_materialized_vocabulary(self):
        """Tracks kept only for observed words equal the all-words run."""
        rng = np.random.default_rng(3)
        vocab, steps = 20, 10
        ts = np.cumsum(rng.uniform(0.1, 2.0, size=steps))
        observed = rng.random((steps, vocab)) < 0.3
        values = rng.normal(size=(steps, vocab))
        cfg = DriftConfig(0.15)

        for w in range(vocab):
            dense = make_track(ts, values[:, w], 0.25, present=observed[:, w])
            dense_post = kalman_posterior(dense, cfg)
            seen = observed[:, w]
            if not seen.any():
                # sparse side holds no track: state stays at the prior
                np.testing.assert_allclose(dense_post.forward_mean, cfg.prior_mean)
                continue
            sparse_steps = np.where(seen)[0]
            sparse = make_track(ts[sparse_steps], values[sparse_steps, w], 0.25)
            # the sparse prior sits at the first observation: fold in the
            # drift accumulated since the grid start
            sparse_cfg = DriftConfig(
                cfg.process_variance,
                prior_mean=cfg.prior_mean,
                prior_variance=cfg.prior_variance
                + cfg.process_variance * (ts[sparse_steps[0]] - ts[0]),
            )
            sparse_post = kalman_posterior(sparse, sparse_cfg)
            np.testing.assert_allclose(
                sparse_post.forward_mean, dense_post.forward_mean[sparse_steps], atol=1e-12
            )
            np.testing.assert_allclose(
                sparse_post.forward_var, dense_post.forward_var[sparse_steps], atol=1e-12
            )


def degenerate_posterior(n_steps, mean):
    m = np.full(n_steps, mean)
    return KalmanPosterior(m.copy(), np.zeros(n_steps), m.copy(), np.zeros(n_steps))


class TestLowerBound:
    def test_single_word_with_zero_variance_is_zero(self):
        ts = np.array([0.0, 1.0, 2.0])
        track = make_track(ts, [0.7, 0.7, 0.7], 0.1, present=[False, False, False])
        counts = WordCounts(np.array([[4.0], [2.0], [9.0]]))
        post = degenerate_posterior(3, 0.7)
        bound = kalman_lower_bound({0: track}, {0: post}, counts, DriftConfig(0.1))
        assert bound == pytest.approx(0.0, abs=1e-12)

    def test_absent_words_add_no_observation_terms(self):
        ts = np.array([0.0, 1.0])
        cfg = DriftConfig(0.1)
        base_track = make_track(ts, [0.5, -0.5], 0.2)
        base_post = kalman_posterior(base_track, cfg)
        silent_track = make_track(ts, [0.0, 0.0], 0.2, present=[False, False])
        silent_post = kalman_posterior(silent_track, cfg)
        counts = WordCounts(np.array([[3.0, 0.0], [1.0, 0.0]]))
        with_silent = kalman_lower_bound(
            {0: base_track, 1: silent_track}, {0: base_post, 1: silent_post}, counts, cfg
        )
        # recompute after changing the silent track's values: nothing may move
        silent_track2 = make_track(ts, [9.0, -9.0], 0.2, present=[False, False])
        with_silent2 = kalman_lower_bound(
            {0: base_track, 1: silent_track2}, {0: base_post, 1: silent_post}, counts, cfg
        )
        assert with_silent == pytest.approx(with_silent2, abs=1e-12)

    def test_bound_below_monte_carlo_expectation(self):
        """Word term stays below E_q log p(w|beta); observation term matches MC."""
        rng = np.random.default_rng(4)
        ts = np.array([0.0, 1.0, 3.0])
        cfg = DriftConfig(0.2)
        tracks = {
            0: make_track(ts, [0.8, 0.2, -0.1], 0.3),
            1: make_track(ts, [-0.5, 0.1, 0.9], 0.3),
        }
        posts = {w: kalman_posterior(tracks[w], cfg) for w in tracks}
        counts = WordCounts(np.array([[3.0, 1.0], [2.0, 2.0], [1.0, 4.0]]))

        n_samples = 100_000
        sm = np.stack([posts[w].smoothed_mean for w in (0, 1)], axis=1)
        sv = np.stack([posts[w].smoothed_var for w in (0, 1)], axis=1)
        draws = rng.normal(sm, np.sqrt(sv), size=(n_samples, 3, 2))
        log_norm = np.log(np.exp(draws).sum(axis=2))
        word_ll = (counts.counts[None] * draws).sum(axis=(1, 2)) - (
            counts.totals[None] * log_norm
        ).sum(axis=1)
        mc_mean = word_ll.mean()
        mc_se = word_ll.std(ddof=1) / math.sqrt(n_samples)

        word_term = float(
            (counts.counts * sm).sum()
            - (counts.totals * np.log(np.exp(sm + 0.5 * sv).sum(axis=1))).sum()
        )
        assert word_term <= mc_mean + 3 * mc_se

        # closed-form expected observation log-density equals its MC estimate
        for w in (0, 1):
            obs_ll = (
                -0.5 * np.log(2 * np.pi * 0.3)
                - (tracks[w].beta_hat[None] - draws[:, :, w]) ** 2 / (2 * 0.3)
            ).sum(axis=1)
            closed = sum(
                -0.5 * math.log(2 * math.pi * 0.3)
                - ((tracks[w].beta_hat[t] - posts[w].smoothed_mean[t]) ** 2 + posts[w].smoothed_var[t])
                / (2 * 0.3)
                for t in range(3)
            )
            se = obs_ll.std(ddof=1) / math.sqrt(n_samples)
            assert closed == pytest.approx(obs_ll.mean(), abs=3 * se)

    def test_missing_posterior_rejected(self):
        ts = np.array([0.0, 1.0])
        track = make_track(ts, [0.0, 0.0], 0.1)
        counts = WordCounts(np.array([[1.0], [1.0]]))
        with pytest.raises(ShapeMismatchError):
            kalman_lower_bound({0: track}, {}, counts, DriftConfig(0.1))


class TestValidation:
    def test_negative_process_variance_rejected(self):
        with pytest.raises(ParameterError):
            DriftConfig(-0.1)

    def test_zero_drift_is_allowed_and_static(self):
        track = make_track([0.0, 5.0, 9.0], [1.0, 1.0, 1.0], 0.1)
        cfg = DriftConfig(0.0)
        post = kalman_posterior(track, cfg)
        assert np.all(np.diff(post.smoothed_mean) == 0.0)

    def test_nonpositive_obs_variance_rejected(self):
        with pytest.raises(ParameterError):
            make_track([0.0, 1.0], [0.0, 0.0], 0.0)
