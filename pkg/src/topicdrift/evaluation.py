"""Evaluation harness: per-word likelihood series, smoothing, timelines,
confusion metrics and wall-clock scaling runs."""

import time
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

UNDEFINED = None  # marker for ratios with an empty denominator


@dataclass
class EvalSeries:
    """Per-document per-word log-likelihood points plus a smoothed view."""

    points: list      # (doc id, timestamp, per-word loglik in nats)
    smoothed: list

    def values(self):
        return [p[2] for p in self.points]


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fn: int
    fp: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fn, self.fp, self.tn) < 0:
            raise ParameterError("confusion counts must be nonnegative")


def per_word_series(per_doc):
    """Normalize (id, ts, total loglik, word count) records to per-word nats."""
    points = []
    for doc_id, ts, total, word_count in per_doc:
        if word_count <= 0:
            raise ParameterError(f"word count must be positive for {doc_id!r}")
        points.append((doc_id, ts, total / word_count))
    return EvalSeries(points, [p[2] for p in points])


def moving_average(values, window):
    """Trailing mean; partial windows at the start keep the length."""
    if window < 1:
        raise ParameterError("window must be >= 1")
    values = np.asarray(values, dtype=float)
    prefix = np.concatenate([[0.0], np.cumsum(values)])
    out = np.empty(values.size)
    for i in range(values.size):
        lo = max(0, i + 1 - window)
        out[i] = (prefix[i + 1] - prefix[lo]) / (i + 1 - lo)
    return out.tolist()


def smooth_series(series, window):
    return EvalSeries(series.points, moving_average(series.values(), window))


def timeline_assign(docs, topic_weights, target_topic, threshold):
    """Flag documents whose weight on the target topic reaches the threshold."""
    if len(docs) != len(topic_weights):
        raise ParameterError("topic_weights must align with docs")
    flags = []
    for weights in topic_weights:
        weights = np.asarray(weights, dtype=float)
        if not (0 <= target_topic < weights.size):
            raise ParameterError(f"topic {target_topic} out of range")
        flags.append(bool(weights[target_topic] >= threshold))
    return flags


def confusion_from_assignments(assigned, labels):
    tp = sum(1 for a, l in zip(assigned, labels) if a and l)
    fn = sum(1 for a, l in zip(assigned, labels) if not a and l)
    fp = sum(1 for a, l in zip(assigned, labels) if a and not l)
    tn = sum(1 for a, l in zip(assigned, labels) if not a and not l)
    return ConfusionMatrix(tp, fn, fp, tn)


def confusion_metrics(m):
    """(accuracy, recall, precision); undefined ratios come back as None."""
    total = m.tp + m.fn + m.fp + m.tn
    if total == 0:
        raise ParameterError("confusion matrix is empty")
    accuracy = (m.tp + m.tn) / total
    recall = m.tp / (m.tp + m.fn) if (m.tp + m.fn) > 0 else UNDEFINED
    precision = m.tp / (m.tp + m.fp) if (m.tp + m.fp) > 0 else UNDEFINED
    return accuracy, recall, precision


def _train_once(model_kind, docs, config):
    from .drifting_topics import CidtmConfig, DriftingTopicModel, prequential_run as cidtm_run
    from .fixed_k_dtm import train_cdtm
    from .kalman import DriftConfig
    from .online_hdp import HdpHyper, OnlineHdp, prequential_run as ohdp_run

    seed = config.get("seed", 42)
    batch_size = config.get("batch_size", 16)
    vocab_size = config["vocab_size"]
    hyper = config.get("hyper") or HdpHyper(
        K_corpus=config.get("K_corpus", 20), T_doc=config.get("T_doc", 8)
    )
    if model_kind == "ohdp":
        model = OnlineHdp(hyper, vocab_size, len(docs), seed=seed)
        ohdp_run(model, docs, batch_size)
    elif model_kind == "cidtm":
        cfg = config.get("cidtm_config") or CidtmConfig(hyper=hyper)
        model = DriftingTopicModel(cfg, vocab_size, len(docs), seed=seed)
        cidtm_run(model, docs, batch_size)
    elif model_kind == "cdtm":
        rng = np.random.default_rng(seed)
        drift = DriftConfig(config.get("drift_v", 1e-6))
        train_cdtm(docs, config.get("K", 10), drift, config.get("sweeps", 2), rng,
                   vocab_size=vocab_size)
    else:
        raise ParameterError(f"unknown model kind {model_kind!r}")


def runtime_benchmark(model_kind, docs, prefix_sizes, config, warmup=True):
    """Wall-clock seconds to train from scratch on each corpus prefix.

    Prefix sizes must be ascending and within the corpus.  A discarded
    warm-up run on the smallest prefix excludes interpreter and cache
    effects; all timed runs are sequential in one process.
    """
    sizes = list(prefix_sizes)
    if sizes != sorted(sizes) or (sizes and sizes[-1] > len(docs)):
        raise ParameterError("prefix sizes must be ascending and <= corpus size")
    if warmup and sizes:
        _train_once(model_kind, docs[: min(sizes[0], 200)], config)
    results = []
    for size in sizes:
        start = time.perf_counter()
        _train_once(model_kind, docs[:size], config)
        results.append((size, time.perf_counter() - start))
    return results


def write_series_tsv(series, path):
    """TSV: doc_id, timestamp, pwll_nats, pwll_ma100."""
    smoothed = series.smoothed
    if len(smoothed) != len(series.points):
        raise ParameterError("smoothed length must match points")
    with open(path, "w", encoding="utf-8") as f:
        f.write("doc_id\ttimestamp\tpwll_nats\tpwll_ma100\n")
        for (doc_id, ts, value), ma in zip(series.points, smoothed):
            f.write(f"{doc_id}\t{ts!r}\t{value!r}\t{ma!r}\n")


def write_benchmark_tsv(rows, path):
    """TSV: model, corpus_size, wall_seconds."""
    with open(path, "w", encoding="utf-8") as f:
        f.write("model\tcorpus_size\twall_seconds\n")
        for model, size, seconds in rows:
            f.write(f"{model}\t{size}\t{seconds!r}\n")
