"""Corpus ingestion: newswire parsers, tokenization, vocabulary, batching.

Two input layouts are supported:

* SGML-style newswire files: records wrapped in ``<REUTERS ...>`` /
  ``</REUTERS>`` with ``<DATE>``, ``<TITLE>`` and ``<BODY>`` elements;
  timestamps look like ``26-FEB-1987 15:01:01.79``.
* Line-record news files: one story per line, tab-separated positional
  fields ``ID  Date  Title  Body  [Related ...]``; timestamps look like
  ``2010/08/09 15:51:53``.

Normalized documents are timestamped sparse bags of words over a fixed
vocabulary, written to a line-delimited JSON canonical format that
round-trips bit-exactly.
"""

import json
import re
from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timezone

from .errors import (
    ConfigurationError,
    CorpusParseError,
    ParameterError,
    TimestampParseError,
)
from .stopwords import STOPWORDS


@dataclass(frozen=True)
class RawDocument:
    id: str
    timestamp_text: str
    title: str
    body: str
    related_ids: tuple = ()


@dataclass(frozen=True)
class Document:
    """Timestamped sparse bag of words over vocabulary indices."""

    id: str
    timestamp: float
    counts: dict  # word index -> count
    total_tokens: int
    related: tuple = ()


@dataclass
class Vocabulary:
    term_to_index: dict
    index_to_term: list
    document_frequency: dict

    @property
    def size(self):
        return len(self.index_to_term)

    @property
    def total_terms(self):
        return len(self.index_to_term)


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True
    min_token_length: int = 2
    stopword_list: frozenset = STOPWORDS
    strip_non_alphanumeric: bool = True

    def __post_init__(self):
        if self.min_token_length < 1:
            raise ConfigurationError("min_token_length must be >= 1")


@dataclass
class ParseResult:
    documents: list
    skipped: int = 0


_REUTERS_OPEN = re.compile(r"<REUTERS\b[^>]*>")
_NEWID = re.compile(r'NEWID="([^"]*)"')
_TOKEN = re.compile(r"[a-z0-9]+")
_TOKEN_CASED = re.compile(r"[A-Za-z0-9]+")

_REUTERS_TS = re.compile(
    r"\s*(\d{1,2})-([A-Za-z]{3})-(\d{4})\s+(\d{1,2}):(\d{2}):(\d{2})(\.\d+)?\s*$"
)
_BBC_TS = re.compile(r"\s*(\d{4})/(\d{1,2})/(\d{1,2})\s+(\d{1,2}):(\d{2}):(\d{2})\s*$")

_MONTHS = {
    "JAN": 1, "FEB": 2, "MAR": 3, "APR": 4, "MAY": 5, "JUN": 6,
    "JUL": 7, "AUG": 8, "SEP": 9, "OCT": 10, "NOV": 11, "DEC": 12,
}


def _decode_entities(text):
    # &amp; last so it never re-expands
    return text.replace("&lt;", "<").replace("&gt;", ">").replace("&amp;", "&")


def _element(record, name):
    start = record.find(f"<{name}>")
    if start < 0:
        return None
    end = record.find(f"</{name}>", start)
    if end < 0:
        return None
    return record[start + len(name) + 2 : end]


def parse_reuters(sgml_bytes):
    """Parse SGML newswire records; keeps only Date, Title and Body.

    Records missing a date or carrying an empty body are counted as
    skipped.  An opening record tag without its closing tag raises
    ``CorpusParseError`` with the byte offset of the offending tag.
    """
    text = sgml_bytes.decode("latin-1") if isinstance(sgml_bytes, (bytes, bytearray)) else sgml_bytes
    docs = []
    skipped = 0
    opens = list(_REUTERS_OPEN.finditer(text))
    for i, open_match in enumerate(opens):
        limit = opens[i + 1].start() if i + 1 < len(opens) else len(text)
        close = text.find("</REUTERS>", open_match.end(), limit)
        if close < 0:
            raise CorpusParseError(
                f"record opened at byte {open_match.start()} never closes",
                offset=open_match.start(),
            )
        record = text[open_match.end() : close]
        date = _element(record, "DATE")
        body = _element(record, "BODY")
        if date is None or body is None or not body.strip():
            skipped += 1
            continue
        title = _element(record, "TITLE") or ""
        newid = _NEWID.search(open_match.group(0))
        doc_id = newid.group(1) if newid else str(len(docs) + skipped + 1)
        docs.append(
            RawDocument(
                id=doc_id,
                timestamp_text=date.strip(),
                title=_decode_entities(title.strip()),
                body=_decode_entities(body.strip()),
            )
        )
    return ParseResult(docs, skipped)


def parse_bbc(record_lines):
    """Parse line records: ID, Date, Title, Body, then zero or more Related ids.

    Lines missing ID or Date are counted as skipped; blank lines are
    ignored entirely.
    """
    docs = []
    skipped = 0
    for line in record_lines:
        line = line.rstrip("\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) < 2 or not fields[0].strip() or not fields[1].strip():
            skipped += 1
            continue
        doc_id = fields[0].strip()
        date = fields[1].strip()
        title = fields[2] if len(fields) > 2 else ""
        body = fields[3] if len(fields) > 3 else ""
        related = tuple(f.strip() for f in fields[4:] if f.strip())
        docs.append(RawDocument(doc_id, date, title, body, related))
    return ParseResult(docs, skipped)


def parse_timestamp(text, format_hint):
    """UTC epoch seconds (fraction retained) for a hinted timestamp format."""
    if format_hint == "reuters":
        m = _REUTERS_TS.match(text)
        if not m:
            raise TimestampParseError(f"not a newswire timestamp: {text!r}")
        day, mon, year, hh, mm, ss, frac = m.groups()
        month = _MONTHS.get(mon.upper())
        if month is None:
            raise TimestampParseError(f"unknown month in {text!r}")
        dt = datetime(int(year), month, int(day), int(hh), int(mm), int(ss), tzinfo=timezone.utc)
        return dt.timestamp() + (float(frac) if frac else 0.0)
    if format_hint == "bbc":
        m = _BBC_TS.match(text)
        if not m:
            raise TimestampParseError(f"not a line-record timestamp: {text!r}")
        year, month, day, hh, mm, ss = (int(g) for g in m.groups())
        return datetime(year, month, day, hh, mm, ss, tzinfo=timezone.utc).timestamp()
    raise TimestampParseError(f"unknown format hint {format_hint!r}")


def detect_timestamp_format(text):
    if _REUTERS_TS.match(text):
        return "reuters"
    if _BBC_TS.match(text):
        return "bbc"
    raise TimestampParseError(f"cannot recognize timestamp {text!r}")


def tokenize(body, cfg=TokenizerConfig()):
    """Bag-of-words counts for one text under the tokenizer settings."""
    if cfg.lowercase:
        body = body.lower()
    if cfg.strip_non_alphanumeric:
        tokens = (_TOKEN if cfg.lowercase else _TOKEN_CASED).findall(body)
    else:
        tokens = body.split()
    counts = Counter(
        t for t in tokens if len(t) >= cfg.min_token_length and t not in cfg.stopword_list
    )
    return dict(counts)


def build_vocabulary(docs, cfg=TokenizerConfig(), min_doc_freq=2):
    """Dense term indices for all terms reaching the document-frequency floor."""
    if not docs:
        raise ParameterError("docs must be nonempty")
    df = Counter()
    for doc in docs:
        df.update(tokenize(doc.body, cfg).keys())
    kept = sorted(t for t, f in df.items() if f >= min_doc_freq)
    if not kept:
        raise ConfigurationError(
            f"no term reaches document frequency {min_doc_freq}; lower min_doc_freq"
        )
    return Vocabulary(
        term_to_index={t: i for i, t in enumerate(kept)},
        index_to_term=kept,
        document_frequency={t: df[t] for t in kept},
    )


def corpus_statistics(docs, vocab, cfg=TokenizerConfig()):
    """Summary statistics of the tokenized corpus against a vocabulary."""
    uniques = []
    for doc in docs:
        terms = tokenize(doc.body, cfg)
        uniques.append(sum(1 for t in terms if t in vocab.term_to_index))
    return {
        "documents": len(docs),
        "vocabulary_size": vocab.size,
        "mean_unique_terms": sum(uniques) / len(uniques) if uniques else 0.0,
    }


def to_documents(docs, vocab, cfg=TokenizerConfig(), format_hint=None):
    """Normalize raw documents onto the vocabulary, sorted by (timestamp, id).

    Out-of-vocabulary tokens are dropped; documents left with no
    in-vocabulary tokens are excluded.
    """
    out = []
    for doc in docs:
        hint = format_hint or detect_timestamp_format(doc.timestamp_text)
        ts = parse_timestamp(doc.timestamp_text, hint)
        counts = {}
        for term, count in tokenize(doc.body, cfg).items():
            idx = vocab.term_to_index.get(term)
            if idx is not None:
                counts[idx] = count
        if not counts:
            continue
        out.append(
            Document(
                id=doc.id,
                timestamp=ts,
                counts=counts,
                total_tokens=sum(counts.values()),
                related=tuple(doc.related_ids),
            )
        )
    out.sort(key=lambda d: (d.timestamp, d.id))
    return out


def batch_iter(docs, batch_size):
    """Consecutive, order-preserving batches; the last one may be short."""
    if batch_size < 1:
        raise ParameterError("batch_size must be >= 1")
    for start in range(0, len(docs), batch_size):
        yield docs[start : start + batch_size]


def write_canonical(docs, path, titles=None):
    """Write documents as line-delimited JSON records."""
    titles = titles or {}
    with open(path, "w", encoding="utf-8") as f:
        for doc in docs:
            record = {
                "id": doc.id,
                "ts": doc.timestamp,
                "title": titles.get(doc.id, ""),
                "body_counts": {str(k): v for k, v in sorted(doc.counts.items())},
                "related": list(doc.related),
            }
            f.write(json.dumps(record, sort_keys=True) + "\n")


def read_canonical(path):
    docs = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            record = json.loads(line)
            counts = {int(k): int(v) for k, v in record["body_counts"].items()}
            docs.append(
                Document(
                    id=record["id"],
                    timestamp=float(record["ts"]),
                    counts=counts,
                    total_tokens=sum(counts.values()),
                    related=tuple(record.get("related", ())),
                )
            )
    return docs


def write_vocabulary(vocab, path):
    """One term per line; the line number is the term index."""
    with open(path, "w", encoding="utf-8") as f:
        for term in vocab.index_to_term:
            f.write(term + "\n")


def read_vocabulary(path):
    with open(path, "r", encoding="utf-8") as f:
        terms = [line.rstrip("\n") for line in f if line.strip()]
    return Vocabulary(
        term_to_index={t: i for i, t in enumerate(terms)},
        index_to_term=terms,
        document_frequency={},
    )
