"""From raw newswire files to the canonical streaming corpus.

Parses the bundled SGML and line-record fixtures, builds a vocabulary,
normalizes documents, and round-trips them through the canonical
format.
"""

from pathlib import Path

from topicdrift.corpus import (
    build_vocabulary,
    corpus_statistics,
    parse_bbc,
    parse_reuters,
    read_canonical,
    to_documents,
    write_canonical,
)

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
OUT = Path(__file__).resolve().parent / "_corpus_demo.jsonl"

print("== SGML newswire ==")
parsed = parse_reuters((FIXTURES / "sample_reuters.sgm").read_bytes())
print(f"records: {len(parsed.documents)} parsed, {parsed.skipped} skipped")
first = parsed.documents[0]
print(f"first record: id={first.id!r} date={first.timestamp_text!r}")
print(f"title: {first.title!r}")

vocab = build_vocabulary(parsed.documents, min_doc_freq=1)
stats = corpus_statistics(parsed.documents, vocab)
print(f"vocabulary: {stats['vocabulary_size']} terms, "
      f"mean unique terms/doc {stats['mean_unique_terms']:.1f}")

docs = to_documents(parsed.documents, vocab, format_hint="reuters")
print(f"normalized: {len(docs)} documents, first timestamp {docs[0].timestamp}")

write_canonical(docs, OUT)
assert read_canonical(OUT) == docs
print(f"canonical round-trip through {OUT.name}: exact")
OUT.unlink()

print("\n== line records ==")
with open(FIXTURES / "sample_bbc.txt", encoding="utf-8") as f:
    parsed = parse_bbc(f)
for doc in parsed.documents:
    print(f"  {doc.timestamp_text}  related={len(doc.related_ids)}  {doc.title[:40]}...")
