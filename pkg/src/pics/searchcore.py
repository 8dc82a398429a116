"""Tokenizer, inverted index over captions and tags, and ranked retrieval.

Caption-field terms for a record come from its caption, or from the
display-name stem when it was never captioned, so readable-named images
stay searchable. Tag matches outweigh caption matches because human
labels are treated as curated ground truth.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .catalog import Catalog, catalog_digest
from .errors import EmptyQuery, IoError, ParseError, StaleIndex

INDEX_FORMAT = "pics-index"
INDEX_VERSION = 1

TAG_WEIGHT = 2.0
CAPTION_WEIGHT = 1.0

STOPWORDS = frozenset(
    "a an the of in on at to and or with is are it its for by from".split()
)

MIN_TOKEN_LENGTH = 2
PLURAL_MIN_LENGTH = 4

_SPLIT_RE = re.compile(r"[^0-9A-Za-z]+")


@dataclass
class Posting:
    id: str
    field: str  # "caption" | "tag"
    tf: int


@dataclass
class InvertedIndex:
    terms: dict[str, list[Posting]]
    doc_count: int
    built_from: str


@dataclass
class Query:
    raw: str
    terms: list[str]


@dataclass
class RankedResult:
    id: str
    display_name: str
    caption: str | None
    tags: list[str]
    matched: list[str]
    score: float


def normalize_term(token: str) -> str:
    """Fold trailing plural-s on tokens of 4+ chars (never after a double s)."""
    if len(token) >= PLURAL_MIN_LENGTH and token.endswith("s") and not token.endswith("ss"):
        return token[:-1]
    return token


def tokenize(text: str) -> list[str]:
    """Split on non-alphanumerics and keep normalized content words.

    Drops pure digits, tokens shorter than 2 chars, and stopwords; keeps
    duplicates and order so callers can count term frequency.
    """
    terms = []
    for token in _SPLIT_RE.split(text):
        token = token.lower()
        if len(token) < MIN_TOKEN_LENGTH or token.isdigit() or token in STOPWORDS:
            continue
        terms.append(normalize_term(token))
    return terms


def _display_stem(display_name: str) -> str:
    dot = display_name.rfind(".")
    return display_name[:dot] if dot > 0 else display_name


def record_field_terms(record) -> tuple[list[str], list[str]]:
    """(caption-field terms, tag-field terms) for one catalog record."""
    caption_text = record.caption if record.caption is not None else _display_stem(record.display_name)
    caption_terms = tokenize(caption_text)
    tag_terms = [term for tag in record.tags for term in tokenize(tag)]
    return caption_terms, tag_terms


def build_index(catalog: Catalog) -> InvertedIndex:
    """Pure function of the catalog; repeated builds are identical."""
    terms: dict[str, list[Posting]] = {}
    for record_id in sorted(catalog.records):
        record = catalog.records[record_id]
        caption_terms, tag_terms = record_field_terms(record)
        for field_name, field_terms in (("caption", caption_terms), ("tag", tag_terms)):
            counts: dict[str, int] = {}
            for term in field_terms:
                counts[term] = counts.get(term, 0) + 1
            for term, tf in counts.items():
                terms.setdefault(term, []).append(Posting(record_id, field_name, tf))
    for postings in terms.values():
        postings.sort(key=lambda p: (p.id, p.field))
    return InvertedIndex(
        terms=terms,
        doc_count=len(catalog.records),
        built_from=catalog_digest(catalog),
    )


def parse_query(raw: str) -> Query:
    """Tokenize raw query text, deduplicating by first occurrence."""
    terms = list(dict.fromkeys(tokenize(raw)))
    if not terms:
        raise EmptyQuery(f"no searchable terms in {raw!r}")
    return Query(raw=raw, terms=terms)


def search(
    index: InvertedIndex,
    catalog: Catalog,
    query: Query,
    limit: int,
    tag_weight: float = TAG_WEIGHT,
    caption_weight: float = CAPTION_WEIGHT,
) -> list[RankedResult]:
    """Rank records matching at least one query term.

    Score per record sums tag_weight * tag tf + caption_weight * caption tf
    over matched terms. Order: matched-term count desc, score desc,
    display_name asc, id asc.
    """
    if index.built_from != catalog_digest(catalog):
        raise StaleIndex("index was built from a different catalog state")
    per_record: dict[str, dict[str, float]] = {}
    for term in query.terms:
        for posting in index.terms.get(term, []):
            scores = per_record.setdefault(posting.id, {})
            weight = tag_weight if posting.field == "tag" else caption_weight
            scores[term] = scores.get(term, 0.0) + weight * posting.tf

    results = []
    for record_id, term_scores in per_record.items():
        record = catalog.records[record_id]
        matched = [t for t in query.terms if t in term_scores]
        results.append(
            RankedResult(
                id=record_id,
                display_name=record.display_name,
                caption=record.caption,
                tags=list(record.tags),
                matched=matched,
                score=sum(term_scores.values()),
            )
        )
    results.sort(key=lambda r: (-len(r.matched), -r.score, r.display_name, r.id))
    return results[: max(0, limit)]


def save_index(index: InvertedIndex, file: Path | str) -> None:
    """Write the index as one JSON object, terms sorted, postings id-sorted."""
    file = Path(file)
    obj = {
        "format": INDEX_FORMAT,
        "version": INDEX_VERSION,
        "built_from": index.built_from,
        "doc_count": index.doc_count,
        "terms": {
            term: [[p.id, p.field, p.tf] for p in index.terms[term]]
            for term in sorted(index.terms)
        },
    }
    data = json.dumps(obj, ensure_ascii=False, separators=(",", ":")).encode("utf-8") + b"\n"
    try:
        fd, tmp_name = tempfile.mkstemp(dir=file.parent, prefix=file.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(data)
            os.replace(tmp_name, file)
        except BaseException:
            os.unlink(tmp_name)
            raise
    except OSError as exc:
        raise IoError(f"cannot write index {file}: {exc}") from exc


def load_index(file: Path | str) -> InvertedIndex:
    file = Path(file)
    try:
        text = file.read_text("utf-8")
    except OSError as exc:
        raise IoError(f"cannot read index {file}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad index file: {exc}") from exc
    if not isinstance(obj, dict) or obj.get("format") != INDEX_FORMAT:
        raise ParseError(f"not a {INDEX_FORMAT} file")
    if obj.get("version") != INDEX_VERSION:
        raise ParseError(f"unsupported version: {obj.get('version')!r}")
    try:
        terms = {
            term: [Posting(str(pid), str(field_name), int(tf)) for pid, field_name, tf in postings]
            for term, postings in obj["terms"].items()
        }
        return InvertedIndex(
            terms=terms,
            doc_count=int(obj["doc_count"]),
            built_from=str(obj["built_from"]),
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"bad index structure: {exc}") from exc
