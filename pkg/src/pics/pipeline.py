"""End-to-end ingest: scan, hash, classify names, caption, rename, tag, save.

Captioning fans out over a bounded worker pool, but every catalog mutation
and file rename is applied serially in scan order, so two runs with the
same inputs and a deterministic backend produce identical catalogs.
"""

from __future__ import annotations

import csv
import os
import re
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .captioner import (
    BackendConfig,
    Readability,
    caption_image,
    classify_name_llm,
    hash_file,
    make_caption_job,
)
from .catalog import Catalog, ImageRecord, load_catalog, save_catalog, upsert
from .errors import CaptionUnusable, IoError, MissingColumn, ParseError, PicsError

IMAGE_EXTENSIONS = {".jpg", ".jpeg", ".png", ".gif", ".webp"}

# Name-readability thresholds: a stem is non-readable when it has no
# alphanumerics, or >= 90% of its alphanumerics are hex digits, or letters
# are < 50% of all characters, or it has fewer than 2 letter-runs of 3+.
HEX_FRACTION_LIMIT = 0.9
LETTER_FRACTION_MIN = 0.5
MIN_LETTER_RUNS = 2
LETTER_RUN_RE = re.compile(r"[A-Za-z]{3,}")

_HEX_DIGITS = set("0123456789abcdefABCDEF")
_NON_ALNUM_RE = re.compile(r"[^0-9A-Za-z]+")

MAX_SLUG_LENGTH = 100
MAX_SLUG_WORDS = 10


@dataclass
class AnnotationTable:
    """Lookup from lowercased filename (with and without extension) to tags."""

    entries: dict[str, list[str]]
    source_file: Path
    row_keys: list[tuple[str, ...]] = field(default_factory=list)


@dataclass
class RenamePlan:
    moves: list[tuple[str, str, str]] = field(default_factory=list)  # (id, from, to)
    skipped: list[tuple[str, str]] = field(default_factory=list)  # (id, reason)


@dataclass
class PipelineReport:
    scanned: int = 0
    deduplicated: int = 0
    captioned: int = 0
    renamed: int = 0
    tags_attached: int = 0
    annotation_rows_unmatched: int = 0
    errors: list[tuple[str, str, str]] = field(default_factory=list)  # (path, kind, message)
    plan: RenamePlan = field(default_factory=RenamePlan)


@dataclass
class PipelineConfig:
    dir: Path
    catalog_file: Path
    backend: BackendConfig
    annotations_file: Path | None = None
    name_column: str = "image_name"
    tags_column: str = "tags"
    readability_mode: str = "heuristic"
    dry_run: bool = False
    jobs: int = 4


def classify_readability(stem: str) -> Readability:
    """Deterministic heuristic verdict on a filename stem (extension removed)."""
    alnum = [c for c in stem if c.isalnum()]
    if not alnum:
        return Readability.NON_READABLE
    hex_count = sum(1 for c in alnum if c in _HEX_DIGITS)
    if hex_count / len(alnum) >= HEX_FRACTION_LIMIT:
        return Readability.NON_READABLE
    letters = sum(1 for c in stem if c.isalpha())
    if letters / len(stem) < LETTER_FRACTION_MIN:
        return Readability.NON_READABLE
    if len(LETTER_RUN_RE.findall(stem)) < MIN_LETTER_RUNS:
        return Readability.NON_READABLE
    return Readability.READABLE


def slugify(caption: str) -> str:
    """Filesystem-safe stem from a cleaned caption: lowercase words joined by _."""
    words = _NON_ALNUM_RE.sub(" ", caption).split()
    slug = "_".join(word.lower() for word in words[:MAX_SLUG_WORDS])
    if not slug:
        raise CaptionUnusable(f"caption has no usable characters: {caption!r}")
    if len(slug) > MAX_SLUG_LENGTH:
        cut = slug.rfind("_", 0, MAX_SLUG_LENGTH + 1)
        slug = slug[:cut] if cut > 0 else slug[:MAX_SLUG_LENGTH]
    return slug


def resolve_collision(stem: str, taken: set[str]) -> str:
    """First free name among stem, stem_2, stem_3, ..."""
    if stem not in taken:
        return stem
    n = 2
    while f"{stem}_{n}" in taken:
        n += 1
    return f"{stem}_{n}"


def _strip_extension(name: str) -> str:
    dot = name.rfind(".")
    return name[:dot] if dot > 0 else name


def _normalize_tags(raw: str) -> list[str]:
    tags: list[str] = []
    for part in raw.split(";"):
        tag = part.strip().lower()
        if tag and tag not in tags:
            tags.append(tag)
    return tags


def parse_annotations(
    file: Path | str,
    name_column: str = "image_name",
    tags_column: str = "tags",
) -> AnnotationTable:
    """Read a header-first CSV of filename -> ;-separated tags."""
    file = Path(file)
    try:
        text = file.read_text("utf-8-sig")
    except OSError as exc:
        raise IoError(f"cannot read annotations {file}: {exc}") from exc

    reader = csv.reader(text.splitlines())
    header = next(reader, None)
    if header is None:
        raise ParseError("annotation file has no header row", line=1)
    columns = [name.strip() for name in header]
    if name_column not in columns:
        raise MissingColumn(name_column)
    if tags_column not in columns:
        raise MissingColumn(tags_column)
    name_idx = columns.index(name_column)
    tags_idx = columns.index(tags_column)

    table = AnnotationTable(entries={}, source_file=file)
    for row_number, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) <= max(name_idx, tags_idx):
            raise ParseError(f"row has {len(row)} fields, expected {len(columns)}", line=row_number)
        name = row[name_idx].strip()
        if not name:
            raise ParseError(f"empty {name_column} value", line=row_number)
        tags = _normalize_tags(row[tags_idx])
        key = name.lower()
        keys = (key,) if _strip_extension(key) == key else (key, _strip_extension(key))
        table.row_keys.append(keys)
        for k in keys:
            existing = table.entries.setdefault(k, [])
            for tag in tags:
                if tag not in existing:
                    existing.append(tag)
    return table


def join_annotations(catalog: Catalog, table: AnnotationTable) -> tuple[Catalog, int]:
    """Union table tags into matching records; count rows that matched nothing.

    Records match by original_name, case-insensitively and with or without
    the extension. Existing tags keep their position; new ones append.
    """
    used_keys: set[str] = set()
    for record in catalog.records.values():
        name_key = record.original_name.lower()
        for key in dict.fromkeys((name_key, _strip_extension(name_key))):
            tags = table.entries.get(key)
            if tags is None:
                continue
            used_keys.add(key)
            for tag in tags:
                if tag not in record.tags:
                    record.tags.append(tag)
    unmatched = sum(1 for keys in table.row_keys if not any(k in used_keys for k in keys))
    return catalog, unmatched


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _classify(config: PipelineConfig, stem: str) -> Readability:
    if config.readability_mode == "llm":
        try:
            return classify_name_llm(config.backend, stem)
        except PicsError:
            pass
    return classify_readability(stem)


def run_pipeline(config: PipelineConfig) -> PipelineReport:
    """Ingest one directory into the catalog; per-file failures never abort."""
    directory = Path(config.dir)
    if not directory.is_dir():
        raise IoError(f"not a directory: {directory}")
    catalog_file = Path(config.catalog_file)
    if catalog_file.exists():
        catalog = load_catalog(catalog_file)
    else:
        catalog = Catalog(root=catalog_file.parent)

    report = PipelineReport()
    files = sorted(
        path for path in directory.iterdir()
        if path.is_file() and path.suffix.lower() in IMAGE_EXTENSIONS
    )
    report.scanned = len(files)

    known_digests = set(catalog.records)
    new_files: list[tuple[Path, str]] = []
    for path in files:
        digest = hash_file(path)
        if digest in known_digests:
            report.deduplicated += 1
            report.plan.skipped.append((digest, "already_cataloged"))
            continue
        known_digests.add(digest)
        new_files.append((path, digest))

    verdicts = {digest: _classify(config, path.stem) for path, digest in new_files}
    futures: dict[str, Future] = {}
    with ThreadPoolExecutor(max_workers=max(1, config.jobs)) as pool:
        for path, digest in new_files:
            if verdicts[digest] is Readability.NON_READABLE:
                job = make_caption_job(path, digest=digest)
                futures[digest] = pool.submit(caption_image, config.backend, job)

        taken = {p.stem for p in directory.iterdir() if p.is_file()}
        taken |= {_strip_extension(r.display_name) for r in catalog.records.values()}
        root = catalog.root.resolve()

        for path, digest in new_files:
            if verdicts[digest] is Readability.READABLE:
                record = ImageRecord(
                    id=digest,
                    path=os.path.relpath(path.resolve(), root),
                    original_name=path.name,
                    display_name=path.name,
                    readable_original=True,
                    ingested_at=_utc_now(),
                )
                report.plan.skipped.append((digest, "readable_name"))
                if not config.dry_run:
                    try:
                        upsert(catalog, record)
                    except PicsError as exc:
                        report.errors.append((str(path), type(exc).__name__, str(exc)))
                continue

            try:
                result = futures[digest].result()
                slug = slugify(result.cleaned)
            except (PicsError, OSError) as exc:
                report.errors.append((str(path), type(exc).__name__, str(exc)))
                report.plan.skipped.append((digest, "caption_failed"))
                continue
            report.captioned += 1

            target_name = path.name
            if slug != path.stem:
                free = resolve_collision(slug, taken - {path.stem})
                taken.add(free)
                target_name = free + path.suffix.lower()
            target = path.with_name(target_name)

            if target != path:
                report.plan.moves.append((digest, str(path), str(target)))
            if not config.dry_run and target != path:
                if target.exists():
                    report.errors.append(
                        (str(path), "IoError", f"rename target already exists: {target}")
                    )
                    continue
                os.rename(path, target)
                report.renamed += 1
            record_path = target if not config.dry_run else path
            record = ImageRecord(
                id=digest,
                path=os.path.relpath(record_path.resolve(), root),
                original_name=path.name,
                display_name=target_name,
                caption=result.cleaned,
                caption_source=result.backend,
                readable_original=False,
                ingested_at=_utc_now(),
            )
            if not config.dry_run:
                try:
                    upsert(catalog, record)
                except PicsError as exc:
                    report.errors.append((str(path), type(exc).__name__, str(exc)))

    if config.annotations_file is not None:
        table = parse_annotations(config.annotations_file, config.name_column, config.tags_column)
        before = sum(len(r.tags) for r in catalog.records.values())
        _, unmatched = join_annotations(catalog, table)
        report.tags_attached = sum(len(r.tags) for r in catalog.records.values()) - before
        report.annotation_rows_unmatched = unmatched

    if not config.dry_run:
        save_catalog(catalog, catalog_file)
    return report
