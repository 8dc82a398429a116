"""Canonical image records and durable catalog persistence.

File format (`pics-catalog.jsonl`): line 1 is the header object
``{"format":"pics-catalog","version":1}``; every following line is one
record object, lines sorted ascending by record id. UTF-8, ``\\n`` line
endings, compact JSON. Saving the same catalog twice yields byte-identical
files; the catalog root is the directory holding the catalog file and is
not persisted.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DisplayNameCollision, InvariantViolation, IoError, ParseError

FORMAT_NAME = "pics-catalog"
FORMAT_VERSION = 1

CAPTION_SOURCES = ("mock", "command", "http", "none")

_ID_RE = re.compile(r"^[0-9a-f]{64}$")
_FIELD_ORDER = (
    "id",
    "path",
    "original_name",
    "display_name",
    "caption",
    "caption_source",
    "tags",
    "readable_original",
    "ingested_at",
)


@dataclass
class ImageRecord:
    """One cataloged image, keyed by the content hash of its bytes."""

    id: str
    path: str
    original_name: str
    display_name: str
    caption: str | None = None
    caption_source: str = "none"
    tags: list[str] = field(default_factory=list)
    readable_original: bool = False
    ingested_at: str = ""

    def validate(self) -> None:
        if not _ID_RE.match(self.id):
            raise InvariantViolation(f"id is not a 64-char lowercase hex digest: {self.id!r}")
        for label, name in (("original_name", self.original_name), ("display_name", self.display_name)):
            if not name:
                raise InvariantViolation(f"{label} is empty")
            if "/" in name or "\\" in name:
                raise InvariantViolation(f"{label} contains a path separator: {name!r}")
        seen: set[str] = set()
        for tag in self.tags:
            if not tag or tag != tag.strip():
                raise InvariantViolation(f"tag is empty or untrimmed: {tag!r}")
            if tag != tag.lower():
                raise InvariantViolation(f"tag contains uppercase characters: {tag!r}")
            if tag in seen:
                raise InvariantViolation(f"duplicate tag: {tag!r}")
            seen.add(tag)
        if self.caption_source not in CAPTION_SOURCES:
            raise InvariantViolation(f"unknown caption_source: {self.caption_source!r}")
        if (self.caption is None) != (self.caption_source == "none"):
            raise InvariantViolation(
                "caption_source must be 'none' exactly when caption is absent "
                f"(caption={self.caption!r}, caption_source={self.caption_source!r})"
            )


@dataclass
class Catalog:
    """All records for one image directory, keyed by record id."""

    root: Path
    records: dict[str, ImageRecord] = field(default_factory=dict)


def upsert(catalog: Catalog, record: ImageRecord) -> Catalog:
    """Insert or replace ``record`` by id, enforcing display-name uniqueness."""
    record.validate()
    for other in catalog.records.values():
        if other.id != record.id and other.display_name == record.display_name:
            raise DisplayNameCollision(
                f"display_name {record.display_name!r} already owned by id {other.id}"
            )
    catalog.records[record.id] = record
    return catalog


def record_to_obj(record: ImageRecord) -> dict:
    obj = {
        "id": record.id,
        "path": record.path,
        "original_name": record.original_name,
        "display_name": record.display_name,
    }
    if record.caption is not None:
        obj["caption"] = record.caption
    obj["caption_source"] = record.caption_source
    obj["tags"] = list(record.tags)
    obj["readable_original"] = record.readable_original
    obj["ingested_at"] = record.ingested_at
    return obj


def _obj_to_record(obj: dict) -> ImageRecord:
    known = set(_FIELD_ORDER)
    unknown = set(obj) - known
    if unknown:
        raise InvariantViolation(f"unknown fields: {sorted(unknown)}")
    required = known - {"caption"}
    missing = required - set(obj)
    if missing:
        raise InvariantViolation(f"missing fields: {sorted(missing)}")
    record = ImageRecord(
        id=obj["id"],
        path=obj["path"],
        original_name=obj["original_name"],
        display_name=obj["display_name"],
        caption=obj.get("caption"),
        caption_source=obj["caption_source"],
        tags=list(obj["tags"]),
        readable_original=bool(obj["readable_original"]),
        ingested_at=obj["ingested_at"],
    )
    record.validate()
    return record


def _dump(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def serialize_catalog(catalog: Catalog) -> bytes:
    """Render the catalog to its canonical on-disk bytes."""
    lines = [_dump({"format": FORMAT_NAME, "version": FORMAT_VERSION})]
    for record_id in sorted(catalog.records):
        lines.append(_dump(record_to_obj(catalog.records[record_id])))
    return ("\n".join(lines) + "\n").encode("utf-8")


def catalog_digest(catalog: Catalog) -> str:
    """sha256 of the canonical serialization; equals the saved file's digest."""
    return hashlib.sha256(serialize_catalog(catalog)).hexdigest()


def save_catalog(catalog: Catalog, file: Path | str) -> None:
    """Atomically write the catalog (temp file in place, then rename)."""
    file = Path(file)
    data = serialize_catalog(catalog)
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
        raise IoError(f"cannot write catalog {file}: {exc}") from exc


def load_catalog(file: Path | str, root: Path | None = None) -> Catalog:
    """Load a catalog file; root defaults to the file's parent directory."""
    file = Path(file)
    try:
        text = file.read_text("utf-8")
    except OSError as exc:
        raise IoError(f"cannot read catalog {file}: {exc}") from exc

    lines = text.splitlines()
    if not lines:
        raise ParseError("empty catalog file, header missing", line=1)
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad header: {exc}", line=1) from exc
    if not isinstance(header, dict) or header.get("format") != FORMAT_NAME:
        raise ParseError(f"not a {FORMAT_NAME} file", line=1)
    if header.get("version") != FORMAT_VERSION:
        raise ParseError(f"unsupported version: {header.get('version')!r}", line=1)

    catalog = Catalog(root=Path(root) if root is not None else file.parent)
    names: dict[str, str] = {}
    for number, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad record: {exc}", line=number) from exc
        if not isinstance(obj, dict):
            raise ParseError("record line is not a JSON object", line=number)
        try:
            record = _obj_to_record(obj)
        except InvariantViolation as exc:
            raise ParseError(str(exc), line=number) from exc
        if record.id in catalog.records:
            raise InvariantViolation(f"duplicate id: {record.id}")
        if record.display_name in names:
            raise DisplayNameCollision(
                f"display_name {record.display_name!r} owned by both "
                f"{names[record.display_name]} and {record.id}"
            )
        names[record.display_name] = record.id
        catalog.records[record.id] = record
    return catalog
