"""Shared test utilities: fixture catalogs, a scripted chat-completions stub,
and the brute-force search oracle that the indexed path is checked against."""

from __future__ import annotations

import hashlib
import json
import threading
import time
from collections import Counter
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from pics.catalog import Catalog, ImageRecord, save_catalog, upsert
from pics.searchcore import tokenize

FAKE_JPEG = b"\xff\xd8\xff\xe0" + b"\x00" * 32 + b"\xff\xd9"


def fake_id(seed: str) -> str:
    return hashlib.sha256(seed.encode("utf-8")).hexdigest()


def write_image(path: Path, payload: bytes = b"") -> Path:
    path.write_bytes(FAKE_JPEG + payload)
    return path


GALLERY_ROWS = [
    # (display_name, caption, tags)
    ("a_small_brown_animal_sitting_in_tall_grass.jpg", "A small brown animal sitting in tall grass", ["happy"]),
    ("dry_land_with_animals_and_people_on_it.jpg", "Dry land with animals and people on it", ["happy"]),
    ("sunset_over_lake.jpg", None, ["calm"]),
    ("happy_dog_catching_frisbee.jpg", "A happy dog catching a frisbee", []),
    ("zoo_entrance_with_animals.jpg", "Animals gather near the zoo entrance", ["sad"]),
    ("city_skyline_at_night.jpg", "City skyline at night", ["urban"]),
]


def gallery_catalog(root: Path, with_files: bool = False) -> Catalog:
    """Six-record fixture; exactly two records match both `animal` and `happy`."""
    catalog = Catalog(root=root)
    for n, (display, caption, tags) in enumerate(GALLERY_ROWS):
        record = ImageRecord(
            id=fake_id(display),
            path=display,
            original_name=f"{'%032x' % (n + 1)}.jpg",
            display_name=display,
            caption=caption,
            caption_source="mock" if caption is not None else "none",
            tags=list(tags),
            readable_original=caption is None,
            ingested_at="2026-01-15T08:00:00Z",
        )
        upsert(catalog, record)
        if with_files:
            write_image(root / display, display.encode("utf-8"))
    return catalog


def write_gallery_catalog(root: Path, with_files: bool = False) -> Path:
    catalog = gallery_catalog(root, with_files=with_files)
    file = root / "pics-catalog.jsonl"
    save_catalog(catalog, file)
    return file


def _display_stem(name: str) -> str:
    dot = name.rfind(".")
    return name[:dot] if dot > 0 else name


def brute_force_search(catalog, terms, limit, tag_weight=2.0, caption_weight=1.0):
    """Linear-scan oracle: no index, same score and tie-break definition.

    Returns (id, display_name, matched, score) tuples for element-wise
    comparison against the indexed search path.
    """
    rows = []
    for record_id, record in catalog.records.items():
        caption_text = record.caption if record.caption is not None else _display_stem(record.display_name)
        caption_counts = Counter(tokenize(caption_text))
        tag_counts = Counter(term for tag in record.tags for term in tokenize(tag))
        matched = [t for t in terms if caption_counts.get(t, 0) or tag_counts.get(t, 0)]
        if not matched:
            continue
        score = sum(
            tag_weight * tag_counts.get(t, 0) + caption_weight * caption_counts.get(t, 0)
            for t in matched
        )
        rows.append((record_id, record.display_name, matched, score))
    rows.sort(key=lambda row: (-len(row[2]), -row[3], row[1], row[0]))
    return rows[:limit]


RANDOM_WORDS = [
    "animal", "animals", "happy", "fire", "hose", "dog", "dogs", "cat", "grass",
    "lake", "sunset", "tree", "trees", "road", "people", "dry", "land", "small",
    "brown", "tall", "city", "night", "zoo", "bird", "birds", "cloud", "clouds",
    "storm", "river", "sand", "snow", "field", "person", "boat", "hill",
]


def random_catalog(rng, max_records: int = 200) -> Catalog:
    catalog = Catalog(root=Path("."))
    for n in range(rng.randint(0, max_records)):
        words = [rng.choice(RANDOM_WORDS) for _ in range(rng.randint(1, 4))]
        display = "_".join(words) + f"_{n}.jpg"
        caption = None
        if rng.random() > 0.2:
            caption = " ".join(rng.choice(RANDOM_WORDS) for _ in range(rng.randint(1, 12)))
        tags = []
        for _ in range(rng.randint(0, 4)):
            tag = rng.choice(RANDOM_WORDS)
            if tag not in tags:
                tags.append(tag)
        record = ImageRecord(
            id=f"{rng.getrandbits(256):064x}",
            path=display,
            original_name=f"{rng.getrandbits(128):032x}.jpg",
            display_name=display,
            caption=caption,
            caption_source="mock" if caption is not None else "none",
            tags=tags,
            readable_original=False,
            ingested_at="2026-02-01T00:00:00Z",
        )
        upsert(catalog, record)
    return catalog


def random_query_text(rng) -> str:
    words = [rng.choice(RANDOM_WORDS) for _ in range(rng.randint(1, 4))]
    if rng.random() < 0.2:
        words.append("zebra")  # term absent from every catalog
    separator = rng.choice([" ", ", ", ","])
    return separator.join(words)


class StubCompletions:
    """Local OpenAI-compatible /v1/chat/completions endpoint with a script.

    `reply` may be a string or a callable taking the parsed request body.
    `hang_seconds` sleeps before answering so client timeouts fire.
    """

    def __init__(self, reply="Stub caption", status: int = 200, hang_seconds: float = 0.0):
        self.reply = reply
        self.status = status
        self.hang_seconds = hang_seconds
        self.requests: list[dict] = []
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length)) if length else {}
                stub.requests.append(body)
                if stub.hang_seconds:
                    time.sleep(stub.hang_seconds)
                content = stub.reply(body) if callable(stub.reply) else stub.reply
                payload = json.dumps(
                    {"choices": [{"message": {"role": "assistant", "content": content}}]}
                ).encode("utf-8")
                try:
                    self.send_response(stub.status)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(payload)))
                    self.end_headers()
                    self.wfile.write(payload)
                except (BrokenPipeError, ConnectionResetError):
                    pass

            def log_message(self, *args):
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def __enter__(self):
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._server.shutdown()
        self._server.server_close()
