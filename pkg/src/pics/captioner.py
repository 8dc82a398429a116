"""Caption backends (mock, command, http) and raw-output cleanup.

All backends are stateless: one invocation owns its process or connection,
so callers may fan out concurrently. Nothing here touches the catalog.
"""

from __future__ import annotations

import base64
import hashlib
import json
import re
import shlex
import subprocess
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import requests

from .errors import (
    BackendTimeout,
    BackendUnavailable,
    EmptyCaption,
    FixtureMiss,
    InvariantViolation,
    IoError,
    UnparseableVerdict,
)

DEFAULT_PROMPT = "The best description of the image in ten words or less is"
MAX_CAPTION_WORDS = 10

READABILITY_PROMPT = 'Answer YES if "{name}" consists of readable English words, otherwise answer NO.'

# First retry waits this long; each further retry doubles it.
RETRY_BACKOFF_SECONDS = 1.0

# Reserved mock-fixture key used when neither digest nor filename matches.
MOCK_DEFAULT_KEY = "*"

BACKEND_KINDS = ("mock", "command", "http")

_DATA_URL_TYPES = {
    ".jpg": "image/jpeg",
    ".jpeg": "image/jpeg",
    ".png": "image/png",
    ".gif": "image/gif",
    ".webp": "image/webp",
}


class Readability(Enum):
    READABLE = "readable"
    NON_READABLE = "non_readable"


@dataclass
class CaptionJob:
    image_path: Path
    image_bytes_digest: str
    prompt: str = DEFAULT_PROMPT


@dataclass
class CaptionResult:
    raw: str
    cleaned: str
    backend: str


@dataclass
class BackendConfig:
    kind: str
    mock_fixture: Path | None = None
    command_template: str | None = None
    endpoint_url: str | None = None
    model_name: str | None = None
    timeout_seconds: float = 30.0
    max_retries: int = 2

    def validate(self) -> None:
        if self.kind not in BACKEND_KINDS:
            raise InvariantViolation(f"unknown backend kind: {self.kind!r}")
        if self.timeout_seconds <= 0:
            raise InvariantViolation("timeout_seconds must be > 0")
        if self.kind == "mock" and self.mock_fixture is None:
            raise InvariantViolation("mock backend requires mock_fixture")
        if self.kind == "command":
            template = self.command_template or ""
            if "{image}" not in template or "{prompt}" not in template:
                raise InvariantViolation(
                    "command backend requires command_template with {image} and {prompt}"
                )
        if self.kind == "http" and not (self.endpoint_url and self.model_name):
            raise InvariantViolation("http backend requires endpoint_url and model_name")


def hash_file(path: Path | str) -> str:
    """Content hash (sha256 hex) of the file bytes."""
    digest = hashlib.sha256()
    try:
        with open(path, "rb") as handle:
            for chunk in iter(lambda: handle.read(1 << 20), b""):
                digest.update(chunk)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    return digest.hexdigest()


def make_caption_job(image_path: Path | str, prompt: str = DEFAULT_PROMPT, digest: str | None = None) -> CaptionJob:
    image_path = Path(image_path)
    return CaptionJob(
        image_path=image_path,
        image_bytes_digest=digest if digest is not None else hash_file(image_path),
        prompt=prompt,
    )


def postprocess_caption(raw: str, prompt: str = DEFAULT_PROMPT) -> str:
    """Clean raw model output down to a single short caption line.

    Strips surrounding whitespace and matching quotes, removes a leading
    echo of the prompt (plus a following ``:`` or ``,``), collapses
    whitespace runs, caps the result at 10 words, and drops trailing
    sentence punctuation. Idempotent on its own output.
    """
    text = raw.strip()
    while len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        text = text[1:-1].strip()
    wanted = prompt.strip().lower()
    while wanted and text.lower().startswith(wanted):
        text = text[len(wanted):].lstrip()
        if text[:1] in (":", ","):
            text = text[1:]
    text = " ".join(text.split()[:MAX_CAPTION_WORDS])
    text = text.rstrip(".!?").rstrip()
    if not text:
        raise EmptyCaption(f"raw output cleaned to nothing: {raw!r}")
    return text


def _mock_raw(config: BackendConfig, job: CaptionJob) -> str:
    try:
        fixture = json.loads(Path(config.mock_fixture).read_text("utf-8"))
    except OSError as exc:
        raise IoError(f"cannot read mock fixture {config.mock_fixture}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise BackendUnavailable(f"mock fixture is not valid JSON: {exc}") from exc
    for key in (job.image_bytes_digest, job.image_path.name, MOCK_DEFAULT_KEY):
        value = fixture.get(key)
        if isinstance(value, str):
            return value
    raise FixtureMiss(
        f"no fixture caption for digest {job.image_bytes_digest} or name {job.image_path.name!r}"
    )


def _command_raw(config: BackendConfig, image: str, prompt: str) -> str:
    args = [
        part.replace("{image}", image).replace("{prompt}", prompt)
        for part in shlex.split(config.command_template)
    ]
    try:
        proc = subprocess.run(args, capture_output=True, timeout=config.timeout_seconds)
    except (FileNotFoundError, PermissionError) as exc:
        raise BackendUnavailable(f"cannot spawn {args[0]!r}: {exc}") from exc
    except subprocess.TimeoutExpired as exc:
        raise BackendTimeout(f"{args[0]!r} produced no output within {config.timeout_seconds}s") from exc
    if proc.returncode != 0:
        detail = proc.stderr.decode("utf-8", "replace").strip()
        raise BackendUnavailable(f"{args[0]!r} exited {proc.returncode}: {detail[:200]}")
    return proc.stdout.decode("utf-8", "replace")


def _http_completion(config: BackendConfig, content: list[dict], max_tokens: int) -> str:
    url = config.endpoint_url.rstrip("/") + "/v1/chat/completions"
    payload = {
        "model": config.model_name,
        "temperature": 0,
        "max_tokens": max_tokens,
        "messages": [{"role": "user", "content": content}],
    }
    last_error: Exception = BackendUnavailable(f"no attempt made against {url}")
    for attempt in range(config.max_retries + 1):
        if attempt:
            time.sleep(RETRY_BACKOFF_SECONDS * (2 ** (attempt - 1)))
        try:
            response = requests.post(url, json=payload, timeout=config.timeout_seconds)
        except requests.exceptions.Timeout:
            last_error = BackendTimeout(f"no reply from {url} within {config.timeout_seconds}s")
            continue
        except requests.exceptions.RequestException as exc:
            last_error = BackendUnavailable(f"cannot reach {url}: {exc}")
            continue
        if response.status_code != 200:
            last_error = BackendUnavailable(f"{url} answered HTTP {response.status_code}")
            continue
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise BackendUnavailable(f"malformed completion body from {url}: {exc}") from exc
    raise last_error


def _image_content(image_path: Path, prompt: str) -> list[dict]:
    try:
        raw = image_path.read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read {image_path}: {exc}") from exc
    media_type = _DATA_URL_TYPES.get(image_path.suffix.lower(), "image/jpeg")
    data_url = f"data:{media_type};base64,{base64.b64encode(raw).decode('ascii')}"
    return [
        {"type": "text", "text": prompt},
        {"type": "image_url", "image_url": {"url": data_url}},
    ]


def caption_image(config: BackendConfig, job: CaptionJob) -> CaptionResult:
    """Run one caption job through the configured backend and clean its output."""
    config.validate()
    if not job.image_path.is_file():
        raise IoError(f"image file does not exist: {job.image_path}")
    if config.kind == "mock":
        raw = _mock_raw(config, job)
    elif config.kind == "command":
        raw = _command_raw(config, str(job.image_path), job.prompt)
    else:
        raw = _http_completion(config, _image_content(job.image_path, job.prompt), max_tokens=64)
    return CaptionResult(raw=raw, cleaned=postprocess_caption(raw, job.prompt), backend=config.kind)


def classify_name_llm(config: BackendConfig, name: str) -> Readability:
    """Ask a text-capable backend whether a filename reads as English.

    The reply's first alphabetic token decides: YES means readable, NO means
    not; anything else raises UnparseableVerdict. Callers are expected to
    fall back to the heuristic classifier on any error.
    """
    config.validate()
    if config.kind not in ("command", "http"):
        raise BackendUnavailable(f"{config.kind} backend cannot judge filenames")
    prompt = READABILITY_PROMPT.format(name=name)
    if config.kind == "command":
        reply = _command_raw(config, "", prompt)
    else:
        reply = _http_completion(config, [{"type": "text", "text": prompt}], max_tokens=8)
    match = re.search(r"[A-Za-z]+", reply)
    verdict = match.group(0).lower() if match else ""
    if verdict == "yes":
        return Readability.READABLE
    if verdict == "no":
        return Readability.NON_READABLE
    raise UnparseableVerdict(f"reply is neither YES nor NO: {reply!r}")
