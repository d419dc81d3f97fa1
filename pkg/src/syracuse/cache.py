"""Append-only JSONL store for resumable scans.

The first line is a header pinning a format version and a hash of the run
configuration; every following line is one record.  Records are written
with a single ``write`` on a file opened in append mode, so an interrupted
run leaves at most one partial trailing line, which is truncated on the
next open.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from pathlib import Path
from typing import Any, Iterator

from .errors import ConfigMismatch, SyracuseError

FORMAT = "syracuse-scan"
FORMAT_VERSION = 1
CACHE_ENV = "SYRACUSE_CACHE_DIR"

log = logging.getLogger(__name__)


def config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def default_cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV, ".syracuse-cache"))


class ScanCache:
    """Records keyed by ``key`` (the scan index), resumable across runs."""

    def __init__(self, path: str | os.PathLike, config: dict, force: bool = False, key: str = "n"):
        self.path = Path(path)
        self.config = config
        self.hash = config_hash(config)
        self.key = key
        self.records: dict[Any, dict] = {}
        self.truncated = False
        if self.path.exists() and self.path.stat().st_size > 0:
            self._load(force)
        else:
            self._write_header()

    def _header(self) -> dict:
        return {"format": FORMAT, "version": FORMAT_VERSION, "config_hash": self.hash, "config": self.config}

    def _write_header(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(self._header(), sort_keys=True) + "\n")
        self.records = {}

    def _load(self, force: bool) -> None:
        data = self.path.read_bytes()
        lines = data.split(b"\n")
        try:
            header = json.loads(lines[0])
        except json.JSONDecodeError:
            header = None
        if not header or header.get("format") != FORMAT or header.get("version") != FORMAT_VERSION:
            if not force:
                raise ConfigMismatch(f"{self.path} is not a version-{FORMAT_VERSION} scan cache")
            self._write_header()
            return
        if header.get("config_hash") != self.hash:
            if not force:
                raise ConfigMismatch(
                    f"{self.path} was written with a different configuration; use --force to overwrite"
                )
            self._write_header()
            return
        if len(lines) == 1:  # header without its newline
            self._write_header()
            return
        good_end = len(lines[0]) + 1
        *complete, tail = lines[1:] if len(lines) > 1 else [b""]
        for i, raw in enumerate(complete):
            try:
                rec = json.loads(raw)
            except json.JSONDecodeError:
                if i == len(complete) - 1 and tail == b"":
                    self._truncate(good_end)
                    return
                raise SyracuseError(f"{self.path}: corrupt record on line {i + 2}") from None
            self.records[rec[self.key]] = rec
            good_end += len(raw) + 1
        if tail:
            self._truncate(good_end)

    def _truncate(self, size: int) -> None:
        log.warning("truncating partial trailing record in %s", self.path)
        with open(self.path, "r+b") as fh:
            fh.truncate(size)
        self.truncated = True

    def __contains__(self, k: Any) -> bool:
        return k in self.records

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[dict]:
        return iter(self.records.values())

    def done(self) -> set:
        return set(self.records)

    def append(self, record: dict) -> None:
        line = (json.dumps(record, sort_keys=True) + "\n").encode()
        fd = os.open(self.path, os.O_WRONLY | os.O_APPEND)
        try:
            os.write(fd, line)
        finally:
            os.close(fd)
        self.records[record[self.key]] = record
