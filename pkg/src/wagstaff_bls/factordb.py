"""Client for an external factor database, used only to discover candidates.

Nothing returned here is trusted: the factoring pipeline checks divisibility
and certifies every claimed prime before admitting it.

Responses are cached one file per queried n in a cache directory.  The file
name is the decimal n (or ``sha256-<hex>`` when the decimal would exceed 200
characters); the first line is a metadata comment, the rest is the raw body.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from .bigmath import from_decimal, to_decimal
from .errors import DbParseError, DbUnavailable

__all__ = ["DbStatus", "DbResponse", "FactorDbClient", "parse_response",
           "DEFAULT_URL", "ENV_URL", "ENV_CACHE"]

log = logging.getLogger(__name__)

DEFAULT_URL = "http://factordb.com/api"
ENV_URL = "WAGSTAFF_FACTORDB_URL"
ENV_CACHE = "WAGSTAFF_FACTORDB_CACHE"
_MAX_NAME = 200


class DbStatus(str, Enum):
    FULLY_FACTORED = "FF"
    COMPOSITE_FACTORS_KNOWN = "CF"
    PRIME = "P"
    PROBABLE_PRIME = "PRP"
    COMPOSITE_NO_FACTORS = "C"
    UNKNOWN = "U"


@dataclass(frozen=True)
class DbResponse:
    n: int
    status: DbStatus
    factors: list[tuple[int, int]] = field(default_factory=list)
    from_cache: bool = False


def parse_response(n: int, body: str) -> DbResponse:
    """Parse ``{"status": ..., "factors": [[f, e], ...]}``; raises DbParseError."""
    try:
        data = json.loads(body)
    except json.JSONDecodeError as exc:
        raise DbParseError(f"response is not JSON: {exc}") from None
    if not isinstance(data, dict) or "status" not in data:
        raise DbParseError("response lacks a status field")
    try:
        status = DbStatus(data["status"])
    except ValueError:
        raise DbParseError(f"unknown status {data['status']!r}") from None
    raw = data.get("factors", [])
    if not isinstance(raw, list):
        raise DbParseError("factors is not an array")
    factors = []
    for item in raw:
        if not (isinstance(item, list) and len(item) == 2):
            raise DbParseError(f"malformed factor entry {item!r:.60}")
        f, e = item
        try:
            f = from_decimal(f) if isinstance(f, str) else f
            e = from_decimal(e) if isinstance(e, str) else e
        except ValueError as exc:
            raise DbParseError(str(exc)) from None
        if not (isinstance(f, int) and isinstance(e, int)) or isinstance(f, bool) or f < 1 or e < 1:
            raise DbParseError(f"malformed factor entry {item!r:.60}")
        factors.append((f, e))
    return DbResponse(n, status, factors)


class FactorDbClient:
    """Cached, rate-limited lookups.  ``offline=True`` serves the cache only."""

    def __init__(self, base_url: str | None = None, cache_dir=None, *, offline: bool = False,
                 min_interval: float = 1.0, timeout: float = 30.0):
        self.base_url = base_url or os.environ.get(ENV_URL) or DEFAULT_URL
        cache_dir = cache_dir or os.environ.get(ENV_CACHE)
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self.offline = offline
        self.min_interval = min_interval
        self.timeout = timeout
        self._lock = threading.Lock()
        self._last = float("-inf")

    def cache_path(self, n: int) -> Path | None:
        if self.cache_dir is None:
            return None
        dec = to_decimal(n)
        name = dec if len(dec) <= _MAX_NAME else "sha256-" + hashlib.sha256(dec.encode()).hexdigest()
        return self.cache_dir / name

    def _read_cache(self, n: int) -> str | None:
        path = self.cache_path(n)
        if path is None or not path.is_file():
            return None
        text = path.read_text(encoding="utf-8")
        _meta, sep, body = text.partition("\n")
        if not sep:
            raise DbParseError(f"cache file {path.name[:40]} lacks a metadata line")
        return body

    def _write_cache(self, n: int, url: str, body: str) -> None:
        path = self.cache_path(n)
        if path is None:
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        meta = json.dumps({"fetched": stamp, "url": url[:120]}, sort_keys=True)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(f"# {meta}\n{body}", encoding="utf-8")
        tmp.replace(path)

    def _fetch(self, url: str) -> str:
        with self._lock:
            wait = self._last + self.min_interval - time.monotonic()
            if wait > 0:
                time.sleep(wait)
            try:
                with urllib.request.urlopen(url, timeout=self.timeout) as resp:
                    body = resp.read().decode("utf-8")
            except (urllib.error.URLError, OSError, UnicodeDecodeError) as exc:
                raise DbUnavailable(f"query failed: {exc}") from None
            finally:
                self._last = time.monotonic()
        return body

    def lookup(self, n: int) -> DbResponse:
        body = self._read_cache(n)
        if body is not None:
            resp = parse_response(n, body)
            return DbResponse(resp.n, resp.status, resp.factors, from_cache=True)
        if self.offline:
            raise DbUnavailable("not cached and the client is offline")
        url = f"{self.base_url}?{urllib.parse.urlencode({'query': to_decimal(n)})}"
        body = self._fetch(url)
        resp = parse_response(n, body)  # parse before caching: never cache garbage
        self._write_cache(n, url, body)
        return resp
