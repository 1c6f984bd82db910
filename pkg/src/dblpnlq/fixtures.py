"""Record/replay store for HTTP interactions.

One JSON file per key: the raw response body plus request metadata.  Keys
are content hashes, so replay is bit-exact and independent of recording
order.  Search lookups hash (path, query, hits); endpoint executions hash
the normalized query text so whitespace-variant edits replay identically.
"""

from __future__ import annotations

import hashlib
import json
import threading
from pathlib import Path

from .errors import FileUnreadableError

_write_lock = threading.Lock()


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:24]


def search_key(path: str, q: str, h: int) -> str:
    return _digest(f"{path}|{q}|{h}")


def query_key(normalized_query: str) -> str:
    return _digest(normalized_query)


class FixtureStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)

    def _file(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def has(self, key: str) -> bool:
        return self._file(key).is_file()

    def load(self, key: str) -> dict | None:
        path = self._file(key)
        if not path.is_file():
            return None
        try:
            doc = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise FileUnreadableError(f"fixture {path} unreadable: {exc}") from exc
        if not isinstance(doc, dict) or "body" not in doc or "status" not in doc:
            raise FileUnreadableError(f"fixture {path} lacks status/body")
        return doc

    def save(self, key: str, request: dict, status: int, body: str) -> None:
        doc = {"request": request, "status": status, "body": body}
        with _write_lock:
            self.root.mkdir(parents=True, exist_ok=True)
            self._file(key).write_text(json.dumps(doc, indent=1, sort_keys=True))
