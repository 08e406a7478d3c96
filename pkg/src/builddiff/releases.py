"""Release metadata: CSV storage and retrieval from the GitHub releases API."""
from __future__ import annotations

import csv
import re
import time
from dataclasses import dataclass
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Optional, Sequence, Union

__all__ = [
    "ReleaseEvent",
    "HttpError",
    "RateLimited",
    "NotFound",
    "read_releases_csv",
    "write_releases_csv",
    "fetch_releases",
]

API_ROOT = "https://api.github.com"
CSV_HEADER = ("date", "tag", "commit")
_SHA = re.compile(r"^[0-9a-f]{40}$")
_NEXT = re.compile(r'<([^>]+)>;\s*rel="next"')


class HttpError(Exception):
    def __init__(self, message: str, status: Optional[int] = None):
        super().__init__(message)
        self.status = status


class RateLimited(HttpError):
    def __init__(self, message: str, retry_after: Optional[float] = None, status: int = 403):
        super().__init__(message, status)
        self.retry_after = retry_after


class NotFound(HttpError):
    pass


@dataclass(frozen=True, order=True)
class ReleaseEvent:
    date: date
    tag: str
    commit: Optional[str] = None


def _sorted(events) -> list[ReleaseEvent]:
    return sorted(events, key=lambda e: (e.date, e.tag))


def read_releases_csv(path: Union[str, Path]) -> list[ReleaseEvent]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(CSV_HEADER[:2]) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        return _sorted(ReleaseEvent(date.fromisoformat(row["date"]), row["tag"],
                                    row.get("commit") or None) for row in reader)


def write_releases_csv(events: Sequence[ReleaseEvent], path: Union[str, Path]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for e in _sorted(events):
            writer.writerow([e.date.isoformat(), e.tag, e.commit or ""])


def _to_event(item: dict) -> Optional[ReleaseEvent]:
    stamp = item.get("published_at") or item.get("created_at")
    if not stamp or item.get("draft"):
        return None
    when = datetime.fromisoformat(stamp.replace("Z", "+00:00")).astimezone(timezone.utc)
    target = item.get("target_commitish") or ""
    return ReleaseEvent(when.date(), item.get("tag_name") or item.get("name") or "",
                        target if _SHA.match(target) else None)


def _get(session, url: str, headers: dict, retries: int, backoff: float):
    import requests

    for attempt in range(retries + 1):
        try:
            resp = session.get(url, headers=headers, timeout=30)
        except requests.RequestException as exc:
            if attempt == retries:
                raise HttpError(f"GET {url}: {exc}") from exc
            time.sleep(backoff * 2 ** attempt)
            continue
        if resp.status_code == 404:
            raise NotFound(f"GET {url}: not found", 404)
        limited = resp.status_code == 429 or (
            resp.status_code == 403 and resp.headers.get("X-RateLimit-Remaining") == "0")
        if limited:
            retry_after = resp.headers.get("Retry-After")
            if retry_after is None and resp.headers.get("X-RateLimit-Reset"):
                retry_after = max(0.0, float(resp.headers["X-RateLimit-Reset"]) - time.time())
            raise RateLimited(f"GET {url}: rate limited",
                              float(retry_after) if retry_after is not None else None,
                              resp.status_code)
        if resp.status_code >= 500 and attempt < retries:
            time.sleep(backoff * 2 ** attempt)
            continue
        if resp.status_code >= 400:
            raise HttpError(f"GET {url}: HTTP {resp.status_code}", resp.status_code)
        return resp
    raise HttpError(f"GET {url}: retries exhausted")  # pragma: no cover


def fetch_releases(remote: str, token: Optional[str] = None, *, session=None,
                   out: Union[str, Path, None] = None, api_root: str = API_ROOT,
                   retries: int = 3, backoff: float = 1.0) -> list[ReleaseEvent]:
    """Published releases of ``owner/name``, oldest first.

    ``remote`` may instead name an existing releases CSV, which is read
    without touching the network.  When ``out`` is given the result is
    also written there as CSV.
    """
    if Path(remote).is_file():
        events = read_releases_csv(remote)
    else:
        if not re.fullmatch(r"[\w.-]+/[\w.-]+", remote):
            raise ValueError(f"expected owner/name, got {remote!r}")
        if session is None:
            import requests

            session = requests.Session()
        headers = {"Accept": "application/vnd.github+json"}
        if token:
            headers["Authorization"] = f"Bearer {token}"
        url: Optional[str] = f"{api_root}/repos/{remote}/releases?per_page=100"
        found = []
        while url:
            resp = _get(session, url, headers, retries, backoff)
            for item in resp.json():
                event = _to_event(item)
                if event is not None:
                    found.append(event)
            match = _NEXT.search(resp.headers.get("Link", ""))
            url = match.group(1) if match else None
        events = _sorted(found)
    if out is not None:
        write_releases_csv(events, out)
    return events
