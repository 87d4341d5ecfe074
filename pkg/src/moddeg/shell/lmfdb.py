"""Elliptic curve records from the LMFDB API, through a disk cache.

Responses are cached per conductor as the raw JSON payload, so an offline
replay maps exactly the same bytes. The network is used only when asked for.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
import urllib.error
import urllib.parse
import urllib.request
from pathlib import Path
from typing import Optional

from filelock import FileLock

from ..gross.brandt import default_cache_dir
from .tables import CurveRecordRow

log = logging.getLogger(__name__)

URL_ENV = "MODDEG_LMFDB_URL"
NETWORK_ENV = "MODDEG_NETWORK"
DEFAULT_URL = "https://www.lmfdb.org/api/ec_curvedata/"
FIELDS = ("Clabel", "lmfdb_label", "ainvs", "conductor", "rank", "torsion", "degree")
FIXTURE_DIR = Path(__file__).resolve().parent / "fixtures" / "lmfdb"


class MappingError(ValueError):
    """The payload does not have the fields we map from."""

    def __init__(self, msg: str, saved_to: Optional[Path] = None):
        super().__init__(msg + (f" (payload saved to {saved_to})" if saved_to else ""))
        self.saved_to = saved_to


class FetchResult(list):
    """Records in conductor order; .missing lists conductors with no data."""

    def __init__(self, records=(), missing=()):
        super().__init__(records)
        self.missing = list(missing)


def _cache_name(N: int) -> str:
    return f"ec_curvedata_N{N}.json"


def _read_cached(N: int, cache_dir: Optional[Path]) -> Optional[bytes]:
    for d in (cache_dir, FIXTURE_DIR):
        if d is not None and (d / _cache_name(N)).exists():
            return (d / _cache_name(N)).read_bytes()
    return None


def _write_atomic(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with FileLock(str(path) + ".lock"):
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)


def _download(N: int, base_url: str, timeout: float) -> bytes:
    query = {"conductor": str(N), "_format": "json", "_fields": ",".join(FIELDS)}
    url = base_url + "?" + urllib.parse.urlencode(query)
    rows = []
    while url:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            page = json.loads(resp.read().decode())
        rows.extend(page.get("data", []))
        nxt = page.get("next")
        url = urllib.parse.urljoin(base_url, nxt) if nxt else None
    payload = {"data": rows, "next": None}
    return (json.dumps(payload, sort_keys=True, indent=1) + "\n").encode()


def map_payload(raw: bytes, N: int) -> list[CurveRecordRow]:
    try:
        payload = json.loads(raw)
        out = []
        for item in payload["data"]:
            ainvs = tuple(int(a) for a in item["ainvs"])
            if len(ainvs) != 5:
                raise ValueError(f"ainvs of length {len(ainvs)}")
            if int(item["conductor"]) != N:
                raise ValueError(f"record of conductor {item['conductor']} under N = {N}")
            deg = item.get("degree")
            out.append(CurveRecordRow(
                item.get("Clabel") or item["lmfdb_label"],
                ainvs,
                N,
                int(item["rank"]),
                int(item["torsion"]),
                int(deg) if deg is not None else None,
                None,
            ))
    except (KeyError, TypeError, ValueError) as exc:
        raise MappingError(f"conductor {N}: cannot map LMFDB payload: {exc!r}") from None
    return sorted(out, key=lambda r: r.label)


def fetch_lmfdb(
    cmin: int,
    cmax: int,
    network: Optional[bool] = None,
    cache_dir: Optional[Path] = None,
    base_url: Optional[str] = None,
    timeout: float = 30.0,
) -> FetchResult:
    """Curves with cmin <= N <= cmax. Without network, cache misses go to .missing."""
    if network is None:
        network = os.environ.get(NETWORK_ENV, "") == "1"
    if cache_dir is None:
        root = default_cache_dir()
        cache_dir = root / "lmfdb" if root else None
    base_url = base_url or os.environ.get(URL_ENV, DEFAULT_URL)
    records: list[CurveRecordRow] = []
    missing = []
    for N in range(max(1, cmin), cmax + 1):
        raw = _read_cached(N, cache_dir)
        if raw is None and network:
            try:
                raw = _download(N, base_url, timeout)
            except (urllib.error.URLError, OSError, ValueError) as exc:
                log.warning("LMFDB fetch for N = %d failed: %s", N, exc)
            else:
                if cache_dir is not None:
                    _write_atomic(cache_dir / _cache_name(N), raw)
        if raw is None:
            missing.append(N)
            continue
        try:
            records.extend(map_payload(raw, N))
        except MappingError as exc:
            saved = None
            if cache_dir is not None:
                saved = cache_dir / f"rejected_N{N}.json"
                _write_atomic(saved, raw)
            raise MappingError(str(exc), saved) from None
    return FetchResult(records, missing)
