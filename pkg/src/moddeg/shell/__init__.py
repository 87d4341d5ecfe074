"""Curve tables, the LMFDB client, JSON reports and the command line."""

from .lmfdb import FetchResult, MappingError, fetch_lmfdb
from .reports import make_report
from .tables import CurveRecordRow, TableError, load_curves, parse_curves, serialize, shipped_table

__all__ = [
    "CurveRecordRow",
    "FetchResult",
    "MappingError",
    "TableError",
    "fetch_lmfdb",
    "load_curves",
    "make_report",
    "parse_curves",
    "serialize",
    "shipped_table",
]
