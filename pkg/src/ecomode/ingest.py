"""Parse query/plan/click logs and join them into sessions.

Each log is JSON Lines, UTF-8, one record per line::

    queries.jsonl  {"sid": str, "o": "lng,lat", "d": "lng,lat", "ts": int, "uid": str?}
    plans.jsonl    {"sid": str, "ts": int, "plans": [{"mode": int, "dist": int, "eta": int, "price": int?}]}
    clicks.jsonl   {"sid": str, "click": int, "ts": int}

Coordinates are stored internally as (lat, lng) even though the files carry
``lng,lat`` strings. A later record for an already seen sid replaces the
earlier one and is counted as a duplicate.
"""

from __future__ import annotations

import io
import json
import logging
import os
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Optional

from ecomode.modes import ALL_MODE_IDS

log = logging.getLogger(__name__)

MIN_MODE, MAX_MODE = ALL_MODE_IDS[0], ALL_MODE_IDS[-1]


class IngestError(Exception):
    """The source could not be read at all."""


class _BadRecord(ValueError):
    pass


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lng: float

    def __post_init__(self):
        if not (-90 <= self.lat <= 90):
            raise ValueError(f"latitude out of range: {self.lat}")
        if not (-180 <= self.lng <= 180):
            raise ValueError(f"longitude out of range: {self.lng}")

    def lnglat(self) -> list[float]:
        return [self.lng, self.lat]


@dataclass(frozen=True)
class QueryRecord:
    sid: str
    origin: GeoPoint
    destination: GeoPoint
    timestamp: int
    uid: Optional[str] = None

    @property
    def degenerate(self) -> bool:
        return self.origin == self.destination


@dataclass(frozen=True)
class PlanOption:
    mode_id: int
    distance_m: float
    eta_s: float
    price: Optional[int] = None

    def __post_init__(self):
        if not (MIN_MODE <= self.mode_id <= MAX_MODE):
            raise ValueError(f"mode out of range: {self.mode_id}")
        if self.distance_m < 0:
            raise ValueError(f"negative distance: {self.distance_m}")
        if not self.eta_s > 0:
            raise ValueError(f"non-positive eta: {self.eta_s}")


@dataclass(frozen=True)
class DisplayRecord:
    sid: str
    options: tuple[PlanOption, ...]
    timestamp: int

    def __post_init__(self):
        if not self.options:
            raise ValueError("display record without options")
        modes = [o.mode_id for o in self.options]
        if len(set(modes)) != len(modes):
            raise ValueError(f"duplicate mode in display record {self.sid}: {modes}")


@dataclass(frozen=True)
class ClickRecord:
    sid: str
    clicked_mode_id: int
    timestamp: int

    def __post_init__(self):
        if not (MIN_MODE <= self.clicked_mode_id <= MAX_MODE):
            raise ValueError(f"clicked mode out of range: {self.clicked_mode_id}")


@dataclass(frozen=True)
class Session:
    """One joined query/display/click triple, restricted to the allowed modes."""

    sid: str
    origin: GeoPoint
    destination: GeoPoint
    options: tuple[PlanOption, ...]
    clicked_mode_id: int
    timestamp: int = 0
    uid: Optional[str] = None

    def __post_init__(self):
        clicked = [o for o in self.options if o.mode_id == self.clicked_mode_id]
        if len(clicked) != 1:
            raise ValueError(f"session {self.sid}: clicked mode {self.clicked_mode_id} not among options")

    @property
    def clicked_option(self) -> PlanOption:
        return next(o for o in self.options if o.mode_id == self.clicked_mode_id)

    @property
    def clicked_eta_s(self) -> float:
        return self.clicked_option.eta_s

    @property
    def clicked_distance_m(self) -> float:
        return self.clicked_option.distance_m

    @property
    def degenerate(self) -> bool:
        return self.origin == self.destination

    def option(self, mode_id: int) -> Optional[PlanOption]:
        for o in self.options:
            if o.mode_id == mode_id:
                return o
        return None


@dataclass
class ParseResult:
    records: list
    rejected: int = 0
    duplicates: int = 0
    dropped_options: int = 0

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)


def _lines(source) -> Iterable[str]:
    if isinstance(source, (str, os.PathLike)):
        try:
            with open(source, "rb") as fh:
                data = fh.read()
        except OSError as exc:
            raise IngestError(f"cannot read {source}: {exc}") from exc
    elif isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    else:
        try:
            data = source.read()
        except (OSError, io.UnsupportedOperation) as exc:
            raise IngestError(f"cannot read source: {exc}") from exc
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise IngestError(f"source is not UTF-8: {exc}") from exc
    return data.split("\n")


def _int(value, name) -> int:
    # bool is an int subclass; reject it explicitly
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value):
        raise _BadRecord(f"{name} must be an integer, got {value!r}")
    return int(value)


def _number(value, name) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _BadRecord(f"{name} must be a number, got {value!r}")
    return value


def _sid(doc) -> str:
    sid = doc.get("sid")
    if isinstance(sid, int) and not isinstance(sid, bool):
        sid = str(sid)
    if not isinstance(sid, str) or not sid:
        raise _BadRecord("missing sid")
    return sid


def _point(text) -> GeoPoint:
    if not isinstance(text, str):
        raise _BadRecord(f"coordinate must be a 'lng,lat' string, got {text!r}")
    parts = text.split(",")
    if len(parts) != 2:
        raise _BadRecord(f"bad coordinate {text!r}")
    lng, lat = (float(p) for p in parts)
    return GeoPoint(lat=lat, lng=lng)


def _parse(source, build, kind: str) -> ParseResult:
    by_sid: dict[str, object] = {}
    result = ParseResult(records=[])
    for lineno, line in enumerate(_lines(source), 1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
            if not isinstance(doc, dict):
                raise _BadRecord("record is not an object")
            record = build(doc, result)
        except (ValueError, TypeError, KeyError) as exc:
            result.rejected += 1
            log.debug("%s line %d rejected: %s", kind, lineno, exc)
            continue
        if record.sid in by_sid:
            result.duplicates += 1
            del by_sid[record.sid]
        by_sid[record.sid] = record
    result.records = list(by_sid.values())
    if result.rejected or result.duplicates:
        log.info("%s: %d records, %d rejected, %d duplicates", kind, len(result.records), result.rejected, result.duplicates)
    return result


def _query(doc, _result) -> QueryRecord:
    uid = doc.get("uid")
    return QueryRecord(
        sid=_sid(doc),
        origin=_point(doc["o"]),
        destination=_point(doc["d"]),
        timestamp=_int(doc.get("ts", 0), "ts"),
        uid=None if uid is None else str(uid),
    )


def _display(doc, result: ParseResult) -> DisplayRecord:
    plans = doc["plans"]
    if not isinstance(plans, list):
        raise _BadRecord("plans must be a list")
    options = []
    for plan in plans:
        try:
            price = plan.get("price")
            options.append(
                PlanOption(
                    mode_id=_int(plan["mode"], "mode"),
                    distance_m=_number(plan["dist"], "dist"),
                    eta_s=_number(plan["eta"], "eta"),
                    price=None if price is None else _int(price, "price"),
                )
            )
        except (ValueError, TypeError, KeyError, AttributeError):
            result.dropped_options += 1
    return DisplayRecord(sid=_sid(doc), options=tuple(options), timestamp=_int(doc.get("ts", 0), "ts"))


def _click(doc, _result) -> ClickRecord:
    return ClickRecord(sid=_sid(doc), clicked_mode_id=_int(doc["click"], "click"), timestamp=_int(doc.get("ts", 0), "ts"))


def parse_queries(source) -> ParseResult:
    return _parse(source, _query, "queries")


def parse_plans(source) -> ParseResult:
    """Parse display records.

    Invalid options (eta <= 0, negative distance, mode outside 1..11) are
    dropped individually; a record is rejected when nothing valid remains or
    when two options share a mode.
    """
    return _parse(source, _display, "plans")


def parse_clicks(source) -> ParseResult:
    return _parse(source, _click, "clicks")


@dataclass
class JoinDiagnostics:
    """Why clicked sessions did not make it into the join."""

    dropped: Counter = field(default_factory=Counter)
    degenerate: int = 0

    CAUSES = ("missing_query", "missing_display", "click_not_allowed", "click_not_displayed")

    @property
    def total_dropped(self) -> int:
        return sum(self.dropped.values())

    def to_json(self) -> dict:
        return {
            "dropped": {cause: self.dropped.get(cause, 0) for cause in self.CAUSES},
            "degenerate": self.degenerate,
        }


def join_sessions(queries, displays, clicks, allowed_modes) -> tuple[list[Session], JoinDiagnostics]:
    """Join the three logs on sid; the result is sorted by sid.

    Every distinct clicked sid ends up either as a session or in exactly one
    drop cause.
    """
    allowed = frozenset(int(m) for m in allowed_modes)
    if not allowed <= set(ALL_MODE_IDS):
        raise ValueError(f"allowed modes must be within 1..11: {sorted(allowed)}")

    # last-wins dedup is repeated here so plain lists are accepted too
    q_by_sid = {q.sid: q for q in queries}
    d_by_sid = {d.sid: d for d in displays}
    c_by_sid = {c.sid: c for c in clicks}

    diag = JoinDiagnostics()
    sessions = []
    for sid in sorted(c_by_sid):
        click = c_by_sid[sid]
        query = q_by_sid.get(sid)
        display = d_by_sid.get(sid)
        if query is None:
            diag.dropped["missing_query"] += 1
            continue
        if display is None:
            diag.dropped["missing_display"] += 1
            continue
        if click.clicked_mode_id not in allowed:
            diag.dropped["click_not_allowed"] += 1
            continue
        options = tuple(sorted((o for o in display.options if o.mode_id in allowed), key=lambda o: o.mode_id))
        if not any(o.mode_id == click.clicked_mode_id for o in options):
            diag.dropped["click_not_displayed"] += 1
            continue
        session = Session(
            sid=sid,
            origin=query.origin,
            destination=query.destination,
            options=options,
            clicked_mode_id=click.clicked_mode_id,
            timestamp=query.timestamp,
            uid=query.uid,
        )
        if session.degenerate:
            diag.degenerate += 1
        sessions.append(session)
    return sessions, diag
