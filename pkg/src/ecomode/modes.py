"""Transport means and the mode-ID to means mapping."""

from __future__ import annotations

import enum
import json
from collections.abc import Mapping
from pathlib import Path

ALL_MODE_IDS = tuple(range(1, 12))
UNKNOWN_MODE_IDS = frozenset({8, 9, 10})
DEFAULT_MODE_FILTER = frozenset({1, 2, 3, 4, 5, 6, 7, 11})


class TransportMeans(str, enum.Enum):
    BUS = "bus"
    SUBWAY = "subway"
    DRIVING = "driving"
    TAXI = "taxi"
    WALKING = "walking"
    CYCLING = "cycling"
    BUS_AND_SUBWAY = "bus_and_subway"
    BUS_AND_SHARE_CYCLE = "bus_and_share_cycle"
    UNKNOWN = "unknown"

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {
    TransportMeans.BUS: "Bus",
    TransportMeans.SUBWAY: "Subway",
    TransportMeans.DRIVING: "Driving",
    TransportMeans.TAXI: "Taxi",
    TransportMeans.WALKING: "Walking",
    TransportMeans.CYCLING: "Cycling",
    TransportMeans.BUS_AND_SUBWAY: "Bus&Subway",
    TransportMeans.BUS_AND_SHARE_CYCLE: "Bus&Share Cycle",
    TransportMeans.UNKNOWN: "Unknown",
}

KNOWN_MEANS = tuple(m for m in TransportMeans if m is not TransportMeans.UNKNOWN)


class MappingError(ValueError):
    pass


class ModeMapping(Mapping):
    """Immutable total map from mode ID 1..11 to :class:`TransportMeans`.

    Modes 8, 9 and 10 are always unknown; each of the other eight means is
    held by exactly one mode ID.
    """

    def __init__(self, assignment: Mapping[int, TransportMeans | str]):
        items = {int(k): TransportMeans(v) for k, v in assignment.items()}
        missing = sorted(set(ALL_MODE_IDS) - set(items))
        extra = sorted(set(items) - set(ALL_MODE_IDS))
        if missing or extra:
            raise MappingError(f"mapping must cover modes 1..11 exactly (missing={missing}, extra={extra})")
        for mode_id in UNKNOWN_MODE_IDS:
            if items[mode_id] is not TransportMeans.UNKNOWN:
                raise MappingError(f"mode {mode_id} must map to unknown")
        held = [m for k, m in items.items() if k not in UNKNOWN_MODE_IDS]
        if sorted(held) != sorted(KNOWN_MEANS):
            dupes = sorted({m.value for m in held if held.count(m) > 1})
            absent = sorted(m.value for m in set(KNOWN_MEANS) - set(held))
            raise MappingError(f"each means needs exactly one mode (duplicated={dupes}, unassigned={absent})")
        self._items = dict(sorted(items.items()))

    def __getitem__(self, mode_id: int) -> TransportMeans:
        return self._items[mode_id]

    def __iter__(self):
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {v.value}" for k, v in self._items.items())
        return f"ModeMapping({{{body}}})"

    def __eq__(self, other):
        if isinstance(other, ModeMapping):
            return self._items == other._items
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self._items.items()))

    def mode_for(self, means: TransportMeans) -> int:
        for mode_id, m in self._items.items():
            if m is means:
                return mode_id
        raise KeyError(means)

    def to_json(self) -> dict[str, str]:
        return {str(k): v.value for k, v in self._items.items()}

    @classmethod
    def from_json(cls, doc: Mapping[str, str]) -> ModeMapping:
        try:
            return cls({int(k): v for k, v in doc.items()})
        except ValueError as exc:
            raise MappingError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> ModeMapping:
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n", encoding="utf-8")


PUBLISHED_MAPPING = ModeMapping(
    {
        1: TransportMeans.BUS,
        2: TransportMeans.SUBWAY,
        3: TransportMeans.DRIVING,
        4: TransportMeans.TAXI,
        5: TransportMeans.WALKING,
        6: TransportMeans.CYCLING,
        7: TransportMeans.BUS_AND_SUBWAY,
        8: TransportMeans.UNKNOWN,
        9: TransportMeans.UNKNOWN,
        10: TransportMeans.UNKNOWN,
        11: TransportMeans.BUS_AND_SHARE_CYCLE,
    }
)
