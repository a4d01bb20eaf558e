"""Evaluation records, count summaries and input parsing.

Two input forms are supported:

* a tab-separated detail file with one line per response or item of
  interest (``item_id  of_interest  found_by_1  found_by_2``), and
* a counts object (JSON) holding the seven response counts plus the
  number of items of interest.

Every test in the package is a function of :class:`ResponseCounts` or of the
per-item :class:`PairedOutcomes` derived from it.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "COUNT_FIELDS",
    "DetailRecord",
    "InputError",
    "PairedOutcomes",
    "ResponseCounts",
    "counts_from_mapping",
    "load_counts",
    "parse_detail_file",
    "parse_detail_lines",
    "records_from_counts",
    "summarize",
    "to_paired_outcomes",
]


class InputError(ValueError):
    """Raised when an input file or counts object fails validation."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class DetailRecord:
    item_id: str
    of_interest: bool
    found_by_1: bool
    found_by_2: bool

    def __post_init__(self):
        if not self.of_interest and not (self.found_by_1 or self.found_by_2):
            raise InputError(
                f"spurious item {self.item_id!r} is not found by either system"
            )


@dataclass(frozen=True)
class PairedOutcomes:
    """Per-item success indicators of two systems on the items of interest."""

    y1: np.ndarray
    y2: np.ndarray

    def __post_init__(self):
        y1 = np.asarray(self.y1, dtype=np.int8)
        y2 = np.asarray(self.y2, dtype=np.int8)
        if y1.ndim != 1 or y1.shape != y2.shape:
            raise InputError("y1 and y2 must be 1-d sequences of equal length")
        if y1.size < 1:
            raise InputError("paired outcomes need at least one item")
        if not (np.isin(y1, (0, 1)).all() and np.isin(y2, (0, 1)).all()):
            raise InputError("paired outcomes must be 0/1 valued")
        y1.setflags(write=False)
        y2.setflags(write=False)
        object.__setattr__(self, "y1", y1)
        object.__setattr__(self, "y2", y2)

    @property
    def n(self) -> int:
        return int(self.y1.size)

    @property
    def differences(self) -> np.ndarray:
        """Per-item differences y1 - y2 in {-1, 0, 1}."""
        return self.y1.astype(np.int64) - self.y2.astype(np.int64)

    def joint_counts(self) -> tuple[int, int, int, int]:
        """Return ``(both, only1, only2, neither)``."""
        both = int(np.sum((self.y1 == 1) & (self.y2 == 1)))
        only1 = int(np.sum((self.y1 == 1) & (self.y2 == 0)))
        only2 = int(np.sum((self.y1 == 0) & (self.y2 == 1)))
        return both, only1, only2, self.n - both - only1 - only2

    @classmethod
    def from_joint_counts(cls, both: int, only1: int, only2: int, neither: int) -> PairedOutcomes:
        y1 = np.repeat(np.array([1, 1, 0, 0], dtype=np.int8), [both, only1, only2, neither])
        y2 = np.repeat(np.array([1, 0, 1, 0], dtype=np.int8), [both, only1, only2, neither])
        return cls(y1, y2)


COUNT_FIELDS = (
    "c_both",
    "c_only1",
    "c_only2",
    "miss_both",
    "s_both",
    "s_only1",
    "s_only2",
    "total_of_interest",
)


@dataclass(frozen=True)
class ResponseCounts:
    """Seven-count summary of a two-system comparison.

    ``c_*`` count items of interest by which systems found them, ``s_*``
    count spurious responses by which systems produced them.
    ``miss_both`` and ``total_of_interest`` may be left as ``None`` when
    only precision is needed; recall and F-score are then undefined.
    """

    c_both: int
    c_only1: int
    c_only2: int
    miss_both: int | None
    s_both: int
    s_only1: int
    s_only2: int
    total_of_interest: int | None = None

    def __post_init__(self):
        for name in COUNT_FIELDS:
            value = getattr(self, name)
            if value is None and name in ("miss_both", "total_of_interest"):
                continue
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise InputError(f"{name} must be an integer, got {value!r}")
            if value < 0:
                raise InputError(f"{name} must be non-negative, got {value}")
            object.__setattr__(self, name, int(value))
        found = self.c_both + self.c_only1 + self.c_only2
        miss, total = self.miss_both, self.total_of_interest
        if miss is None and total is not None:
            miss = total - found
            if miss < 0:
                raise InputError(
                    f"total_of_interest={total} is smaller than the {found} items found"
                )
            object.__setattr__(self, "miss_both", miss)
        elif miss is not None and total is None:
            object.__setattr__(self, "total_of_interest", found + miss)
        elif miss is not None and total is not None and found + miss != total:
            raise InputError(
                f"c_both + c_only1 + c_only2 + miss_both = {found + miss} "
                f"but total_of_interest = {total}"
            )
        if self.total_of_interest == 0:
            raise InputError("total_of_interest must be positive")

    @property
    def has_total(self) -> bool:
        return self.total_of_interest is not None

    def recalled(self, system: int) -> int:
        """R for one system: items of interest it found."""
        _check_system(system)
        return self.c_both + (self.c_only1 if system == 1 else self.c_only2)

    def spurious(self, system: int) -> int:
        """S for one system: responses it produced that are not of interest."""
        _check_system(system)
        return self.s_both + (self.s_only1 if system == 1 else self.s_only2)

    @property
    def n_exclusive(self) -> int:
        """Number of responses produced by exactly one system."""
        return self.c_only1 + self.c_only2 + self.s_only1 + self.s_only2

    def swapped(self) -> ResponseCounts:
        """The same comparison with the system labels exchanged."""
        return ResponseCounts(
            c_both=self.c_both,
            c_only1=self.c_only2,
            c_only2=self.c_only1,
            miss_both=self.miss_both,
            s_both=self.s_both,
            s_only1=self.s_only2,
            s_only2=self.s_only1,
            total_of_interest=self.total_of_interest,
        )

    def paired_outcomes(self) -> PairedOutcomes:
        if not self.has_total:
            raise InputError("paired outcomes need miss_both or total_of_interest")
        return PairedOutcomes.from_joint_counts(
            self.c_both, self.c_only1, self.c_only2, self.miss_both
        )

    def to_dict(self) -> dict[str, int | None]:
        return asdict(self)


def _check_system(system: int) -> None:
    if system not in (1, 2):
        raise ValueError(f"system must be 1 or 2, got {system!r}")


def _parse_flag(token: str, name: str, line: int) -> bool:
    if token == "1":
        return True
    if token == "0":
        return False
    raise InputError(f"{name} must be 0 or 1, got {token!r}", line)


def parse_detail_lines(lines: Iterable[str]) -> list[DetailRecord]:
    """Parse detail-format lines (see :func:`parse_detail_file`)."""
    records = []
    seen: set[str] = set()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise InputError(f"expected 4 tab-separated fields, got {len(fields)}", lineno)
        item_id, *flags = fields
        if not item_id:
            raise InputError("empty item_id", lineno)
        interest, f1, f2 = (
            _parse_flag(tok, name, lineno)
            for tok, name in zip(flags, ("of_interest", "found_by_1", "found_by_2"))
        )
        if item_id in seen:
            raise InputError(f"duplicate item_id {item_id!r}", lineno)
        if not interest and not (f1 or f2):
            raise InputError(
                f"spurious item {item_id!r} is not found by either system", lineno
            )
        seen.add(item_id)
        records.append(DetailRecord(item_id, interest, f1, f2))
    if not records:
        raise InputError("no records")
    return records


def parse_detail_file(path: str | Path) -> list[DetailRecord]:
    """Read a tab-separated detail file.

    Each non-comment line is ``item_id<TAB>of_interest<TAB>found_by_1<TAB>found_by_2``
    with flags strictly ``0`` or ``1``. Lines beginning with ``#`` and blank
    lines are skipped; LF and CRLF endings are both accepted.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_detail_lines(fh)


def summarize(records: Sequence[DetailRecord]) -> ResponseCounts:
    tally = dict.fromkeys(COUNT_FIELDS[:-1], 0)
    for rec in records:
        prefix = "c" if rec.of_interest else "s"
        if rec.found_by_1 and rec.found_by_2:
            tally[f"{prefix}_both"] += 1
        elif rec.found_by_1:
            tally[f"{prefix}_only1"] += 1
        elif rec.found_by_2:
            tally[f"{prefix}_only2"] += 1
        else:
            tally["miss_both"] += 1
    total = sum(1 for rec in records if rec.of_interest)
    if total == 0:
        # no items of interest: recall denominators are unavailable
        return ResponseCounts(**{**tally, "miss_both": None}, total_of_interest=None)
    return ResponseCounts(**tally, total_of_interest=total)


def to_paired_outcomes(records: Sequence[DetailRecord]) -> PairedOutcomes:
    interest = [rec for rec in records if rec.of_interest]
    if not interest:
        raise InputError("no records of interest")
    return PairedOutcomes(
        [int(rec.found_by_1) for rec in interest],
        [int(rec.found_by_2) for rec in interest],
    )


def records_from_counts(counts: ResponseCounts, prefix: str = "r") -> list[DetailRecord]:
    """Materialise one detail record per item/response described by ``counts``."""
    if not counts.has_total:
        raise InputError("records need miss_both or total_of_interest")
    layout = [
        (counts.c_both, True, True, True),
        (counts.c_only1, True, True, False),
        (counts.c_only2, True, False, True),
        (counts.miss_both, True, False, False),
        (counts.s_both, False, True, True),
        (counts.s_only1, False, True, False),
        (counts.s_only2, False, False, True),
    ]
    records = []
    for count, interest, f1, f2 in layout:
        for _ in range(count):
            records.append(DetailRecord(f"{prefix}{len(records)}", interest, f1, f2))
    return records


def counts_from_mapping(data: Mapping[str, object]) -> ResponseCounts:
    """Build counts from a mapping keyed by the :data:`COUNT_FIELDS` names."""
    unknown = set(data) - set(COUNT_FIELDS)
    if unknown:
        raise InputError(f"unknown count field(s): {', '.join(sorted(unknown))}")
    required = [f for f in COUNT_FIELDS if f not in ("miss_both", "total_of_interest")]
    missing = [f for f in required if f not in data]
    if missing:
        raise InputError(f"missing count field(s): {', '.join(missing)}")
    return ResponseCounts(**{f: data.get(f) for f in COUNT_FIELDS})


def load_counts(path: str | Path) -> ResponseCounts:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid counts JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("counts JSON must be an object")
    return counts_from_mapping(data)
