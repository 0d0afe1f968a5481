"""Turn statistics over session transcripts.

A conversation is the set of transcript entries sharing a conversation_id;
its turn count is the number of robot and user utterances inside it. Because
the question whether "turns" counts both speakers or robot lines only is a
matter of convention, both variants are reported.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .session import TranscriptEntry

logger = logging.getLogger(__name__)


@dataclass
class TurnStats:
    conversation_count: int = 0
    turn_counts: list[int] = field(default_factory=list)
    robot_turn_counts: list[int] = field(default_factory=list)

    @property
    def mean(self) -> float | None:
        if not self.turn_counts:
            return None
        return sum(self.turn_counts) / len(self.turn_counts)

    @property
    def max(self) -> int | None:
        return max(self.turn_counts) if self.turn_counts else None

    @property
    def robot_mean(self) -> float | None:
        if not self.robot_turn_counts:
            return None
        return sum(self.robot_turn_counts) / len(self.robot_turn_counts)

    @property
    def robot_max(self) -> int | None:
        return max(self.robot_turn_counts) if self.robot_turn_counts else None


def turn_stats(entries: Iterable[TranscriptEntry]) -> TurnStats:
    both: dict[int, int] = {}
    robot: dict[int, int] = {}
    for entry in entries:
        cid = entry.conversation_id
        if cid is None or entry.speaker not in ("robot", "user"):
            continue
        both[cid] = both.get(cid, 0) + 1
        if entry.speaker == "robot":
            robot[cid] = robot.get(cid, 0) + 1
    ordered = sorted(both)
    return TurnStats(
        conversation_count=len(ordered),
        turn_counts=[both[cid] for cid in ordered],
        robot_turn_counts=[robot.get(cid, 0) for cid in ordered],
    )


def parse_transcript(path: str | Path) -> list[TranscriptEntry]:
    """Read a JSON-lines transcript; malformed lines are reported and skipped."""
    entries: list[TranscriptEntry] = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                entries.append(TranscriptEntry.from_dict(json.loads(line)))
            except (ValueError, KeyError) as exc:
                logger.error("%s: line %d: malformed transcript entry (%s)", path, lineno, exc)
    return entries


def _fmt_mean(value: float | None) -> str:
    return "-" if value is None else f"{value:.2f}"


def _fmt_max(value: int | None) -> str:
    return "-" if value is None else str(value)


def format_stats_table(groups: Sequence[tuple[str, TurnStats]]) -> str:
    """Average/Maximum rows with one column per input group."""
    names = [name for name, _ in groups]
    rows = [
        ["Turns"] + names,
        ["Average"] + [_fmt_mean(stats.mean) for _, stats in groups],
        ["Maximum"] + [_fmt_max(stats.max) for _, stats in groups],
        ["Average (robot only)"] + [_fmt_mean(stats.robot_mean) for _, stats in groups],
        ["Maximum (robot only)"] + [_fmt_max(stats.robot_max) for _, stats in groups],
        ["Conversations"] + [str(stats.conversation_count) for _, stats in groups],
    ]
    widths = [max(len(row[col]) for row in rows) for col in range(len(rows[0]))]
    lines = []
    for row in rows:
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
    return "\n".join(lines)
