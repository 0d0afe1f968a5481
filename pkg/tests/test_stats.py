import json

import pytest

from tvcompanion import TranscriptEntry, format_stats_table, parse_transcript, turn_stats


def _entry(t, speaker, kind, cid, text="x"):
    return TranscriptEntry(t=t, speaker=speaker, text=text, kind=kind,
                           conversation_id=cid,
                           engine="tv_program" if kind == "response" else None)


def _conversation(cid, turns, start=0.0):
    """question, then alternating user/response entries, totalling `turns`."""
    entries = [_entry(start, "robot", "question", cid)]
    speaker_cycle = ["user", "robot"]
    for i in range(turns - 1):
        speaker = speaker_cycle[i % 2]
        kind = "user" if speaker == "user" else "response"
        entries.append(_entry(start + i + 1, speaker, kind, cid))
    entries.append(_entry(start + turns + 1, "system", "event", cid))
    return entries


class TestTurnStats:
    def test_hand_computed_fixture(self):
        entries = _conversation(1, 3) + _conversation(2, 5, start=100.0)
        stats = turn_stats(entries)
        assert stats.conversation_count == 2
        assert stats.turn_counts == [3, 5]
        assert stats.mean == 4.0
        assert stats.max == 5

    def test_mean_is_sum_over_count(self):
        entries = _conversation(1, 4) + _conversation(2, 7, 100.0) + \
            _conversation(3, 2, 200.0)
        stats = turn_stats(entries)
        assert abs(stats.mean - sum(stats.turn_counts) / 3) < 1e-9
        assert stats.max == max(stats.turn_counts)

    def test_empty_transcript(self):
        stats = turn_stats([])
        assert stats.conversation_count == 0
        assert stats.mean is None
        assert stats.max is None

    def test_system_entries_not_counted(self):
        entries = _conversation(1, 3)
        assert turn_stats(entries).turn_counts == [3]

    def test_entries_outside_conversations_ignored(self):
        entries = [_entry(0.0, "robot", "disclosure", None),
                   _entry(1.0, "user", "user", None)] + _conversation(1, 3, 10.0)
        assert turn_stats(entries).turn_counts == [3]

    def test_robot_only_variant(self):
        stats = turn_stats(_conversation(1, 5))
        assert stats.turn_counts == [5]
        assert stats.robot_turn_counts == [3]  # question + two responses


class TestFormatTable:
    def test_average_maximum_rows(self):
        stats = turn_stats(_conversation(1, 3) + _conversation(2, 5, 100.0))
        table = format_stats_table([("demo", stats)])
        lines = table.splitlines()
        assert lines[0].startswith("Turns")
        assert lines[1].startswith("Average") and "4.00" in lines[1]
        assert lines[2].startswith("Maximum") and "5" in lines[2]

    def test_empty_group_prints_dash(self):
        table = format_stats_table([("empty", turn_stats([]))])
        assert "-" in table

    def test_multiple_groups_as_columns(self):
        a = turn_stats(_conversation(1, 3))
        b = turn_stats(_conversation(1, 7))
        table = format_stats_table([("g1", a), ("g2", b)])
        header = table.splitlines()[0]
        assert "g1" in header and "g2" in header
        average = table.splitlines()[1]
        assert "3.00" in average and "7.00" in average


class TestParseTranscript:
    def test_round_trip(self, tmp_path):
        entries = _conversation(1, 3)
        path = tmp_path / "t.jsonl"
        path.write_text("".join(e.to_json() + "\n" for e in entries),
                        encoding="utf-8")
        parsed = parse_transcript(path)
        assert len(parsed) == len(entries)
        assert turn_stats(parsed).turn_counts == [3]

    def test_malformed_line_reported_and_skipped(self, tmp_path, caplog):
        entries = _conversation(1, 3)
        lines = [e.to_json() for e in entries]
        lines.insert(1, "{not json")
        path = tmp_path / "t.jsonl"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with caplog.at_level("ERROR"):
            parsed = parse_transcript(path)
        assert len(parsed) == len(entries)
        assert any("line 2" in r.message for r in caplog.records)
