"""Per-session asyncio runtime: feed replay, queue serialization, event log.

Each session loop is the single writer of its Session (the core contract);
user messages, injected feed events, cancel, and end requests are serialized
through one queue. The event log is append-only with a monotonically
increasing cursor, so any number of subscribers can replay and tail it.
"""

from __future__ import annotations

import asyncio
import bisect
import logging
from pathlib import Path
from typing import IO

from ..keywords import FeedEvent
from ..session import Session, TranscriptEntry

logger = logging.getLogger(__name__)

RUNNING = "running"
ENDED = "ended"

_IDLE_POLL_S = 0.2


class SessionRuntime:
    def __init__(
        self,
        session_id: str,
        session: Session,
        feed: list[FeedEvent],
        speedup: float,
        transcript_path: Path,
        created_at: float,
    ):
        self.session_id = session_id
        self.session = session
        self.feed = sorted(feed, key=lambda e: e.t)
        self.speedup = speedup
        self.transcript_path = transcript_path
        self.created_at = created_at
        self.status = RUNNING
        self.events: list[dict] = []
        self._seq = 0
        self._feed_idx = 0
        self._queue: asyncio.Queue[tuple] = asyncio.Queue()
        self._cond = asyncio.Condition()
        self._stopping = False
        self._task: asyncio.Task | None = None
        self._handle: IO[str] | None = None

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> None:
        self.transcript_path.parent.mkdir(parents=True, exist_ok=True)
        self._handle = open(self.transcript_path, "w", encoding="utf-8")
        self.session.transcript_sink = self._write_entry
        self._task = asyncio.get_running_loop().create_task(self._run())

    def _write_entry(self, entry: TranscriptEntry) -> None:
        if self._handle is not None:
            self._handle.write(entry.to_json() + "\n")
            self._handle.flush()

    async def end(self) -> None:
        if self.status == ENDED:
            return
        self._stopping = True
        await self._queue.put(("noop",))
        if self._task is not None:
            try:
                await asyncio.wait_for(asyncio.shield(self._task), timeout=10.0)
            except asyncio.TimeoutError:
                logger.error("session %s loop did not stop in time", self.session_id)
                self._task.cancel()

    # -- request entry points (called from endpoint handlers) ---------------

    async def post_message(self, text: str) -> None:
        await self._queue.put(("message", text))

    async def post_feed(self, event: FeedEvent) -> None:
        await self._queue.put(("feed", event))

    async def post_cancel(self) -> None:
        await self._queue.put(("cancel",))

    @property
    def feed_watermark(self) -> float:
        return self.session._last_feed_t

    # -- event log -----------------------------------------------------------

    async def _publish(self, batch: list[dict]) -> None:
        if not batch:
            return
        async with self._cond:
            for event in batch:
                self._seq += 1
                self.events.append({"seq": self._seq, **event})
            self._cond.notify_all()

    async def events_since(self, cursor: int):
        """Yield events with seq > cursor: replay history, then tail live ones."""
        index = max(cursor, 0)
        while True:
            if index < len(self.events):
                event = self.events[index]
                index += 1
                yield event
                continue
            if self.status == ENDED:
                return
            async with self._cond:
                if index >= len(self.events) and self.status != ENDED:
                    try:
                        await asyncio.wait_for(self._cond.wait(), timeout=5.0)
                    except asyncio.TimeoutError:
                        pass

    # -- the loop ------------------------------------------------------------

    def _logical_now(self, loop: asyncio.AbstractEventLoop, wall0: float) -> float:
        return (loop.time() - wall0) * self.speedup

    def _ingest_due_feed(self, lnow: float) -> list[dict]:
        batch: list[dict] = []
        while self._feed_idx < len(self.feed) and self.feed[self._feed_idx].t <= lnow:
            batch.extend(self.session.ingest_feed(self.feed[self._feed_idx]))
            self._feed_idx += 1
        return batch

    async def _run(self) -> None:
        loop = asyncio.get_running_loop()
        wall0 = loop.time()
        try:
            while not self._stopping:
                lnow = self._logical_now(loop, wall0)
                batch = self._ingest_due_feed(lnow)
                batch.extend(self.session.tick(lnow))
                await self._publish(batch)

                deadline = self.session.next_deadline()
                if self._feed_idx < len(self.feed):
                    feed_t = self.feed[self._feed_idx].t
                    deadline = feed_t if deadline is None else min(deadline, feed_t)
                if deadline is None:
                    timeout = _IDLE_POLL_S
                else:
                    timeout = min(max((deadline - lnow) / self.speedup, 0.0), _IDLE_POLL_S)
                try:
                    item = await asyncio.wait_for(self._queue.get(), timeout=max(timeout, 0.001))
                except asyncio.TimeoutError:
                    continue
                lnow = self._logical_now(loop, wall0)
                batch = self._ingest_due_feed(lnow)
                try:
                    if item[0] == "message":
                        batch.extend(self.session.on_user_utterance(item[1], lnow))
                    elif item[0] == "cancel":
                        batch.extend(self.session.cancel(lnow))
                    elif item[0] == "feed":
                        event: FeedEvent = item[1]
                        if event.t <= lnow:
                            batch.extend(self.session.ingest_feed(event))
                        else:
                            # future event: lands at or after _feed_idx, which
                            # stays valid because everything before it is past
                            bisect.insort(self.feed, event, key=lambda e: e.t)
                except ValueError as exc:
                    logger.warning("session %s dropped request: %s", self.session_id, exc)
                await self._publish(batch)
        except Exception:
            logger.exception("session %s loop crashed", self.session_id)
        finally:
            await self._finalize()

    async def _finalize(self) -> None:
        async with self._cond:
            self.status = ENDED
            self._cond.notify_all()
        if self._handle is not None:
            self._handle.close()
            self._handle = None
