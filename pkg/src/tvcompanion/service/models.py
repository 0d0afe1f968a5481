"""Pydantic request/response models for the session service."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field, model_validator

from ..session import SessionConfig


class SessionConfigModel(BaseModel):
    mean_interval_s: float = Field(default=80.0, gt=0)
    disclosure_ratio: float = Field(default=0.75, gt=0, lt=1)
    silence_timeout_s: float = Field(default=15.0, gt=0)
    max_no_answer: int = Field(default=2, ge=0)
    wmd_threshold: float = Field(default=0.35, ge=0, le=1)
    cooldown_utterances: int = Field(default=10, ge=0)
    rng_seed: int = 0
    min_confidence: float = Field(default=0.5, ge=0, le=1)
    news_max_age_s: float = Field(default=7 * 86400.0, ge=0)
    session_start_epoch: float | None = None
    end_lexicon: list[str] | None = None

    def to_config(self, default_start_epoch: float) -> SessionConfig:
        kwargs: dict[str, Any] = self.model_dump()
        if kwargs.pop("end_lexicon") is not None:
            kwargs["end_lexicon"] = tuple(self.end_lexicon or ())
        if kwargs["session_start_epoch"] is None:
            kwargs["session_start_epoch"] = default_start_epoch
        return SessionConfig(**kwargs)


class FeedEventModel(BaseModel):
    t: float = Field(ge=0)
    kind: Literal["caption", "detection"]
    text: str
    confidence: float = Field(default=1.0, ge=0, le=1)


class CreateSessionRequest(BaseModel):
    config: SessionConfigModel = Field(default_factory=SessionConfigModel)
    feed: list[FeedEventModel] | None = None
    feed_path: str | None = None
    speedup: float = Field(default=1.0, gt=0)

    @model_validator(mode="after")
    def _one_feed_source(self) -> "CreateSessionRequest":
        if self.feed is not None and self.feed_path is not None:
            raise ValueError("provide either inline feed or feed_path, not both")
        return self


class SessionInfo(BaseModel):
    session_id: str
    created_at: float
    status: Literal["running", "ended"]
    mode: str
    clock: float
    speedup: float
    config: SessionConfigModel


class MessageRequest(BaseModel):
    text: str


class AckResponse(BaseModel):
    ok: bool = True
    detail: str | None = None


class StatsResponse(BaseModel):
    conversation_count: int
    turn_counts: list[int]
    mean: float | None
    max: int | None
    robot_mean: float | None
    robot_max: int | None


class EventRecord(BaseModel):
    seq: int
    type: str
    data: dict
