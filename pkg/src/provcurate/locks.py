"""TTL edit locks with compare-and-set semantics.

In-memory implementation of the same contract an external key-value store
would provide: at most one live lock per entity, unguessable tokens,
re-acquisition by the owner refreshes the TTL without rotating the token.
An optional history log supports the mutual-exclusion test suite.
"""

from __future__ import annotations

import secrets
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Callable

from .errors import LockHeldError, LockRequiredError, LockTokenError
from .provenance import AgentId
from .terms import Iri

__all__ = ["LockRecord", "LockEvent", "LockStore"]


@dataclass(frozen=True, slots=True)
class LockRecord:
    entity: Iri
    owner: AgentId
    token: str
    expires_at: datetime


@dataclass(frozen=True, slots=True)
class LockEvent:
    action: str  # "acquire" | "refresh" | "release" | "expire"
    entity: Iri
    owner: AgentId
    token: str
    at: datetime
    expires_at: datetime


class LockStore:
    def __init__(
        self,
        ttl_seconds: int = 300,
        clock: Callable[[], datetime] | None = None,
        record_history: bool = False,
    ):
        if ttl_seconds < 10:
            raise ValueError("lock TTL must be at least 10 seconds")
        self.ttl = timedelta(seconds=ttl_seconds)
        self._clock = clock or (lambda: datetime.now(timezone.utc))
        self._locks: dict[Iri, LockRecord] = {}
        self._mutex = threading.Lock()
        self.history: list[LockEvent] | None = [] if record_history else None

    def _log(self, action: str, record: LockRecord, at: datetime):
        if self.history is not None:
            self.history.append(
                LockEvent(action, record.entity, record.owner, record.token, at, record.expires_at)
            )

    def acquire(self, entity: Iri, agent: AgentId) -> LockRecord:
        with self._mutex:
            now = self._clock()
            live = self._locks.get(entity)
            if live is not None and live.expires_at <= now:
                self._log("expire", live, now)
                live = None
            if live is not None and live.owner != agent:
                raise LockHeldError(entity, live.owner.value, live.expires_at)
            token = live.token if live is not None else secrets.token_urlsafe(32)
            record = LockRecord(entity, agent, token, now + self.ttl)
            self._locks[entity] = record
            self._log("refresh" if live is not None else "acquire", record, now)
            return record

    def release(self, entity: Iri, token: str) -> bool:
        """True when a live lock was released; absent lock is a no-op."""
        with self._mutex:
            now = self._clock()
            live = self._locks.get(entity)
            if live is not None and live.expires_at <= now:
                self._log("expire", live, now)
                self._locks.pop(entity, None)
                live = None
            if live is None:
                return False
            if live.token != token:
                raise LockTokenError(f"presented token does not hold the lock on {entity}")
            self._locks.pop(entity, None)
            self._log("release", live, now)
            return True

    def require(self, entity: Iri, agent: AgentId, token: str | None) -> LockRecord:
        """Gate for mutating requests: a live lock owned by `agent` whose
        token matches must exist."""
        with self._mutex:
            now = self._clock()
            live = self._locks.get(entity)
            if live is not None and live.expires_at <= now:
                self._log("expire", live, now)
                self._locks.pop(entity, None)
                live = None
            if token is None or live is None:
                raise LockRequiredError(f"no live edit lock for {entity}; acquire one first")
            if live.token != token or live.owner != agent:
                raise LockTokenError(f"presented token does not hold the lock on {entity}")
            return live

    def holder(self, entity: Iri) -> LockRecord | None:
        with self._mutex:
            live = self._locks.get(entity)
            if live is not None and live.expires_at <= self._clock():
                return None
            return live
