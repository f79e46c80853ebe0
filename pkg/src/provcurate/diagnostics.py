"""Structured diagnostics surfaced through /api/diagnostics.

Parsers and runtime components report non-fatal problems (unsupported
SHACL features, failing label queries) here instead of crashing.
"""

from __future__ import annotations

import threading
from dataclasses import asdict, dataclass


@dataclass(frozen=True, slots=True)
class Diagnostic:
    level: str  # "warning" | "error" | "info"
    code: str
    message: str
    context: str | None = None

    def to_json(self) -> dict:
        return asdict(self)


class DiagnosticLog:
    """Append-only, thread-safe diagnostic collector."""

    def __init__(self):
        self._entries: list[Diagnostic] = []
        self._mutex = threading.Lock()

    def add(self, diag: Diagnostic):
        with self._mutex:
            self._entries.append(diag)

    def warning(self, code: str, message: str, context: str | None = None):
        self.add(Diagnostic("warning", code, message, context))

    def error(self, code: str, message: str, context: str | None = None):
        self.add(Diagnostic("error", code, message, context))

    def extend(self, diags):
        with self._mutex:
            self._entries.extend(diags)

    def entries(self) -> list[Diagnostic]:
        with self._mutex:
            return list(self._entries)

    def clear(self):
        with self._mutex:
            self._entries.clear()
