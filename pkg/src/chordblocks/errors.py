"""Error base class shared by every module.

Each domain error carries a stable machine-readable ``code`` so the API
layer can return typed error codes without maintaining a separate map.
"""

from __future__ import annotations

from typing import Any


class EngineError(Exception):
    """Base for all domain errors; ``code`` is stable across releases."""

    code = "E_ENGINE"

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.message = message
        self.details = details

    def __str__(self) -> str:
        if self.details:
            extras = ", ".join(f"{k}={v!r}" for k, v in self.details.items())
            return f"{self.message} ({extras})"
        return self.message
