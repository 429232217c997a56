"""Single-use forward caches."""

from __future__ import annotations

from typing import Any

from .errors import StaleCacheError


class LayerCache(dict):
    """Activations stored by a forward pass for exactly one backward pass.

    ``op`` names the producing operation so a backward can reject caches that
    came from a different layer type.
    """

    def __init__(self, op: str, **data: Any):
        super().__init__(**data)
        self.op = op
        self.consumed = False

    def claim(self, op: str) -> "LayerCache":
        if self.op != op:
            raise StaleCacheError(f"cache from {self.op!r} passed to {op!r} backward")
        if self.consumed:
            raise StaleCacheError(f"{op} cache already consumed by a backward pass")
        self.consumed = True
        return self
