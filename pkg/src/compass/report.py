"""Shared pass/fail report record returned by the checker operations."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any


@dataclass
class Report:
    """Outcome of a numerical assertion.

    worst is the signed margin of the tightest (or violating) instance,
    oriented so that worst <= tolerance means pass; worst_at locates it.
    """

    name: str
    passed: bool
    tolerance: float
    worst: float | None = None
    worst_at: Any = None
    details: dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "tolerance": self.tolerance,
            "worst": self.worst,
            "worst_at": _plain(self.worst_at),
            "details": _plain(self.details),
        }


def _plain(obj: Any) -> Any:
    """Recursively convert report payloads to JSON-ready primitives."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else repr(obj)
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "tolist"):  # numpy scalars and arrays
        return _plain(obj.tolist())
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    return repr(obj)
