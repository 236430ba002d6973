from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any


def _clean(value: Any) -> Any:
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values."""
    if hasattr(value, "tolist"):
        value = value.tolist()
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


@dataclass
class Report:
    """Pass/fail record shared by every check in the package.

    ``metrics`` holds real-valued residuals, ``certificates`` exact strings
    (rationals, quadratic numbers, group elements), ``witnesses`` lists of
    exact evidence and ``provenance`` the producing operation and its inputs.
    """

    passed: bool
    metrics: dict[str, Any] = field(default_factory=dict)
    certificates: dict[str, Any] = field(default_factory=dict)
    witnesses: dict[str, Any] = field(default_factory=dict)
    provenance: dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return bool(self.passed)

    def to_dict(self) -> dict[str, Any]:
        return {
            "pass": bool(self.passed),
            "metrics": _clean(self.metrics),
            "certificates": _clean(self.certificates),
            "witnesses": _clean(self.witnesses),
            "provenance": _clean(self.provenance),
        }

    def to_json(self, pretty: bool = False) -> str:
        return json.dumps(self.to_dict(), indent=2 if pretty else None, sort_keys=False)

    @classmethod
    def merge(cls, name: str, parts: dict[str, "Report"]) -> "Report":
        return cls(
            passed=all(p.passed for p in parts.values()),
            metrics={k: p.metrics for k, p in parts.items()},
            certificates={k: p.certificates for k, p in parts.items() if p.certificates},
            witnesses={k: p.witnesses for k, p in parts.items() if p.witnesses},
            provenance={"op": name, "parts": {k: bool(p.passed) for k, p in parts.items()}},
        )
