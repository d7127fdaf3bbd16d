"""Report records for the property verifiers, with JSON/CSV serialization.

JSON payloads are deterministic: keys are sorted, floats use Python's
shortest round-trip repr (17 significant digits when needed), and wall-clock
data never enters the payload.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path


@dataclass
class CheckReport:
    property: str
    samples: int
    max_violation: float
    seed: int
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2,
                          default=_coerce)

    def write(self, directory, name: str | None = None) -> Path:
        path = Path(directory) / f"{name or self.property}.json"
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(self.to_json() + "\n")
        tmp.replace(path)  # atomic per property
        return path


def _coerce(obj):
    """Make numpy scalars and arrays JSON-serializable."""
    if hasattr(obj, "item") and not hasattr(obj, "__len__"):
        return obj.item()
    if hasattr(obj, "tolist"):
        return obj.tolist()
    raise TypeError(f"not JSON-serializable: {type(obj).__name__}")


def write_csv(path, header: list[str], rows: list[list]) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(x)) if isinstance(x, float) else x
                             for x in row])
    return path
