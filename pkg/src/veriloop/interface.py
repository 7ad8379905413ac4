"""Port-interface validation against a declared port specification."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .vast import AstModule


@dataclass(frozen=True)
class PortSpec:
    """Expected interface: (name, direction, width) triples, order-insensitive."""

    ports: tuple[tuple[str, str, int], ...]

    def __post_init__(self):
        names = [p[0] for p in self.ports]
        if len(names) != len(set(names)):
            raise ValueError("duplicate port names in spec")

    @classmethod
    def from_json(cls, path: str | Path) -> "PortSpec":
        """Load ``[{"name":..., "direction":..., "width":...}, ...]``."""
        data = json.loads(Path(path).read_text())
        return cls(tuple((d["name"], d["direction"], int(d["width"]))
                         for d in data))


def validate_interface(module: AstModule, spec: PortSpec) -> list[str]:
    """Empty list when the module's ports match the spec exactly."""
    actual = {p.name: (p.direction, p.width) for p in module.ports}
    expected = {name: (direction, width) for name, direction, width in spec.ports}
    mismatches: list[str] = []
    for name, (direction, width) in expected.items():
        if name not in actual:
            mismatches.append(f"{name}: missing port")
            continue
        got_dir, got_width = actual[name]
        if got_dir != direction:
            mismatches.append(f"{name}: direction {got_dir} ≠ {direction}")
        if got_width != width:
            mismatches.append(f"{name}: width {got_width} ≠ {width}")
    for name in actual:
        if name not in expected:
            mismatches.append(f"{name}: unexpected port")
    return mismatches
