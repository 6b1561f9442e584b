"""JSON state files and machine-readable run reports.

A state file stores a bipartite density matrix exactly as decimal
[re, im] pairs, row-major:

    {"dA": 2, "dB": 2, "matrix": [[[1.0, 0.0], ...], ...]}

Python's float repr round-trips 17 significant digits, so save/load is
lossless.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .linalg import Dims
from .states import BipartiteDensity


def density_to_dict(rho: BipartiteDensity) -> dict:
    matrix = [
        [[float(entry.real), float(entry.imag)] for entry in row]
        for row in rho.matrix
    ]
    return {"dA": rho.dims.dA, "dB": rho.dims.dB, "matrix": matrix}


def density_from_dict(payload: dict) -> BipartiteDensity:
    for key in ("dA", "dB", "matrix"):
        if key not in payload:
            raise ValueError(f"state file missing required field {key!r}")
    dA, dB = int(payload["dA"]), int(payload["dB"])
    rows = payload["matrix"]
    dim = dA * dB
    if len(rows) != dim or any(len(r) != dim for r in rows):
        raise ValueError(f"state file matrix must be {dim} x {dim} for dA={dA}, dB={dB}")
    M = np.empty((dim, dim), dtype=complex)
    for i, row in enumerate(rows):
        for j, pair in enumerate(row):
            if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
                raise ValueError(
                    f"matrix entry ({i}, {j}) must be a [re, im] pair, got {pair!r}"
                )
            M[i, j] = complex(float(pair[0]), float(pair[1]))
    return BipartiteDensity(M, Dims(dA, dB))


def save_state(rho: BipartiteDensity, path) -> None:
    with open(path, "w") as fh:
        json.dump(density_to_dict(rho), fh)
        fh.write("\n")


def load_state(path) -> BipartiteDensity:
    with open(path) as fh:
        return density_from_dict(json.load(fh))


@dataclass
class RunReport:
    """Echo of one CLI invocation: inputs, named results, check outcomes."""

    command: str
    parameters: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    seed: int | None = None
    wall_time_s: float = 0.0

    def add_check(self, name: str, passed: bool, measured: float) -> None:
        self.checks.append({"name": name, "passed": bool(passed), "measured": float(measured)})

    @property
    def all_passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "results": self.results,
            "checks": self.checks,
            "seed": self.seed,
            "wall_time_s": self.wall_time_s,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        data = json.loads(text)
        return cls(
            command=data["command"],
            parameters=data["parameters"],
            results=data["results"],
            checks=data["checks"],
            seed=data["seed"],
            wall_time_s=data["wall_time_s"],
        )
