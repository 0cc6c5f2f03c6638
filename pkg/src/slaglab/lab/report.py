"""Experiment reports.

Every numeric expectation is a :class:`Check` carrying its value, target,
tolerance, comparison mode and the kind of target: ``claim`` (a published
value or statement being reproduced), ``oracle`` (an independently computed
value) or ``exact`` (an identity that holds exactly).  ``report.json`` holds everything except wall-clock timing,
which goes to ``timing.json`` so that reports are byte-stable across runs.
"""

from __future__ import annotations

import json
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["Check", "ExperimentReport", "to_jsonable"]

SOURCES = ("claim", "oracle", "exact")
MODES = ("abs", "rel", "max", "min", "equal")


def to_jsonable(obj):
    """Convert numpy scalars/arrays and non-finite floats for JSON output."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    return obj


@dataclass
class Check:
    """A single expectation.

    Modes: ``abs`` ``|value - target| <= tolerance``; ``rel`` the same scaled
    by ``|target|``; ``max`` ``value <= target + tolerance``; ``min``
    ``value >= target - tolerance``; ``equal`` exact equality.
    """

    name: str
    value: object
    target: object
    tolerance: float
    source: str
    mode: str = "abs"
    passed: bool = field(init=False)

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"unknown target kind {self.source!r}")
        if self.mode not in MODES:
            raise ValueError(f"unknown comparison mode {self.mode!r}")
        self.passed = self._evaluate()

    def _evaluate(self) -> bool:
        v, t, tol = self.value, self.target, self.tolerance
        if self.mode == "equal":
            return bool(v == t)
        v, t = float(v), float(t)
        if not math.isfinite(v):
            return False
        if self.mode == "abs":
            return abs(v - t) <= tol
        if self.mode == "rel":
            return abs(v - t) <= tol * abs(t)
        if self.mode == "max":
            return v <= t + tol
        return v >= t - tol

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: value={self.value} target={self.target} ({self.mode}, tol={self.tolerance}, {self.source})"

    def to_dict(self) -> dict:
        return to_jsonable({
            "name": self.name,
            "value": self.value,
            "target": self.target,
            "tolerance": self.tolerance,
            "mode": self.mode,
            "source": self.source,
            "passed": self.passed,
        })


@dataclass
class ExperimentReport:
    scenario: str
    inputs: dict = field(default_factory=dict)
    quantities: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    artifacts: list = field(default_factory=list)
    verdict: str = ""
    timing: dict = field(default_factory=dict)

    def check(self, name, value, target, tolerance, source, mode="abs") -> Check:
        c = Check(name, value, target, tolerance, source, mode)
        self.checks.append(c)
        return c

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @contextmanager
    def timed(self, label: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timing[label] = self.timing.get(label, 0.0) + time.perf_counter() - start

    def to_dict(self) -> dict:
        return to_jsonable({
            "scenario": self.scenario,
            "inputs": self.inputs,
            "quantities": self.quantities,
            "checks": [c.to_dict() for c in self.checks],
            "passed": self.passed,
            "verdict": self.verdict,
            "artifacts": sorted(self.artifacts),
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def add_csv(self, out_dir, name: str, header, rows) -> Path:
        """Write a companion CSV and register it as an artifact."""
        path = Path(out_dir) / name
        np.savetxt(path, np.asarray(rows, dtype=float), fmt="%.17g", delimiter=",",
                   header=",".join(header), comments="")
        self.artifacts.append(name)
        return path

    def write(self, out_dir) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(self.to_json())
        (out / "timing.json").write_text(json.dumps(to_jsonable(self.timing), indent=2, sort_keys=True) + "\n")
        return out / "report.json"

    def summary(self) -> str:
        lines = [f"scenario {self.scenario}: {'PASS' if self.passed else 'FAIL'}"]
        lines += [c.line() for c in self.checks]
        if self.verdict:
            lines.append(f"verdict: {self.verdict}")
        return "\n".join(lines)
