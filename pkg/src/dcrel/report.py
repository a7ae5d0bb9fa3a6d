"""Property reports shared by the checkers and the CLI."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

HOLDS = "holds"
FAILS = "fails"
SKIPPED = "skipped"


def describe(x):
    """JSON-friendly rendering of witnesses (morphisms, cells, tuples...)."""
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    if isinstance(x, dict):
        return {str(k): describe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [describe(v) for v in x]
    if hasattr(x, "describe"):
        return x.describe()
    return repr(x)


@dataclass
class PropertyReport:
    property: str
    verdict: str
    witness: object = None
    probes: object = None
    ms: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def holds(self):
        return self.verdict == HOLDS

    @property
    def fails(self):
        return self.verdict == FAILS

    def to_json(self):
        out = {"property": self.property, "verdict": self.verdict,
               "probes": describe(self.probes), "ms": round(self.ms, 3)}
        if self.witness is not None:
            out["witness"] = describe(self.witness)
        if self.details:
            out["details"] = describe(self.details)
        return out

    def __repr__(self):
        extra = f" witness={describe(self.witness)!r}" if self.witness is not None else ""
        return f"<{self.property}: {self.verdict}{extra}>"


def verdict(ok):
    return HOLDS if ok else FAILS


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = (time.perf_counter() - self.start) * 1000.0
        return False


def make_report(name, ok, witness=None, probes=None, ms=0.0, **details):
    return PropertyReport(name, verdict(ok), None if ok else witness, probes, ms, details)


def timed_report(name, fn, probes=None):
    """Run ``fn() -> (ok, witness, details)`` and wrap the result."""
    with Timer() as t:
        ok, witness, details = fn()
    return PropertyReport(name, verdict(ok), None if ok else witness, probes, t.ms, details or {})
