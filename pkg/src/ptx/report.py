"""Check reports that keep residuals, not just verdicts."""

from __future__ import annotations

from dataclasses import dataclass, field

from .poly import Poly


def is_zero_residual(r) -> bool:
    if r is None:
        return True
    if isinstance(r, Poly):
        return r.is_zero()
    if isinstance(r, (list, tuple)):
        return all(is_zero_residual(x) for x in r)
    if hasattr(r, "is_zero"):
        return r.is_zero()
    raise TypeError(f"cannot test residual of type {type(r).__name__}")


def format_residual(r) -> str:
    if isinstance(r, Poly):
        return r.to_str()
    if hasattr(r, "to_str"):
        return r.to_str()
    if isinstance(r, (list, tuple)):
        return "[" + "; ".join(format_residual(x) for x in r) + "]"
    return str(r)


@dataclass
class Failure:
    condition: str
    where: str
    residual: object

    def __str__(self):
        return f"{self.condition} at {self.where}: residual {format_residual(self.residual)}"


@dataclass
class Report:
    title: str = ""
    conditions: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    checked: dict = field(default_factory=dict)
    precondition: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def declare(self, condition: str):
        if condition not in self.conditions:
            self.conditions.append(condition)
            self.checked.setdefault(condition, 0)

    def record(self, condition: str, where: str, residual) -> bool:
        self.declare(condition)
        self.checked[condition] += 1
        if is_zero_residual(residual):
            return True
        self.failures.append(Failure(condition, where, residual))
        return False

    def fail_precondition(self, where: str, residual=None, message: str = "precondition"):
        self.precondition.append(Failure(message, where, residual))

    @property
    def ok(self) -> bool:
        return not self.failures and not self.precondition

    def passed(self, condition: str) -> bool:
        return all(f.condition != condition for f in self.failures)

    def failures_for(self, condition: str) -> list:
        return [f for f in self.failures if f.condition == condition]

    def merge(self, other: "Report") -> "Report":
        for c in other.conditions:
            self.declare(c)
            self.checked[c] += other.checked.get(c, 0)
        self.failures.extend(other.failures)
        self.precondition.extend(other.precondition)
        self.notes.extend(other.notes)
        return self

    def summary(self) -> str:
        marks = [f"{c} {'✓' if self.passed(c) else '✗'}" for c in self.conditions]
        return " ".join(marks)

    def lines(self) -> list[str]:
        out = []
        if self.precondition:
            out.extend(f"precondition failed: {f}" for f in self.precondition)
        if self.conditions:
            out.append(self.summary())
        out.extend(str(f) for f in self.failures)
        out.extend(self.notes)
        return out

    def __str__(self):
        return "\n".join(self.lines())

    def __bool__(self):
        return self.ok
