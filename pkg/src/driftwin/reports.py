"""Machine-readable pass/fail reports for axiom and compatibility checks."""

from dataclasses import dataclass, field, asdict
from typing import Any


@dataclass(frozen=True)
class AxiomCheck:
    """Outcome of a single axiom check.

    ``witness`` is None for passing checks and carries the violating
    window tuple / deviation for failing ones.
    """

    name: str
    passed: bool
    witness: dict[str, Any] | None = None
    detail: str = ""

    def __post_init__(self):
        if not self.passed and self.witness is None:
            raise ValueError("a failing check must carry a witness")


@dataclass(frozen=True)
class AxiomReport:
    checks: tuple[AxiomCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> AxiomCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [asdict(c) for c in self.checks]}


@dataclass(frozen=True)
class CompatibilityReport:
    checks: tuple[AxiomCheck, ...]
    max_residual: float = 0.0

    @property
    def compatible(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> AxiomCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "compatible": self.compatible,
            "max_residual": self.max_residual,
            "checks": [asdict(c) for c in self.checks],
        }
