from dataclasses import dataclass, field
from typing import Any


@dataclass
class CheckReport:
    """Outcome of one identity check over a family of instances."""
    identity: str
    checked: int = 0
    mismatches: list[dict[str, Any]] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.mismatches

    @property
    def success_rate(self) -> float:
        if self.checked == 0:
            return 100.0
        return (self.checked - len(self.mismatches)) / self.checked * 100

    def record(self, ok: bool, **witness: Any):
        self.checked += 1
        if not ok:
            self.mismatches.append(witness)

    def merge(self, other: "CheckReport"):
        self.checked += other.checked
        self.mismatches.extend(other.mismatches)

    def to_dict(self, max_mismatches: int = 5) -> dict[str, Any]:
        return {
            "identity": self.identity,
            "passed": self.passed,
            "checked": self.checked,
            "mismatch_count": len(self.mismatches),
            "mismatches": self.mismatches[:max_mismatches],
            "details": self.details,
        }
