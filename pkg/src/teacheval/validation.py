"""Validation findings: problems reported as data rather than exceptions."""

from __future__ import annotations

from dataclasses import dataclass, field


#: Finding categories. ``completeness`` findings may be downgraded to
#: warnings by lenient callers; the others always indicate real trouble.
CATEGORY_STRUCTURE = "structure"
CATEGORY_COMPLETENESS = "completeness"
CATEGORY_CONSISTENCY = "consistency"


@dataclass(frozen=True)
class Finding:
    code: str
    location: str
    message: str
    category: str = CATEGORY_STRUCTURE

    def render(self) -> str:
        return f"[{self.code}] {self.location}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.findings

    def by_category(self, category: str) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.category == category)

    def render(self) -> str:
        if self.ok:
            return "OK: no findings"
        lines = [f.render() for f in self.findings]
        lines.append(f"{len(self.findings)} finding(s)")
        return "\n".join(lines)
