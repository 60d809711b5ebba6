"""Pass/fail reports for the verification suites."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class IdentityCheck:
    name: str
    passed: bool
    residual: float | None = None   # None for exact symbolic checks
    tolerance: float | None = None
    detail: str = ""

    def as_dict(self) -> dict:
        d: dict = {"name": self.name, "passed": bool(self.passed)}
        if self.residual is not None:
            d["residual"] = float(self.residual)
        if self.tolerance is not None:
            d["tolerance"] = float(self.tolerance)
        if self.detail:
            d["detail"] = self.detail
        return d


@dataclass
class IdentityReport:
    title: str
    checks: list[IdentityCheck] = field(default_factory=list)

    def add(self, name: str, passed: bool, residual: float | None = None,
            tolerance: float | None = None, detail: str = "") -> IdentityCheck:
        chk = IdentityCheck(name, bool(passed), residual, tolerance, detail)
        self.checks.append(chk)
        return chk

    def add_exact(self, name: str, passed: bool, detail: str = "") -> IdentityCheck:
        return self.add(name, passed, detail=detail)

    def add_numeric(self, name: str, residual: float, tolerance: float,
                    detail: str = "") -> IdentityCheck:
        return self.add(name, residual < tolerance, residual, tolerance, detail)

    def extend(self, other: "IdentityReport") -> None:
        self.checks.extend(other.checks)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def residual(self, name: str) -> float | None:
        for c in self.checks:
            if c.name == name:
                return c.residual
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {
            "title": self.title,
            "passed": self.all_passed,
            "checks": [c.as_dict() for c in self.checks],
        }

    def summary_lines(self) -> list[str]:
        out = []
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            if c.residual is not None:
                out.append(f"{status}  {c.name}  residual={c.residual:.3e}"
                           f"  tol={c.tolerance:.1e}")
            else:
                out.append(f"{status}  {c.name}  (exact)")
        return out
