"""Check results and deterministic reports.

Every verification routine in this package reduces to one or more
``CheckResult`` values: a named residual compared against a tolerance,
with the worst sample point attached.  ``Report`` is an ordered
collection of results whose text renderings are byte-deterministic,
so two runs over the same inputs produce identical output.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float
    worst_point: object | None = None
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and self.residual <= self.tolerance

    @property
    def status(self) -> str:
        if self.error is not None:
            return "error"
        return "pass" if self.passed else "fail"

    def renamed(self, name: str) -> "CheckResult":
        return replace(self, name=name)

    def max_with(self, other: "CheckResult") -> "CheckResult":
        """Combine two results for the same check, keeping the worse one."""
        if other.error is not None and self.error is None:
            return replace(other, name=self.name)
        if self.error is not None:
            return self
        if other.residual > self.residual:
            return replace(other, name=self.name)
        return self


def combine_max(name: str, results, tolerance: float) -> CheckResult:
    """Reduce an iterable of results to one entry holding the worst residual."""
    out = CheckResult(name=name, residual=0.0, tolerance=tolerance)
    for r in results:
        out = out.max_with(r)
    return replace(out, tolerance=tolerance)


class Report:
    """Ordered map of check name to result with stable text output."""

    def __init__(self):
        self._entries: dict[str, CheckResult] = {}

    def add(self, result: CheckResult) -> None:
        if result.name in self._entries:
            raise ValueError(f"duplicate check name {result.name!r}")
        self._entries[result.name] = result

    def absorb(self, result: CheckResult) -> None:
        """Add, or max-merge when the name is already present."""
        if result.name in self._entries:
            self._entries[result.name] = self._entries[result.name].max_with(result)
        else:
            self._entries[result.name] = result

    def extend(self, results) -> None:
        for r in results:
            self.add(r)

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def __getitem__(self, name: str) -> CheckResult:
        return self._entries[name]

    def __len__(self) -> int:
        return len(self._entries)

    def results(self) -> list[CheckResult]:
        return list(self._entries.values())

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self._entries.values())

    @property
    def max_residual(self) -> float:
        finite = [r.residual for r in self._entries.values() if r.error is None]
        return max(finite, default=0.0)

    def table(self) -> str:
        """Fixed-width summary table, one line per check."""
        rows = [("check", "residual", "tolerance", "worst", "status")]
        for r in self._entries.values():
            res = "-" if r.error is not None else f"{r.residual:.6e}"
            worst = "-" if r.worst_point is None else str(r.worst_point)
            rows.append((r.name, res, f"{r.tolerance:.1e}", worst, r.status))
        widths = [max(len(row[i]) for row in rows) for i in range(5)]
        lines = []
        for row in rows:
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        n = len(self._entries)
        good = sum(1 for r in self._entries.values() if r.passed)
        lines.append(f"{n} checks, {good} passed, {n - good} failed")
        return "\n".join(lines)

    def kv_lines(self) -> list[str]:
        """Flat key = value lines for machine consumption."""
        lines = []
        for r in self._entries.values():
            lines.append(f"{r.name}.residual = {r.residual!r}")
            lines.append(f"{r.name}.tolerance = {r.tolerance!r}")
            worst = "-" if r.worst_point is None else str(r.worst_point)
            lines.append(f"{r.name}.worst_point = {worst}")
            lines.append(f"{r.name}.status = {r.status}")
            if r.error is not None:
                lines.append(f"{r.name}.error = {r.error}")
        return lines
