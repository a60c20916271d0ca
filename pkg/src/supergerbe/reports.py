"""Structured pass/fail reports with deterministic rendering."""

from __future__ import annotations

__all__ = ["Report"]


class Report:
    """Ordered list of named checks; renders to a stable text document."""

    def __init__(self, title: str):
        self.title = title
        self.entries: list[tuple[str, bool, str]] = []

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.entries.append((name, bool(passed), detail))

    def require(self, name: str, passed: bool, detail: str = "") -> bool:
        self.add(name, passed, detail)
        return passed

    def extend(self, other: "Report") -> None:
        for name, passed, detail in other.entries:
            self.add(f"{other.title}: {name}", passed, detail)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.entries)

    def first_failure(self) -> tuple[str, str] | None:
        for name, ok, detail in self.entries:
            if not ok:
                return name, detail
        return None

    def render(self) -> str:
        lines = [f"report: {self.title}", f"status: {'pass' if self.passed else 'fail'}"]
        for name, ok, detail in self.entries:
            mark = "ok  " if ok else "FAIL"
            line = f"  [{mark}] {name}"
            if detail:
                line += f" :: {detail}"
            lines.append(line)
        return "\n".join(lines) + "\n"

    def __str__(self):
        return self.render()
