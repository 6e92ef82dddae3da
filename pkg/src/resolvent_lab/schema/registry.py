from __future__ import annotations

from dataclasses import dataclass
from html import escape
from typing import Any, Callable, Iterable, Iterator, Optional

from ..base import CheckModule, CheckName
from .pretty import html_table, summarize

# A precondition returns None when the task is applicable, else the reason.
Precondition = Callable[[Any, Optional[float]], Optional[str]]
Runner = Callable[[Any], Any]


@dataclass(frozen=True)
class CheckDefinition:
    """
    One registered check: what it verifies, where it lives and how to run it.

    ``per_r`` checks run once per resolvent parameter; the others run once per
    generator (and may consume the whole list of r values).
    """

    name: CheckName
    module: CheckModule
    description: str
    per_r: bool
    run: Runner
    precondition: Precondition

    def __repr__(self) -> str:
        return f"<CheckDefinition {self.name.value} module={self.module.value} per_r={self.per_r}>"


class CheckRegistry:
    """
    Name-indexed registry of the checks the suite can run.
    """

    def __init__(self, definitions: Iterable[CheckDefinition]):
        self._checks: dict[str, CheckDefinition] = {}
        for d in definitions:
            if d.name.value in self._checks:
                raise ValueError(f"check '{d.name.value}' registered twice")
            self._checks[d.name.value] = d

    def get(self, name: str) -> CheckDefinition:
        return self._checks[str(CheckName(name).value)]

    def try_get(self, name: str | None) -> CheckDefinition | None:
        if not CheckName.has(name):
            return None
        return self._checks.get(name)  # type: ignore[arg-type]

    def has(self, name: str | None) -> bool:
        return self.try_get(name) is not None

    def names(self) -> tuple[str, ...]:
        return tuple(self._checks)

    def checks(self) -> Iterator[CheckDefinition]:
        return iter(self._checks.values())

    def by_module(self, module: str) -> tuple[CheckDefinition, ...]:
        return tuple(d for d in self._checks.values() if d.module.value == module)

    def describe(self, name: str) -> str:
        d = self.try_get(name)
        return d.description if d else ""

    def require(self, names: Iterable[str]) -> list[CheckDefinition]:
        """
        Resolve a list of check names, raising KeyError listing every unknown one.
        """
        names = list(names)
        unknown = [n for n in names if not self.has(n)]
        if unknown:
            raise KeyError(f"unknown checks {unknown}; registered: {sorted(self._checks)}")
        return [self._checks[n] for n in names]

    def summary(self) -> dict[str, int]:
        return {m.value: len(self.by_module(m.value)) for m in CheckModule}

    def __len__(self) -> int:
        return len(self._checks)

    def __contains__(self, name: object) -> bool:
        return isinstance(name, str) and self.has(name)

    def __repr__(self) -> str:
        return f"<CheckRegistry checks={len(self._checks)} " + " ".join(
            f"{k}={v}" for k, v in self.summary().items()
        ) + ">"

    def __str__(self) -> str:
        lines = ["CheckRegistry:"]
        for module in CheckModule:
            defs = self.by_module(module.value)
            lines.append(f"  {module.value}: {summarize([d.name.value for d in defs], limit=8)}")
        return "\n".join(lines)

    def _repr_html_(self) -> str:
        rows = [
            [
                f"<code>{escape(d.name.value)}</code>",
                escape(d.module.value),
                "per r" if d.per_r else "per generator",
                escape(d.description),
            ]
            for d in self._checks.values()
        ]
        return html_table(["Check", "Module", "Runs", "Verifies"], rows)
