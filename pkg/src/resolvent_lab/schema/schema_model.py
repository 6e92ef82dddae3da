from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .pretty import fmt_complex, fmt_float, html_card, html_table, summarize

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckReport:
    """
    Outcome of one numerical check of an inequality over a set of sample points.

    ``worst_margin`` is the smallest signed margin observed (bound minus
    observed quantity, so negative means violated) and ``witness`` the sample
    point where it was attained. ``params`` holds the inputs of every formula
    the check used, so a report can be audited without re-deriving constants;
    ``details`` holds secondary margins and diagnostics.
    """

    check: str
    passed: bool
    worst_margin: float
    witness: complex | None = None
    params: Mapping[str, Any] = field(default_factory=dict)
    details: Mapping[str, Any] = field(default_factory=dict)
    notes: str | None = None

    @classmethod
    def from_margins(
        cls,
        check: str,
        margins: np.ndarray | Sequence[float],
        points: np.ndarray | Sequence[complex],
        *,
        slack: float,
        params: Mapping[str, Any] | None = None,
        details: Mapping[str, Any] | None = None,
        notes: str | None = None,
    ) -> "CheckReport":
        """
        Reduce per-point margins to a report.

        The witness is the first point (in input order) attaining the minimum,
        which keeps reports deterministic. NaN margins count as violations.
        An empty margin set is a vacuous pass with margin +inf.
        """
        m = np.asarray(margins, dtype=float).ravel()
        pts = np.asarray(points, dtype=complex).ravel()
        if m.size == 0:
            return cls(check, True, math.inf, None, dict(params or {}), dict(details or {}), notes)
        m = np.where(np.isnan(m), -np.inf, m)
        idx = int(np.argmin(m))
        worst = float(m[idx])
        return cls(
            check=check,
            passed=bool(worst >= -slack),
            worst_margin=worst,
            witness=complex(pts[idx]) if pts.size else None,
            params=dict(params or {}),
            details=dict(details or {}),
            notes=notes,
        )

    @classmethod
    def combine(
        cls,
        check: str,
        parts: Iterable["CheckReport"],
        *,
        params: Mapping[str, Any] | None = None,
        details: Mapping[str, Any] | None = None,
        notes: str | None = None,
    ) -> "CheckReport":
        """
        Merge sub-reports: passes iff all parts pass; the worst margin and
        witness come from the first part attaining the overall minimum.
        Sub-report margins are kept in ``details`` under their check names.
        """
        parts = list(parts)
        merged_details: dict[str, Any] = {p.check: p.worst_margin for p in parts}
        merged_details.update(details or {})
        if not parts:
            return cls(check, True, math.inf, None, dict(params or {}), merged_details, notes)
        worst = min(parts, key=lambda p: p.worst_margin)
        return cls(
            check=check,
            passed=all(p.passed for p in parts),
            worst_margin=worst.worst_margin,
            witness=worst.witness,
            params=dict(params or {}),
            details=merged_details,
            notes=notes,
        )

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "check": self.check,
            "pass": self.passed,
            "worst_margin": self.worst_margin,
            "witness": None if self.witness is None else [self.witness.real, self.witness.imag],
            "params": dict(self.params),
        }
        if self.details:
            out["details"] = dict(self.details)
        if self.notes:
            out["notes"] = self.notes
        return out

    def __repr__(self) -> str:
        return (
            "<CheckReport "
            f"{self.check} "
            f"{'pass' if self.passed else 'FAIL'} "
            f"margin={fmt_float(self.worst_margin)}"
            f"{' witness=' + fmt_complex(self.witness) if self.witness is not None else ''}"
            ">"
        )

    def __str__(self) -> str:
        lines = [
            f"CheckReport {self.check}",
            f"  Result:  {'pass' if self.passed else 'FAIL'}",
            f"  Margin:  {self.worst_margin:.6e}",
            f"  Witness: {fmt_complex(self.witness)}",
        ]
        if self.params:
            lines.append("  Params:  " + summarize([f"{k}={v}" for k, v in self.params.items()], limit=6))
        if self.notes:
            lines.append(f"  Notes:   {self.notes}")
        return "\n".join(lines)

    def _repr_html_(self) -> str:
        rows = [
            ("Check", self.check),
            ("Result", "pass" if self.passed else "FAIL"),
            ("Worst margin", f"{self.worst_margin:.6e}"),
            ("Witness", fmt_complex(self.witness)),
        ]
        rows.extend((k, str(v)) for k, v in self.params.items())
        return html_card("CheckReport", rows, status=self.passed)


@dataclass(frozen=True)
class SuiteSummary:
    total: int
    passed: int
    failed: int
    skipped: int
    errors: int
    worst: CheckReport | None

    @classmethod
    def from_reports(cls, reports: Sequence[CheckReport], *, skipped: int = 0, errors: int = 0) -> "SuiteSummary":
        worst = min(reports, key=lambda r: r.worst_margin) if reports else None
        passed = sum(1 for r in reports if r.passed)
        return cls(
            total=len(reports) + skipped + errors,
            passed=passed,
            failed=len(reports) - passed,
            skipped=skipped,
            errors=errors,
            worst=worst,
        )

    @property
    def all_passed(self) -> bool:
        return self.failed == 0 and self.errors == 0

    def to_dict(self) -> dict[str, Any]:
        worst = None
        if self.worst is not None:
            w = self.worst.witness
            worst = {
                "check": self.worst.check,
                "margin": self.worst.worst_margin,
                "witness": None if w is None else [w.real, w.imag],
            }
        return {
            "total": self.total,
            "passed": self.passed,
            "failed": self.failed,
            "skipped": self.skipped,
            "errors": self.errors,
            "worst": worst,
        }

    def __repr__(self) -> str:
        return (
            "<SuiteSummary "
            f"total={self.total} passed={self.passed} failed={self.failed} "
            f"skipped={self.skipped} errors={self.errors}>"
        )

    def _repr_html_(self) -> str:
        rows = [[str(self.total), str(self.passed), str(self.failed), str(self.skipped), str(self.errors)]]
        return html_table(["Total", "Passed", "Failed", "Skipped", "Errors"], rows, numeric=range(5))
