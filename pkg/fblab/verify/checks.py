"""Check definitions and the runner for the verification harness."""
from dataclasses import dataclass
from typing import Callable, Iterable, List, NamedTuple, Optional

from loguru import logger

from fblab.schemas import CheckResult, Status
from fblab.utils.exceptions import FBLabException


class Outcome(NamedTuple):
    """Raw result of a check body."""

    status: Status
    measured: Optional[float] = None
    detail: str = ""


def passed_if(condition: bool, measured: Optional[float] = None, detail: str = "") -> Outcome:
    return Outcome(Status.PASS if condition else Status.FAIL, measured, detail)


def below(measured: float, limit: float, detail: str = "") -> Outcome:
    """Pass when ``measured`` is at most ``limit``."""
    text = detail or f"limit {limit:.3e}"
    return passed_if(bool(measured <= limit), float(measured), text)


@dataclass(frozen=True)
class Check:
    """
    One named property with a textual anchor.

    Attributes:
        check_id: Stable identifier, ``suite.name[params]``.
        anchor: The statement the check exercises, printed in the table.
        body: Computes the outcome.
    """

    check_id: str
    anchor: str
    body: Callable[[], Outcome]

    def run(self) -> CheckResult:
        """
        Run the body; library errors become failures carrying the message.
        """
        try:
            outcome = self.body()
        except FBLabException as e:
            logger.error(f"Check {self.check_id} raised: {e}")
            outcome = Outcome(Status.FAIL, None, f"{type(e).__name__}: {e}")
        if outcome.status is Status.FAIL:
            logger.warning(f"Check {self.check_id} failed: {outcome.detail}")
        elif outcome.status is Status.INCONCLUSIVE:
            logger.warning(f"Check {self.check_id} inconclusive: {outcome.detail}")
        else:
            logger.debug(f"Check {self.check_id} passed")
        return CheckResult(
            check_id=self.check_id,
            anchor=self.anchor,
            status=outcome.status,
            measured=outcome.measured,
            detail=outcome.detail,
        )


def run_checks(checks: Iterable[Check]) -> List[CheckResult]:
    """Run checks in order."""
    return [check.run() for check in checks]


def format_table(results: Iterable[CheckResult]) -> str:
    """Plain-text table of check id, anchor, status and measured value."""
    rows = [("check", "anchor", "status", "measured")]
    for r in results:
        measured = "" if r.measured is None else f"{r.measured:.6e}"
        rows.append((r.check_id, r.anchor, r.status.value, measured))
    widths = [max(len(row[i]) for row in rows) for i in range(4)]
    lines = ["  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() for row in rows]
    lines.insert(1, "  ".join("-" * width for width in widths))
    return "\n".join(lines)
