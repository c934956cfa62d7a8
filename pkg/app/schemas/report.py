from typing import Any, Dict, List, Optional

from pydantic import BaseModel


class ResultTable(BaseModel):
    """Rows ready for CSV/JSON export plus the metadata written above them."""

    command: str
    params: Dict[str, Any] = {}
    columns: List[str]
    rows: List[List[Any]]
    meta: Dict[str, Any] = {}


class CheckResult(BaseModel):
    name: str
    residual: float
    tolerance: float
    passed: bool
    informational: bool = False
    detail: Optional[str] = None


class ValidationReport(BaseModel):
    schema_version: str
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(check.passed or check.informational for check in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not (c.passed or c.informational)]
