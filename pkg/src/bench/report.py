import csv
import io
import logging
from collections import OrderedDict
from typing import Dict, List, Optional

from pydantic import BaseModel, Field
from rich.console import Console
from rich.table import Table

from config.config import REPORT_FORMATS

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["method", "delta", "init_s", "locate_s", "n_e", "h", "s", "checks_passed"]


class MethodRun(BaseModel):
    """Timings and cross-check tallies of one method at one delta."""
    method: str
    delta: float
    init_s: float
    locate_s: float
    step_s: List[float] = Field(default_factory=list)
    checks: int = 0
    checks_passed: int = 0
    outside: int = 0
    outcome_digest: str = ""


class BenchReport(BaseModel):
    """One experiment suite: mesh and grid stats plus a run per (method, delta)."""
    dim: int = 2
    n_e: int = 0
    h: float = 0.0
    s: float = 0.0
    w_star: float = 0.0
    particles: int = 0
    steps: int = 0
    seed: int = 0
    active: int = 0
    classes: Dict[str, int] = Field(default_factory=dict)
    runs: List[MethodRun] = Field(default_factory=list)

    def run(self, method: str, delta: float) -> Optional[MethodRun]:
        for item in self.runs:
            if item.method == method and item.delta == delta:
                return item
        return None

    @property
    def deltas(self) -> List[float]:
        return sorted({item.delta for item in self.runs})

    @property
    def methods(self) -> List[str]:
        return list(OrderedDict.fromkeys(item.method for item in self.runs))


class ReportFormatter:
    @staticmethod
    def format_csv(report: BenchReport) -> str:
        """One row per run with the mesh and grid columns repeated."""
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for item in report.runs:
            writer.writerow({
                "method": item.method,
                "delta": repr(item.delta),
                "init_s": repr(item.init_s),
                "locate_s": repr(item.locate_s),
                "n_e": report.n_e,
                "h": repr(report.h),
                "s": repr(report.s),
                "checks_passed": item.checks_passed,
            })
        return buffer.getvalue()

    @staticmethod
    def format_json(report: BenchReport) -> str:
        return report.model_dump_json(indent=2)

    @staticmethod
    def _format_seconds(value: Optional[float]) -> str:
        return "--" if value is None else f"{value:.4f}"

    @staticmethod
    def build_table(report: BenchReport) -> Table:
        """Methods as rows; initialization then one locate-time column per delta."""
        table = Table(
            title=f"Locate times: n_e={report.n_e}, h={report.h:.4g}, s={report.s:.4g}",
            show_header=True, header_style="bold cyan",
        )
        table.add_column("Method", justify="left")
        table.add_column("Init (s)", justify="right")
        deltas = report.deltas
        for delta in deltas:
            table.add_column(f"δ={delta:g} (s)", justify="right")
        table.add_column("Checks", justify="right")

        for method in report.methods:
            runs = [report.run(method, delta) for delta in deltas]
            present = [r for r in runs if r is not None]
            checks = sum(r.checks for r in present)
            passed = sum(r.checks_passed for r in present)
            table.add_row(
                method,
                ReportFormatter._format_seconds(present[0].init_s),
                *(ReportFormatter._format_seconds(r.locate_s if r else None) for r in runs),
                f"{passed}/{checks}",
            )
        return table

    @staticmethod
    def format_table(report: BenchReport, width: int = 120) -> str:
        buffer = io.StringIO()
        Console(file=buffer, width=width, color_system=None).print(ReportFormatter.build_table(report))
        return buffer.getvalue()


def emit_report(report: BenchReport, format: str = "csv") -> bytes:
    """Serialize a report as csv, json or a rendered table."""
    if format not in REPORT_FORMATS:
        raise ValueError(f"unknown report format {format!r}, expected one of {REPORT_FORMATS}")
    if format == "csv":
        text = ReportFormatter.format_csv(report)
    elif format == "json":
        text = ReportFormatter.format_json(report)
    else:
        text = ReportFormatter.format_table(report)
    logger.debug(f"Emitted {format} report with {len(report.runs)} runs")
    return text.encode("utf-8")


def load_report(data: bytes) -> BenchReport:
    """Inverse of the json format."""
    return BenchReport.model_validate_json(data)
