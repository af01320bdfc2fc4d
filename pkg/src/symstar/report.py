"""Verification reports with deterministic CSV rendering.

Every verifier returns a Report.  CSV output is fully determined by the
rows (floats are rendered with repr, which is shortest-round-trip), so a
fixed seed gives byte-identical files.
"""

from __future__ import annotations

import multiprocessing
import os
from dataclasses import dataclass, field

DEFAULT_COLUMNS = ("sample_id", "k", "l_or_n", "observed", "bound", "ratio")


def _cell(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    raise TypeError(f"cannot render {type(v).__name__} in a report row")


@dataclass
class Report:
    """Outcome of one verification suite.

    inequality is a human-readable statement of the bound being tested; it
    goes into the CSV as a comment line so a reader can tell what the
    observed/bound columns mean.
    """

    suite: str
    inequality: str
    rows: list = field(default_factory=list)
    columns: tuple = DEFAULT_COLUMNS
    checks: int = 0
    failures: int = 0
    max_ratio: float | None = None
    witness: dict | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, row, *, ok: bool, ratio: float | None = None):
        self.rows.append(tuple(row))
        self.checks += 1
        if not ok:
            self.failures += 1
        if ratio is not None:
            if self.max_ratio is None or ratio > self.max_ratio:
                self.max_ratio = ratio

    def to_csv(self) -> str:
        lines = [f"# suite={self.suite}; bound: {self.inequality}"]
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(_cell(v) for v in row))
        return "\n".join(lines) + "\n"

    def summary(self) -> str:
        state = "pass" if self.passed else "FAIL"
        mr = "n/a" if self.max_ratio is None else f"{self.max_ratio:.6g}"
        return (f"suite={self.suite} {state}: checks={self.checks} "
                f"failures={self.failures} max_ratio={mr}")


def thread_count() -> int:
    """Worker count from STARPROD_THREADS (default 1 = serial)."""
    raw = os.environ.get("STARPROD_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def parallel_map(fn, args_list):
    """Map preserving order; uses a fork pool when STARPROD_THREADS > 1.

    Results are identical to the serial path because each argument tuple
    carries its own deterministic RNG seed.
    """
    args_list = list(args_list)
    workers = thread_count()
    if workers <= 1 or len(args_list) <= 1:
        return [fn(a) for a in args_list]
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(min(workers, len(args_list))) as pool:
        return pool.map(fn, args_list)
