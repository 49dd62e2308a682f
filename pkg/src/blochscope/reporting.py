"""Report assembly and emission: CSV, JSON and rendered figures.

Numeric report fields are a pure function of the configuration, so two runs
of the same config emit byte-identical values; wall-clock timing is carried
in a separate field that determinism checks are expected to ignore.  CSV is
RFC-4180-flavored (header rows, '.' decimal separator, no locale); complex
values print as a+bi with up to 17 significant digits; angles are radians in
[0, 2*pi).

When an output path is given, matplotlib figures are rendered next to the
delimited output: scan reports get the tail curve and the full (modulus,
angle) heatmap, norm reports get the refinement trace.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

__all__ = [
    "Report",
    "format_real",
    "format_complex",
    "render_report",
    "write_report",
    "render_figures",
]

TOOL_VERSION = "0.1.0"


def format_real(x: float) -> str:
    return f"{float(x):.17g}"


def format_complex(z: complex) -> str:
    z = complex(z)
    sign = "+" if z.imag >= 0 or math.isnan(z.imag) else "-"
    return f"{format_real(z.real)}{sign}{format_real(abs(z.imag))}i"


@dataclass
class Report:
    """One command's outcome: config echo, scalar results, row tables."""

    command: str
    config: dict
    results: dict
    tables: dict = field(default_factory=dict)  # name -> (header tuple, row list)
    timing_s: float = 0.0
    version: str = TOOL_VERSION

    def numeric_payload(self) -> dict:
        """Everything determinism guarantees cover (timing excluded)."""
        return {
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "tables": {
                name: {"header": list(header), "rows": [list(r) for r in rows]}
                for name, (header, rows) in self.tables.items()
            },
        }


def _jsonable(value):
    if isinstance(value, complex):
        return format_complex(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_real(value)
    if isinstance(value, complex):
        return format_complex(value)
    if value is None:
        return ""
    return str(value)


def render_report(report: Report, fmt: str) -> str:
    """Serialize the report to CSV or JSON text."""
    if fmt == "json":
        payload = _jsonable(report.numeric_payload())
        payload["timing_s"] = report.timing_s
        payload["version"] = report.version
        return json.dumps(payload, indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if report.command == "scan-dump" and report.tables:
        # scan-dump is the plot-feed format: just the table
        for name, (header, rows) in report.tables.items():
            writer.writerow(header)
            for row in rows:
                writer.writerow([_csv_cell(v) for v in row])
        return buf.getvalue()
    writer.writerow(("key", "value"))
    writer.writerow(("command", report.command))
    writer.writerow(("version", report.version))
    for key, value in report.config.items():
        writer.writerow((f"config.{key}", _csv_cell(value)))
    for key, value in report.results.items():
        writer.writerow((key, _csv_cell(value)))
    writer.writerow(("timing_s", format_real(report.timing_s)))
    for name, (header, rows) in report.tables.items():
        writer.writerow(())
        writer.writerow((f"table.{name}",))
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def write_report(report: Report, out: str | None, fmt: str) -> str:
    """Write (or print) the serialized report; returns the text."""
    text = render_report(report, fmt)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        print(text, end="")
    return text


# ---------------------------------------------------------------------------
# figures


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _fig_path(out: str, suffix: str) -> Path:
    p = Path(out)
    return p.with_name(f"{p.stem}_{suffix}.png")


def render_figures(report: Report, out: str) -> list[str]:
    """Render command-appropriate PNG figures next to the output file."""
    plt = _pyplot()
    written: list[str] = []

    def save(fig, suffix: str):
        path = _fig_path(out, suffix)
        fig.savefig(path, dpi=150, bbox_inches="tight")
        plt.close(fig)
        written.append(str(path))

    scan = report.tables.get("scan")
    tail = report.tables.get("tail")
    if tail is not None:
        header, rows = tail
        gap = [1.0 - r[0] for r in rows]
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.semilogx(gap, [r[1] for r in rows], "o-", label="full norm tail max")
        ax.semilogx(gap, [r[2] for r in rows], "s--", label="seminorm tail max")
        ax.set_xlabel("1 - |a|")
        ax.set_ylabel("max over angles")
        ax.invert_xaxis()
        ax.legend()
        ax.set_title(f"boundary tail ({report.results.get('family', 'scan')})")
        save(fig, "tail")
    if scan is not None:
        header, rows = scan
        radii = sorted({r[0] for r in rows})
        angles = sorted({r[1] for r in rows})
        if len(radii) > 1 and len(angles) > 1:
            import numpy as np

            grid = np.zeros((len(radii), len(angles)))
            ri = {r: i for i, r in enumerate(radii)}
            ai = {t: i for i, t in enumerate(angles)}
            for row in rows:
                grid[ri[row[0]], ai[row[1]]] = row[2]
            fig, ax = plt.subplots(figsize=(6, 4))
            im = ax.imshow(
                grid,
                aspect="auto",
                origin="lower",
                extent=(angles[0], angles[-1], 0, len(radii) - 1),
            )
            ax.set_xlabel("arg a (radians)")
            ax.set_ylabel("ladder index (toward |a| = 1)")
            fig.colorbar(im, ax=ax, label="composed norm")
            ax.set_title("scan values")
            save(fig, "heatmap")
    trace = report.tables.get("trace")
    if trace is not None:
        header, rows = trace
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(range(len(rows)), [r[1] for r in rows], "o-")
        ax.set_xlabel("refinement level")
        ax.set_ylabel("running maximum")
        ax.set_title("supremum search trace")
        save(fig, "trace")
    criteria = report.tables.get("criteria")
    if criteria is not None:
        header, rows = criteria
        fig, ax = plt.subplots(figsize=(6, 4))
        names = [r[0] for r in rows]
        los = [r[1] for r in rows]
        his = [r[2] for r in rows]
        mids = [r[3] for r in rows]
        for i, (lo, hi, mid) in enumerate(zip(los, his, mids)):
            if lo is not None and hi is not None:
                ax.plot([i, i], [lo, hi], "k-", lw=3, alpha=0.4)
            ax.plot(i, mid, "ro")
        ax.set_xticks(range(len(names)))
        ax.set_xticklabels(names, rotation=20)
        ax.set_ylabel("essential-norm estimate")
        ax.set_title("criteria comparison")
        save(fig, "criteria")
    return written
