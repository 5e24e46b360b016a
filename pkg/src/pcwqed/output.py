"""Deterministic CSV emission (and optional SVG plots) for experiment runs.

Comment lines (prefixed '#') record the command, a content hash of the
resolved configuration, units, any warnings raised during the run, and the
full configuration echo.  Numbers are written with 17 significant digits so
re-parsing reproduces them bit-exactly; the timestamp line is the only
non-deterministic content.
"""

from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path

import numpy as np


def format_number(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def write_csv(
    path: str | Path,
    command: str,
    columns: dict[str, np.ndarray],
    config_digest: str,
    config_lines: list[str],
    units: dict[str, str] | None = None,
    warnings_seen: list[str] | None = None,
    extra_meta: dict[str, object] | None = None,
) -> Path:
    path = Path(path)
    names = list(columns)
    data = [np.asarray(columns[n]) for n in names]
    nrows = len(data[0])
    if any(len(c) != nrows for c in data):
        raise ValueError("all columns must have the same length")

    lines = [f"# pcwqed {command}"]
    lines.append(f"# timestamp: {datetime.now(timezone.utc).isoformat()}")
    lines.append(f"# config sha256: {config_digest}")
    for key, value in (extra_meta or {}).items():
        lines.append(f"# {key}: {value}")
    for name in names:
        unit = (units or {}).get(name, "dimensionless")
        lines.append(f"# unit {name}: {unit}")
    for w in warnings_seen or []:
        lines.append(f"# warning: {w}")
    for line in config_lines:
        lines.append(f"# config {line}")
    lines.append(f"# columns: {','.join(names)}")
    for i in range(nrows):
        lines.append(",".join(format_number(c[i]) for c in data))

    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path: str | Path):
    """Parse a file written by write_csv: (meta_lines, names, matrix)."""
    meta, names, rows = [], None, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            meta.append(line)
            if line.startswith("# columns:"):
                names = line.split(":", 1)[1].strip().split(",")
        elif line.strip():
            rows.append([float(v) for v in line.split(",")])
    return meta, names, np.asarray(rows)


def csv_body(path: str | Path) -> str:
    """File content without the timestamp line (determinism comparisons)."""
    lines = [
        line
        for line in Path(path).read_text().splitlines()
        if not line.startswith("# timestamp:")
    ]
    return "\n".join(lines)


def write_svg(
    path: str | Path,
    x: np.ndarray,
    series: dict[str, np.ndarray],
    xlabel: str,
    title: str,
) -> Path:
    """Minimal line plot, one series per column.  Requires matplotlib."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, y in series.items():
        ax.plot(x, y, label=name, lw=1.2)
    ax.set_xlabel(xlabel)
    ax.set_title(title)
    if len(series) > 1:
        ax.legend(fontsize=8)
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path
