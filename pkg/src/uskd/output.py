"""CSV traces, run manifests and key=value config files."""

from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import json
from dataclasses import asdict, is_dataclass
from pathlib import Path

from . import __version__

TRACE_HEADER = ("axis_value", "mean_IA", "mean_IB", "std_IA", "std_IB")


def fmt(x) -> str:
    """12 significant digits, locale-independent."""
    if isinstance(x, str):
        return x
    if x is None:
        return ""
    return format(float(x), ".12g")


def write_csv(path: Path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def write_trace(path: Path, trace) -> Path:
    rows = zip(trace.axis, trace.mean_IA, trace.mean_IB, trace.std_IA, trace.std_IB)
    return write_csv(path, TRACE_HEADER, rows)


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    with Path(path).open(newline="", encoding="ascii") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def digest(obj) -> str:
    """sha256 of a canonical JSON rendering of a (dataclass) configuration."""
    if is_dataclass(obj):
        obj = asdict(obj)
    payload = json.dumps(obj, sort_keys=True, default=repr)
    return hashlib.sha256(payload.encode()).hexdigest()


def utc_now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def write_manifest(path: Path, spec_digest: str, seed: int, started: str, output_files) -> Path:
    lines = [
        f"spec_digest={spec_digest}",
        f"seed={seed}",
        f"tool_version={__version__}",
        f"started={started}",
        f"finished={utc_now()}",
        "output_files=" + ",".join(Path(p).name for p in output_files),
    ]
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path


def write_keyvalue(path: Path, items: dict) -> Path:
    path = Path(path)
    path.write_text("".join(f"{k}={fmt(v)}\n" for k, v in items.items()), encoding="ascii")
    return path


def read_keyvalue(path: Path) -> dict[str, str]:
    """Flat ``key=value`` text; blank lines and ``#`` comments are ignored."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out
