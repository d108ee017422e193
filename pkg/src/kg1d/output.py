"""CSV formatting and the run manifest written ahead of every output file."""

from __future__ import annotations

import hashlib
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from kg1d import __version__
from kg1d.params import SpectralPoint

POINT_COLUMNS = ("a", "E", "s", "beta", "parity", "nodes", "branch")
SIG_DIGITS = 12
# flags naming where results go; they do not change the results, so stay out of the hash
OUTPUT_FLAGS = ("out", "dump_shot")


def fmt(x) -> str:
    """Decimal notation with 12 significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return np.format_float_positional(x, precision=SIG_DIGITS, unique=False,
                                      fractional=False, trim="-")


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def point_rows(points: list[SpectralPoint]):
    for p in points:
        yield (p.a, p.E, p.s, p.beta, p.parity, p.nodes, p.branch)


@dataclass
class RunManifest:
    command: str
    flags: dict
    tolerances: dict
    mesh_policy: dict
    input_hash: str = ""
    started: str = ""
    duration_s: float = 0.0
    version: str = __version__
    extra: dict = field(default_factory=dict)
    _t0: float = field(default=0.0, repr=False)

    def __post_init__(self):
        inputs = {k: v for k, v in self.flags.items() if k not in OUTPUT_FLAGS}
        payload = json.dumps({"command": self.command, "flags": inputs,
                              "tolerances": self.tolerances, "mesh_policy": self.mesh_policy,
                              "version": self.version}, sort_keys=True, default=str)
        self.input_hash = hashlib.sha256(payload.encode()).hexdigest()
        self.started = datetime.now(timezone.utc).isoformat(timespec="seconds")
        self._t0 = time.perf_counter()

    def stop(self) -> None:
        self.duration_s = round(time.perf_counter() - self._t0, 3)

    def header(self) -> str:
        d = asdict(self)
        d.pop("_t0")
        lines = ["# kg1d run manifest"]
        for key in ("command", "version", "input_hash", "started", "duration_s",
                    "flags", "tolerances", "mesh_policy", "extra"):
            lines.append(f"# {key}: {json.dumps(d[key], sort_keys=True, default=str)}")
        return "\n".join(lines) + "\n"


def write_with_manifest(path: Path | str, body: str, manifest: RunManifest) -> None:
    manifest.stop()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(manifest.header() + body, encoding="utf-8")


def read_body(path: Path | str) -> str:
    """File contents without the manifest comment block."""
    lines = Path(path).read_text(encoding="utf-8").splitlines(keepends=True)
    return "".join(ln for ln in lines if not ln.startswith("#"))
