"""Sample ingestion, configuration files, run manifests and table writers."""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from . import __version__
from .bounds import DEFAULT_C_STAR, DEFAULT_JSW_A
from .errors import ConfigurationError, InputFormatError
from .statistic import Sample

CONFIG_ENV = "GTTEST_CONFIG"


def _parse_float(text: str, line: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise InputFormatError(f"not a number: {text!r}", line=line) from None
    if not math.isfinite(v):
        raise InputFormatError(f"non-finite value: {text!r}", line=line)
    return v


def parse_sample_text(text: str, fmt: str = "auto", skip_header: bool = False) -> Sample:
    """Parse one value per line (CSV, first column) or a JSON array of numbers.

    Blank lines and lines starting with ``#`` are ignored in CSV input.
    """
    if fmt == "auto":
        fmt = "json" if text.lstrip().startswith("[") else "csv"
    if fmt == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputFormatError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
        if not isinstance(data, list):
            raise InputFormatError("JSON input must be an array of numbers")
        values = []
        for i, v in enumerate(data):
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise InputFormatError(f"element {i} is not a finite number: {v!r}")
            values.append(float(v))
    elif fmt == "csv":
        values = []
        header_pending = skip_header
        for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
            if not row or not row[0].strip() or row[0].lstrip().startswith("#"):
                continue
            if header_pending:
                header_pending = False
                continue
            values.append(_parse_float(row[0].strip(), lineno))
    else:
        raise InputFormatError(f"unknown input format {fmt!r}")
    if not values:
        raise InputFormatError("the input contains no observations")
    return Sample(values)


def read_sample(path: str | Path, fmt: str = "auto", skip_header: bool = False) -> Sample:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc.strerror}") from None
    if fmt == "auto" and path.suffix.lower() == ".json":
        fmt = "json"
    return parse_sample_text(text, fmt, skip_header)


@dataclass(frozen=True)
class ToolConfig:
    A: float = DEFAULT_JSW_A
    c_star: float = DEFAULT_C_STAR
    threshold: float = 0.01


def load_config(path: str | Path | None = None) -> ToolConfig:
    """Read ``[gttest]`` keys A, c_star, threshold; ``$GTTEST_CONFIG`` names the file if ``path`` is None."""
    if path is None:
        path = os.environ.get(CONFIG_ENV)
    if not path:
        return ToolConfig()
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    if not parser.has_section("gttest"):
        return ToolConfig()
    sec = parser["gttest"]
    unknown = set(sec) - {"a", "c_star", "threshold"}
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    try:
        cfg = ToolConfig(
            A=sec.getfloat("A", DEFAULT_JSW_A),
            c_star=sec.getfloat("c_star", DEFAULT_C_STAR),
            threshold=sec.getfloat("threshold", 0.01),
        )
    except ValueError as exc:
        raise ConfigurationError(f"bad config value: {exc}") from None
    if not (cfg.A > 0 and cfg.c_star >= 0 and 0 < cfg.threshold < 1):
        raise ConfigurationError(f"config values out of range: {cfg}")
    return cfg


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = int(epoch) if epoch else 0
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(t))


@dataclass(frozen=True)
class RunManifest:
    """Provenance stamped into every output.

    The timestamp comes from ``SOURCE_DATE_EPOCH`` (or the Unix epoch), so two
    runs with the same parameters and seed write identical bytes.
    """

    command: str
    parameters: Mapping = field(default_factory=dict)
    seed: int = 0
    tool_version: str = __version__
    timestamp: str = field(default_factory=_timestamp)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["parameters"] = dict(sorted(dict(self.parameters).items()))
        return d


def format_number(x) -> str:
    """17 significant digits, so values round-trip exactly."""
    if isinstance(x, bool) or x is None:
        return "" if x is None else str(x).lower()
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.17g}"
    return str(x)


def write_csv(rows: Iterable[Mapping], manifest: RunManifest) -> str:
    """CSV text whose first line is ``# <manifest JSON>``."""
    rows = list(rows)
    buf = io.StringIO()
    buf.write("# " + json.dumps(manifest.to_dict(), sort_keys=True) + "\n")
    if rows:
        writer = csv.writer(buf, lineterminator="\n")
        header = list(rows[0].keys())
        writer.writerow(header)
        for r in rows:
            writer.writerow([format_number(r[k]) for k in header])
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return format_number(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def write_json(payload: Mapping, manifest: RunManifest) -> str:
    body = {"manifest": manifest.to_dict(), **_jsonable(dict(payload))}
    return json.dumps(body, indent=2, sort_keys=True) + "\n"
