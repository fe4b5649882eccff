"""CSV writers and the ``key = value`` config reader.

CSV files carry a header row, ``.`` decimals and ``\\n`` line endings. Floats
are written with ``repr`` so identical runs give byte-identical files.
"""

from __future__ import annotations

import configparser
import csv
import math
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping

import numpy as np

from dlrastab.integrators import NormTrace

TRACE_HEADER = ("step", "time", "frob_norm", "status")
SWEEP_HEADER = ("scheme", "rank", "cfl", "error", "diverged")


class ConfigError(ValueError):
    """A config entry that is unknown or cannot be parsed; names the key."""

    def __init__(self, key: str, message: str):
        super().__init__(f"config key {key!r}: {message}")
        self.key = key


def fmt(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, np.integer):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def write_csv(path, header: Iterable[str], rows: Iterable[Iterable[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(header))
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def write_trace_csv(path, trace: NormTrace) -> Path:
    return write_csv(path, TRACE_HEADER, trace.rows())


def write_moments_csv(path, x, columns: Mapping[str, Iterable[float]]) -> Path:
    names = list(columns)
    cols = [list(map(float, columns[n])) for n in names]
    rows = (
        (float(xj), *(c[j] for c in cols))
        for j, xj in enumerate(x)
    )
    return write_csv(path, ("x", *names), rows)


def write_sweep_csv(path, records) -> Path:
    rows = ((r.scheme, r.rank, r.cfl, r.error, r.diverged) for r in records)
    return write_csv(path, SWEEP_HEADER, rows)


def read_csv(path) -> list[dict[str, str]]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


# --------------------------------------------------------------------------
# config

def parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_list(item: Callable[[str], Any]) -> Callable[[str], list]:
    def parse(text: str) -> list:
        return [item(p.strip()) for p in text.split(",") if p.strip()]

    return parse


def read_config(path, section: str, schema: Mapping[str, Callable[[str], Any]]) -> dict[str, Any]:
    """Typed values from ``[section]`` (and ``[common]``) of a config file.

    Keys are normalized to underscores; any key outside ``schema`` or a value
    its parser rejects raises :class:`ConfigError`.
    """
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"), default_section="\0"
    )
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError("<file>", str(exc)) from exc
    items: dict[str, str] = {}
    # shared [common] keys only apply where they make sense
    if parser.has_section("common"):
        items.update(
            (k, v) for k, v in parser.items("common", raw=True) if k.replace("-", "_") in schema
        )
    if parser.has_section(section):
        items.update(parser.items(section, raw=True))
    out: dict[str, Any] = {}
    for raw_key, text in items.items():
        key = raw_key.strip().replace("-", "_")
        if key not in schema:
            raise ConfigError(key, f"unknown key for [{section}]")
        try:
            out[key] = schema[key](text.strip())
        except (ValueError, TypeError) as exc:
            raise ConfigError(key, str(exc)) from exc
    return out
