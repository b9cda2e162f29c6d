"""Result envelopes and their JSON / CSV renderings.

Floats are written with ``repr`` (shortest round-trip form), so both
renderings parse back to the exact values they were written from. Complex
matrices become ``{"re": [[...]], "im": [[...]]}``.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

TIMESTAMP_ENV = "SOURCE_DATE_EPOCH"


@dataclass(frozen=True)
class ResultEnvelope:
    config: dict
    version: str
    seed: int
    timestamp: str
    payload: dict

    @property
    def table(self) -> dict:
        return self.payload["table"]


def timestamp() -> str:
    """UTC run time, pinned by ``SOURCE_DATE_EPOCH`` when that is set."""
    raw = os.environ.get(TIMESTAMP_ENV)
    when = datetime.fromtimestamp(int(raw), timezone.utc) if raw else datetime.now(timezone.utc)
    return when.strftime("%Y-%m-%dT%H:%M:%SZ")


def matrix(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def unmatrix(d: dict) -> np.ndarray:
    return np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)


def cplx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def table(columns, rows) -> dict:
    rows = [list(r) for r in rows]
    for r in rows:
        if len(r) != len(columns):
            raise ValueError(f"row {r} does not match columns {columns}")
    return {"columns": list(columns), "rows": rows}


def _plain(obj):
    """Turn numpy scalars into Python ones so ``json`` can encode them."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def to_json(env: ResultEnvelope) -> str:
    return json.dumps(_plain(asdict(env)), sort_keys=True, indent=2, allow_nan=False) + "\n"


def from_json(text: str) -> ResultEnvelope:
    return ResultEnvelope(**json.loads(text))


def _cell(v) -> str:
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def to_csv(tab: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(tab["columns"])
    for row in tab["rows"]:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def parse_csv(text: str) -> list[dict]:
    """Rows as dicts; cells that look numeric come back as ``float``."""
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        parsed = {}
        for k, v in row.items():
            try:
                parsed[k] = float(v)
            except ValueError:
                parsed[k] = v
        out.append(parsed)
    return out


def write_text(path: str | Path, text: str) -> None:
    if str(path) == "-":
        print(text, end="")
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
