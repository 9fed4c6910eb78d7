"""Deterministic artifact writing.

Floats are written with 17 significant digits, JSON keys are sorted and no
timestamps are recorded, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import json
import math
import os
from pathlib import Path

import numpy as np

from . import __version__


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return ""
    if isinstance(v, str):
        return '"' + v.replace('"', '""') + '"' if ("," in v or '"' in v) else v
    x = float(v)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else fmt(x)
    return obj


def header(scenario_echo: dict | None, seed: int | None, command: str) -> dict:
    return {"command": command, "negolab_version": __version__, "seed": seed, "scenario": scenario_echo}


class ArtifactWriter:
    """Collects files written during one run; removes them all if the run fails."""

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.written: list[Path] = []

    def __enter__(self):
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None:
            for p in self.written:
                p.unlink(missing_ok=True)
        return False

    def _write(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        tmp = path.with_name(path.name + ".part")
        tmp.write_text(text, encoding="utf-8", newline="\n")
        os.replace(tmp, path)
        self.written.append(path)
        return path

    def json(self, name: str, head: dict, body: dict) -> Path:
        doc = {"header": _plain(head), **_plain(body)}
        return self._write(name, json.dumps(doc, indent=2, sort_keys=True) + "\n")

    def csv(self, name: str, head: dict, columns, rows) -> Path:
        lines = [f"# {line}" for line in json.dumps(_plain(head), sort_keys=True).splitlines()]
        lines.append(",".join(columns))
        lines.extend(",".join(fmt(v) for v in row) for row in rows)
        return self._write(name, "\n".join(lines) + "\n")
