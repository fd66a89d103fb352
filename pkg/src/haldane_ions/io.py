"""Output files: CSV tables, JSON documents and the run manifest.

CSV uses '.' decimals, 17 significant digits and LF line endings so that
floats round-trip exactly and identical runs give identical bytes.
"""

from __future__ import annotations

import csv
import hashlib
import json
import platform
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import scipy


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if np.isfinite(x) else str(x)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def config_hash(config: dict) -> str:
    canon = json.dumps(_jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


class OutputDir:
    """Every file a command writes goes through here and lands in the manifest."""

    def __init__(self, root, command: str, config: dict, seed: int | None):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.command = command
        self.config = config
        self.seed = seed
        self.files: list[str] = []

    def path(self, name: str) -> Path:
        p = self.root / name
        p.parent.mkdir(parents=True, exist_ok=True)
        return p

    def _record(self, name: str):
        if name not in self.files:
            self.files.append(name)

    def write_csv(self, name: str, header, rows) -> Path:
        p = self.path(name)
        with open(p, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(v) for v in row])
        self._record(name)
        return p

    def write_json(self, name: str, obj) -> Path:
        p = self.path(name)
        with open(p, "w", newline="\n", encoding="utf-8") as fh:
            json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
            fh.write("\n")
        self._record(name)
        return p

    def adopt(self, name: str):
        """Declare a file written by a worker process."""
        self._record(name)

    def write_manifest(self) -> Path:
        from . import __version__

        entries = []
        for name in sorted(self.files):
            data = (self.root / name).read_bytes()
            entries.append({"file": name, "sha256": hashlib.sha256(data).hexdigest(), "bytes": len(data)})
        manifest = {
            "command": self.command,
            "config_sha256": config_hash(self.config),
            "seed": self.seed,
            "versions": {"haldane_ions": __version__, "python": platform.python_version(),
                         "numpy": np.__version__, "scipy": scipy.__version__},
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "outputs": entries,
        }
        p = self.root / "manifest.json"
        with open(p, "w", newline="\n", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return p


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Header and float array of a CSV written by :class:`OutputDir`."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
