"""Trajectory files, result files, CSV tables and run manifests."""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import platform
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import Trajectory
from .errors import OpinetError
from .scenario import dumps_compact

TRAJECTORY_SCHEMA = "opinet.trajectory/1"
MANIFEST_NAME = "manifest.json"


class TrajectoryFormatError(OpinetError, ValueError):
    pass


def _fmt(v: float) -> str:
    return repr(float(v))


def write_trajectory_csv(traj: Trajectory, path) -> None:
    n = traj.n
    lines = ["k," + ",".join(f"x{i + 1}" for i in range(n))]
    for k, row in enumerate(traj.x):
        lines.append(f"{k}," + ",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def trajectory_to_dict(traj: Trajectory) -> dict:
    return {
        "schema": TRAJECTORY_SCHEMA,
        "regime": traj.regime,
        "precision": traj.precision,
        "source_opinions": traj.source_opinions.tolist(),
        "spec_hash": traj.spec_hash,
        "x": traj.x.tolist(),
        "x_lo": None if traj.x_lo is None else traj.x_lo.tolist(),
    }


def write_trajectory_json(traj: Trajectory, path) -> None:
    Path(path).write_text(dumps_compact(trajectory_to_dict(traj)) + "\n")


def read_trajectory(path, regime: str | None = None, source_opinions=None) -> Trajectory:
    """Load a trajectory from JSON or CSV.

    CSV carries no metadata, so ``regime`` and ``source_opinions`` must be
    supplied or default to Problem I with no sources.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise TrajectoryFormatError(f"{path}: line {exc.lineno}: {exc.msg}") from None
        known = {"schema", "regime", "precision", "source_opinions", "spec_hash", "x", "x_lo"}
        unknown = set(doc) - known if isinstance(doc, dict) else set()
        if not isinstance(doc, dict) or doc.get("schema") != TRAJECTORY_SCHEMA or unknown:
            raise TrajectoryFormatError(f"{path}: not an {TRAJECTORY_SCHEMA} document")
        try:
            return Trajectory(
                np.array(doc["x"], dtype=float),
                regime or doc["regime"],
                doc.get("source_opinions", []) if source_opinions is None else source_opinions,
                None if doc.get("x_lo") is None else np.array(doc["x_lo"], dtype=float),
                doc.get("spec_hash"),
            )
        except (KeyError, ValueError) as exc:
            raise TrajectoryFormatError(f"{path}: {exc}") from None
    rows = [ln for ln in text.splitlines() if ln.strip()]
    if not rows or not rows[0].startswith("k,"):
        raise TrajectoryFormatError(f"{path}: expected a header row starting with 'k,'")
    try:
        data = np.array([[float(v) for v in ln.split(",")[1:]] for ln in rows[1:]])
    except ValueError as exc:
        raise TrajectoryFormatError(f"{path}: {exc}") from None
    return Trajectory(data, regime or "ProblemI", [] if source_opinions is None else source_opinions)


def write_json(obj, path) -> None:
    Path(path).write_text(dumps_compact(_jsonable(obj)) + "\n")


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.floating, float)):
        f = float(v)
        return f if np.isfinite(f) else None
    if isinstance(v, np.integer):
        return int(v)
    return v


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(str(v) if isinstance(v, (int, np.integer, str)) else _fmt(v) for v in r))
    Path(path).write_text("\n".join(lines) + "\n")


def write_matrix_csv(M, path, decimals: int | None = None) -> None:
    M = np.asarray(M)
    if decimals is None:
        body = [",".join(_fmt(v) for v in row) for row in M]
    else:
        # adding 0.0 turns -0.0000 into 0.0000
        body = [",".join(f"{round(float(v), decimals) + 0.0:.{decimals}f}" for v in row) for row in M]
    Path(path).write_text("\n".join(body) + "\n")


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out_dir, command: str, argv, parameters: dict, inputs=(), outputs=(), started=None) -> Path:
    """Write the single manifest of an output directory, replacing any old one."""
    out_dir = Path(out_dir)
    now = _dt.datetime.now(_dt.timezone.utc)
    doc = {
        "command": command,
        "argv": list(argv),
        "tool": "opinet",
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "backend": _backend(),
        "parameters": parameters,
        "inputs": {str(p): file_sha256(p) for p in inputs},
        "outputs": {Path(p).name: file_sha256(p) for p in outputs},
        "started": (started or now).isoformat(),
        "finished": now.isoformat(),
    }
    path = out_dir / MANIFEST_NAME
    write_json(doc, path)
    return path


def _backend() -> str:
    from . import kernels

    return kernels.BACKEND
