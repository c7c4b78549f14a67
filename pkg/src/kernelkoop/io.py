"""CSV persistence with provenance comments, atomic writes, exact round-trips.

Every file starts with '# key = value' comment lines recording the
configuration that produced it.  Floats are written with shortest
round-trip repr, so rereading a file reproduces the arrays bit for bit
and reruns produce byte-identical files.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import CsvFormatError
from .kernels import KernelSpec, PointSet
from .koopman import EstimateMode, KoopmanEstimate, TrajectoryDataset
from .linsys import SolveReport


def fmt(value) -> str:
    """Shortest round-trip decimal form of a float."""
    return repr(float(value))


def atomic_write_text(path, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see partial files."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def comment_block(params: Mapping[str, object] | None) -> str:
    if not params:
        return ""
    return "".join(f"# {key} = {value}\n" for key, value in params.items())


def write_rows_csv(path, header: Sequence[str], rows, params=None) -> None:
    """Generic table writer: comments, one header line, then data rows."""
    body = "".join(",".join(_cell(v) for v in row) + "\n" for row in rows)
    atomic_write_text(path, comment_block(params) + ",".join(header) + "\n" + body)


def _cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return fmt(value)


def _read_table(path) -> tuple[dict[str, str], list[str], list[list[str]]]:
    """Parse (comments, header, rows) from a CSV written by this module."""
    comments: dict[str, str] = {}
    header: list[str] | None = None
    rows: list[list[str]] = []
    with open(path) as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, value = body.partition("=")
                    comments[key.strip()] = value.strip()
                continue
            cells = [c.strip() for c in line.split(",")]
            if header is None:
                header = cells
            else:
                rows.append(cells)
    if header is None:
        raise CsvFormatError(f"{path}: no header line found")
    return comments, header, rows


# ---------------------------------------------------------------------------
# trajectories


def write_trajectory_csv(path, dataset: TrajectoryDataset, params=None) -> None:
    d = dataset.state_dim
    n = dataset.output_dim
    header = (
        ["k"]
        + [f"x{i + 1}" for i in range(d)]
        + [f"x{i + 1}_next" for i in range(d)]
        + (["y_next"] if n == 1 else [f"y{i + 1}_next" for i in range(n)])
    )
    rows = []
    for i in range(len(dataset)):
        row = [int(dataset.k[i])]
        row += list(dataset.x[i])
        row += list(dataset.x_next[i])
        row += list(dataset.y_next[i])
        rows.append(row)
    write_rows_csv(path, header, rows, params)


def read_trajectory_csv(path) -> TrajectoryDataset:
    _, header, rows = _read_table(path)
    if not rows:
        raise CsvFormatError(f"{path}: no trajectory records")
    if header[0] != "k":
        raise CsvFormatError(f"{path}: first column must be 'k', got {header[0]!r}")
    state_cols = [c for c in header if c.startswith("x") and not c.endswith("_next")]
    next_cols = [c for c in header if c.startswith("x") and c.endswith("_next")]
    out_cols = [c for c in header if c.startswith("y")]
    if not state_cols or len(state_cols) != len(next_cols) or not out_cols:
        raise CsvFormatError(f"{path}: unrecognized trajectory header {header}")
    idx = {c: header.index(c) for c in header}
    try:
        k = np.array([int(r[0]) for r in rows])
        x = np.array([[float(r[idx[c]]) for c in state_cols] for r in rows])
        x_next = np.array([[float(r[idx[c]]) for c in next_cols] for r in rows])
        y_next = np.array([[float(r[idx[c]]) for c in out_cols] for r in rows])
    except (ValueError, IndexError) as exc:
        raise CsvFormatError(f"{path}: bad trajectory row ({exc})") from None
    return TrajectoryDataset(k=k, x=x, x_next=x_next, y_next=y_next)


# ---------------------------------------------------------------------------
# point sets


def write_pointset_csv(path, points: PointSet, params=None) -> None:
    header = ["idx"] + [f"x{i + 1}" for i in range(points.dim)]
    indices = (
        points.indices if points.indices is not None else np.arange(len(points))
    )
    rows = [[int(indices[i])] + list(points.points[i]) for i in range(len(points))]
    write_rows_csv(path, header, rows, params)


def read_pointset_csv(path) -> PointSet:
    _, header, rows = _read_table(path)
    if not rows:
        raise CsvFormatError(f"{path}: empty point set")
    if header[0] != "idx":
        raise CsvFormatError(f"{path}: first column must be 'idx', got {header[0]!r}")
    try:
        idx = np.array([int(r[0]) for r in rows])
        pts = np.array([[float(v) for v in r[1:]] for r in rows])
    except ValueError as exc:
        raise CsvFormatError(f"{path}: bad point row ({exc})") from None
    return PointSet(pts, indices=idx)


# ---------------------------------------------------------------------------
# fitted estimates


def write_estimate_csv(path, estimate: KoopmanEstimate, params=None) -> None:
    meta: dict[str, object] = {}
    if params:
        meta.update(params)
    meta["mode"] = estimate.mode.value
    for key, value in estimate.kernel.to_config().items():
        meta[f"kernel.{key}"] = value
    meta["condition_number"] = fmt(estimate.diagnostics.condition_number)
    meta["min_eigenvalue"] = fmt(estimate.diagnostics.min_eigenvalue)
    meta["jitter_used"] = fmt(estimate.diagnostics.jitter_used)

    d = estimate.centers.dim
    n = estimate.output_dim
    header = (
        ["idx"]
        + [f"c{i + 1}" for i in range(d)]
        + [f"a{i + 1}" for i in range(d)]
        + [f"alpha{i + 1}" for i in range(n)]
    )
    indices = (
        estimate.centers.indices
        if estimate.centers.indices is not None
        else np.arange(len(estimate.centers))
    )
    rows = []
    for i in range(len(estimate.centers)):
        row = [int(indices[i])]
        row += list(estimate.centers.points[i])
        row += list(estimate.advanced_centers.points[i])
        row += list(estimate.alpha[i])
        rows.append(row)
    write_rows_csv(path, header, rows, meta)


def read_estimate_csv(path) -> KoopmanEstimate:
    comments, header, rows = _read_table(path)
    if not rows:
        raise CsvFormatError(f"{path}: estimate file has no centers")
    for key in ("mode", "kernel.family"):
        if key not in comments:
            raise CsvFormatError(f"{path}: missing '{key}' in the comment block")
    d = sum(1 for c in header if c.startswith("c"))
    n = sum(1 for c in header if c.startswith("alpha"))
    if d == 0 or n == 0 or len(header) != 1 + 2 * d + n:
        raise CsvFormatError(f"{path}: unrecognized estimate header {header}")
    try:
        idx = np.array([int(r[0]) for r in rows])
        data = np.array([[float(v) for v in r[1:]] for r in rows])
    except ValueError as exc:
        raise CsvFormatError(f"{path}: bad estimate row ({exc})") from None
    centers = PointSet(data[:, :d], indices=idx)
    advanced = PointSet(data[:, d : 2 * d], indices=idx)
    alpha = data[:, 2 * d :]
    kernel = KernelSpec.from_config(
        {
            "family": comments["kernel.family"],
            "beta": comments.get("kernel.beta", "1.0"),
            "support_scale": comments.get("kernel.support_scale", "1.0"),
            "distance_convention": comments.get("kernel.distance_convention", "plain"),
        }
    )
    report = SolveReport(
        coefficients=alpha,
        condition_number=float(comments.get("condition_number", "nan")),
        min_eigenvalue=float(comments.get("min_eigenvalue", "nan")),
        jitter_used=float(comments.get("jitter_used", "0.0")),
    )
    return KoopmanEstimate(
        mode=EstimateMode(comments["mode"]),
        centers=centers,
        advanced_centers=advanced,
        alpha=alpha,
        kernel=kernel,
        diagnostics=report,
    )
