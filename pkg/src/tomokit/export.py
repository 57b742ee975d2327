"""Bit-stable artifact writers: CSV, binary PGM heatmaps, JSON and the manifest."""

from __future__ import annotations

import hashlib
import json
import math
import os
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .tomography import (
    NormalizationDriftError,
    Tomogram1,
    Tomogram2Section,
    XGrid,
    integrate_1d,
    integrate_2d,
)

FLOAT_FORMAT = "%.17g"


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return FLOAT_FORMAT % x


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def read_csv(path):
    with open(path, encoding="ascii") as fh:
        header = fh.readline().rstrip("\n").split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return header, data


def write_tomogram_csv(path, tom: Tomogram1) -> Path:
    """Long format ``theta,X,w``: one line per sample, X fastest."""
    th, x = tom.theta_grid.values, tom.x_grid.values
    T, X = np.meshgrid(th, x, indexing="ij")
    rows = zip(T.ravel(), X.ravel(), tom.values.ravel())
    return write_csv(path, ("theta", "X", "w"), rows)


def write_section_csv(path, sec: Tomogram2Section) -> Path:
    """Long format ``X1,X2,w``; the fixed angles go in the PGM header and manifest."""
    X1, X2 = np.meshgrid(sec.x1_grid.values, sec.x2_grid.values, indexing="ij")
    rows = zip(X1.ravel(), X2.ravel(), sec.values.ravel())
    return write_csv(path, ("X1", "X2", "w"), rows)


def _unflatten(data: np.ndarray):
    """Rebuild ``(slow axis, fast axis, values)`` from long-format triples."""
    slow = np.unique(data[:, 0])
    fast = np.unique(data[:, 1])
    if slow.size * fast.size != data.shape[0]:
        raise ValueError("triples do not form a full grid")
    return slow, fast, data[:, 2].reshape(slow.size, fast.size)


def _grid_from(x: np.ndarray) -> XGrid:
    return XGrid(float(x[-1]), x.size)


def load_tomogram_csv(path, tol: float = 1e-6):
    """Read a tomogram CSV, verify every row integrates to one.

    Returns ``(theta, x, w)`` with ``w[i, j] = w(x[j], theta[i])``.
    """
    _, data = read_csv(path)
    th, x, w = _unflatten(data)
    norms = integrate_1d(w, _grid_from(x))
    bad = np.flatnonzero(np.abs(norms - 1.0) > tol)
    if bad.size:
        i = int(bad[0])
        raise NormalizationDriftError(
            f"{path}: row {i} (theta={th[i]:.6g}) integrates to {norms[i]:.12g}")
    return th, x, w


def load_section_csv(path, tol: float = 1e-6):
    _, data = read_csv(path)
    x1, x2, w = _unflatten(data)
    norm = integrate_2d(w, _grid_from(x1), _grid_from(x2))
    if abs(norm - 1.0) > tol:
        raise NormalizationDriftError(f"{path}: section integrates to {norm:.12g}")
    return x1, x2, w


def write_pgm(path, values: np.ndarray, depth: int = 16, comment: str = "") -> Path:
    """Binary PGM (P5) heatmap scaled linearly from 0 to the array maximum.

    ``values[i, j]`` becomes image row ``i``; 16-bit samples are big-endian.
    """
    if depth not in (8, 16):
        raise ValueError("PGM depth must be 8 or 16")
    v = np.asarray(values, dtype=float)
    vmax = float(v.max()) if v.size else 0.0
    maxval = 255 if depth == 8 else 65535
    scaled = np.zeros(v.shape) if vmax <= 0 else np.clip(v, 0.0, None) / vmax
    pix = np.rint(scaled * maxval).astype(">u2" if depth == 16 else "u1")
    note = f"# tomokit vmax={_fmt(vmax)}"
    if comment:
        note += " " + comment.replace("\n", " ")
    head = f"P5\n{note}\n{v.shape[1]} {v.shape[0]}\n{maxval}\n".encode("ascii")
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(head)
        fh.write(pix.tobytes())
    return path


def read_pgm(path):
    """Returns ``(pixels, maxval, comments)``."""
    with open(path, "rb") as fh:
        data = fh.read()
    tokens, comments, pos = [], [], 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            end = data.index(b"\n", pos)
            comments.append(data[pos + 1:end].decode("ascii").strip())
            pos = end + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        tokens.append(data[pos:end].decode("ascii"))
        pos = end
    pos += 1
    if tokens[0] != "P5":
        raise ValueError(f"{path}: not a binary PGM")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    dtype = ">u2" if maxval > 255 else "u1"
    pix = np.frombuffer(data[pos:], dtype=dtype, count=w * h).reshape(h, w)
    return pix, maxval, comments


def write_json(path, obj) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")
    return path


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir, files: Iterable, config_digest: str = "") -> Path:
    """``manifest.json`` listing every artifact (relative path) with its sha256."""
    out_dir = Path(out_dir)
    entries = []
    for f in sorted({Path(f).resolve() for f in files}):
        rel = os.path.relpath(f, out_dir.resolve()).replace(os.sep, "/")
        entries.append({"path": rel, "sha256": sha256_file(f), "bytes": f.stat().st_size})
    entries.sort(key=lambda e: e["path"])
    return write_json(out_dir / "manifest.json", {"config_sha256": config_digest, "artifacts": entries})
