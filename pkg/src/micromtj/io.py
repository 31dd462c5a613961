"""OVF 2.0 text snapshots and CSV tables."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .mesh import Mesh, VectorField


def _fmt(v) -> str:
    # 17 significant digits round-trip every float64 exactly
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if math.isnan(v):
            return "nan"
        return f"{float(v):.17g}"
    return str(v)


def write_ovf(m: VectorField, path, t: float = 0.0, Ms: float | None = None, title: str = "m") -> None:
    """Write ``m`` as an OVF 2.0 rectangular text file (x-fastest ordering)."""
    mesh = m.mesh
    lx, ly, lz = mesh.size
    hdr = [
        "OOMMF OVF 2.0",
        "",
        "Segment count: 1",
        "",
        "Begin: Segment",
        "Begin: Header",
        "",
        f"Title: {title}",
        "meshtype: rectangular",
        "meshunit: m",
        "",
        "xmin: 0",
        "ymin: 0",
        "zmin: 0",
        f"xmax: {_fmt(lx)}",
        f"ymax: {_fmt(ly)}",
        f"zmax: {_fmt(lz)}",
        "",
        "valuedim: 3",
        "valuelabels: m_x m_y m_z",
        "valueunits: 1 1 1",
        "",
        f"Desc: Total simulation time: {_fmt(t)} s",
    ]
    if Ms is not None:
        hdr.append(f"Desc: Ms: {_fmt(Ms)} A/m")
    hdr += [
        "Desc: cell order: x fastest, then y, then z",
        f"xbase: {_fmt(mesh.dx / 2)}",
        f"ybase: {_fmt(mesh.dy / 2)}",
        f"zbase: {_fmt(mesh.dz / 2)}",
        f"xnodes: {mesh.nx}",
        f"ynodes: {mesh.ny}",
        f"znodes: {mesh.nz}",
        f"xstepsize: {_fmt(mesh.dx)}",
        f"ystepsize: {_fmt(mesh.dy)}",
        f"zstepsize: {_fmt(mesh.dz)}",
        "",
        "End: Header",
        "",
        "Begin: Data Text",
    ]
    lines = ["# " + h if h else "#" for h in hdr]
    lines += [" ".join(_fmt(c) for c in row) for row in m.flat]
    lines += ["# End: Data Text", "# End: Segment"]
    Path(path).write_text("\n".join(lines) + "\n")


def read_ovf(path) -> tuple[VectorField, dict]:
    """Read a text OVF 2.0 file written by :func:`write_ovf` (or compatible)."""
    header: dict[str, str] = {}
    rows = []
    in_data = False
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("Begin: Data"):
                if "Text" not in body:
                    raise ValueError("only text OVF data is supported")
                in_data = True
            elif body.startswith("End: Data"):
                in_data = False
            elif ":" in body:
                key, _, val = body.partition(":")
                key = key.strip()
                if key == "Desc":
                    dk, _, dv = val.strip().partition(":")
                    header[f"Desc.{dk.strip()}"] = dv.strip()
                else:
                    header[key] = val.strip()
            continue
        if in_data and line.strip():
            rows.append([float(v) for v in line.split()])
    mesh = Mesh(
        int(header["xnodes"]), int(header["ynodes"]), int(header["znodes"]),
        float(header["xstepsize"]), float(header["ystepsize"]), float(header["zstepsize"]),
    )
    data = np.array(rows, dtype=float)
    if data.shape != (mesh.ncells, 3):
        raise ValueError(f"expected {mesh.ncells} data rows of 3 values, got {data.shape}")
    return VectorField(mesh, data), header


def write_csv(path, columns, rows) -> None:
    """Header row of unit-tagged column names, then rows formatted exactly."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        cols = next(rd)
        return cols, list(rd)
