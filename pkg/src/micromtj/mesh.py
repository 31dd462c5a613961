"""Regular-grid free layer: mesh geometry, cell fields, region masks, reductions.

Cell data is stored as arrays of shape ``(ny, nx, ...)`` so that a C-order
flatten gives the x-fastest (row-major) cell ordering used by OVF files.
The flat cell index is ``i = ix + nx * iy``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

UNIT_NORM_TOL = 1e-9


@dataclass(frozen=True)
class Mesh:
    nx: int = 20
    ny: int = 20
    nz: int = 1
    dx: float = 1e-9
    dy: float = 1e-9
    dz: float = 1e-9

    def __post_init__(self):
        for name in ("nx", "ny", "nz"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.nz != 1:
            raise ValueError("nz must be 1 (single-layer thin film)")
        for name in ("dx", "dy", "dz"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def shape(self) -> tuple[int, int]:
        """Array shape of a scalar cell field, ``(ny, nx)``."""
        return (self.ny, self.nx)

    @property
    def ncells(self) -> int:
        return self.nx * self.ny * self.nz

    @property
    def cell_volume(self) -> float:
        return self.dx * self.dy * self.dz

    @property
    def size(self) -> tuple[float, float, float]:
        return (self.nx * self.dx, self.ny * self.dy, self.nz * self.dz)

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """x and y coordinates of cell centers, each of shape ``(ny, nx)``."""
        x = (np.arange(self.nx) + 0.5) * self.dx
        y = (np.arange(self.ny) + 0.5) * self.dy
        return np.meshgrid(x, y)

    def unravel(self, i: int) -> tuple[int, int]:
        if not 0 <= i < self.ncells:
            raise IndexError(f"cell index {i} out of range [0, {self.ncells})")
        return i % self.nx, i // self.nx


def neighbors(mesh: Mesh, i: int) -> list[tuple[int, str, int]]:
    """In-bounds nearest neighbours of cell ``i`` as ``(j, axis, direction)``.

    Boundaries are open, so edge cells have fewer entries. With ``nz = 1``
    only the four in-plane neighbours can exist.
    """
    ix, iy = mesh.unravel(i)
    out = []
    for axis, (jx, jy), d in (
        ("x", (ix - 1, iy), -1),
        ("x", (ix + 1, iy), +1),
        ("y", (ix, iy - 1), -1),
        ("y", (ix, iy + 1), +1),
    ):
        if 0 <= jx < mesh.nx and 0 <= jy < mesh.ny:
            out.append((jx + mesh.nx * jy, axis, d))
    return out


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class VectorField:
    """Per-cell 3-vectors; unit vectors for magnetization, tesla for fields."""

    mesh: Mesh
    data: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.data, dtype=float)
        if a.shape == (self.mesh.ncells, 3):
            a = a.reshape(self.mesh.ny, self.mesh.nx, 3)
        if a.shape != (self.mesh.ny, self.mesh.nx, 3):
            raise ValueError(
                f"vector data shape {a.shape} does not match mesh "
                f"({self.mesh.ny}, {self.mesh.nx}, 3)"
            )
        object.__setattr__(self, "data", _frozen(a))

    @classmethod
    def uniform(cls, mesh: Mesh, vec) -> "VectorField":
        v = np.asarray(vec, dtype=float)
        return cls(mesh, np.broadcast_to(v, (mesh.ny, mesh.nx, 3)))

    @classmethod
    def normalized(cls, mesh: Mesh, data) -> "VectorField":
        a = np.asarray(data, dtype=float)
        return cls(mesh, a / np.linalg.norm(a, axis=-1, keepdims=True))

    @property
    def flat(self) -> np.ndarray:
        """``(ncells, 3)`` view in x-fastest order."""
        return self.data.reshape(-1, 3)

    def __neg__(self) -> "VectorField":
        return VectorField(self.mesh, -self.data)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.mesh, self.data + other.data)


@dataclass(frozen=True, eq=False)
class ScalarField:
    mesh: Mesh
    data: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.data, dtype=float)
        if a.shape == (self.mesh.ncells,):
            a = a.reshape(self.mesh.shape)
        if a.shape != self.mesh.shape:
            raise ValueError(f"scalar data shape {a.shape} does not match mesh {self.mesh.shape}")
        object.__setattr__(self, "data", _frozen(a))

    @classmethod
    def uniform(cls, mesh: Mesh, value: float) -> "ScalarField":
        return cls(mesh, np.full(mesh.shape, float(value)))


@dataclass(frozen=True, eq=False)
class RegionMask:
    mesh: Mesh
    member: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.member is None:
            a = np.ones(self.mesh.shape, dtype=bool)
        else:
            a = np.asarray(self.member, dtype=bool)
            if a.shape == (self.mesh.ncells,):
                a = a.reshape(self.mesh.shape)
        if a.shape != self.mesh.shape:
            raise ValueError(f"mask shape {a.shape} does not match mesh {self.mesh.shape}")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "member", a)

    @classmethod
    def full(cls, mesh: Mesh) -> "RegionMask":
        return cls(mesh)

    @classmethod
    def box(cls, mesh: Mesh, x_range=None, y_range=None) -> "RegionMask":
        """Cells with ``x0 <= ix < x1`` and ``y0 <= iy < y1`` (cell indices)."""
        x0, x1 = x_range if x_range is not None else (0, mesh.nx)
        y0, y1 = y_range if y_range is not None else (0, mesh.ny)
        a = np.zeros(mesh.shape, dtype=bool)
        a[y0:y1, x0:x1] = True
        return cls(mesh, a)

    @property
    def count(self) -> int:
        return int(self.member.sum())

    def require_nonempty(self, what: str = "region") -> "RegionMask":
        if self.count == 0:
            raise ValueError(f"{what} mask selects no cells")
        return self


def unit_norm_error(m) -> float:
    """Largest deviation of a cell norm from 1."""
    a = m.data if isinstance(m, VectorField) else np.asarray(m)
    return float(np.max(np.abs(np.linalg.norm(a, axis=-1) - 1.0)))


def check_unit_norm(m, tol: float = UNIT_NORM_TOL) -> None:
    err = unit_norm_error(m)
    if err > tol:
        raise ValueError(f"magnetization is not unit-norm (max deviation {err:.3e})")


def mean_vector(f: VectorField, mask: RegionMask | None = None) -> np.ndarray:
    """Arithmetic mean of the cell vectors over ``mask`` (all cells if None)."""
    if mask is None:
        sel = f.flat
    else:
        mask.require_nonempty()
        sel = f.flat[mask.member.reshape(-1)]
    return np.sum(sel, axis=0) / sel.shape[0]
