"""Equilibrium texture classification and topological charge."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .mesh import VectorField


class Kind(str, Enum):
    UNIFORM_UP = "UniformUp"
    UNIFORM_DOWN = "UniformDown"
    VERTICAL_STRIPE = "VerticalStripe"
    CIRCULAR_STRIPE = "CircularStripe"
    INDETERMINATE = "Indeterminate"

    @property
    def is_uniform(self) -> bool:
        return self in (Kind.UNIFORM_UP, Kind.UNIFORM_DOWN)

    @property
    def polarity(self) -> int:
        """+1 / -1 for uniform states, 0 otherwise."""
        return {Kind.UNIFORM_UP: 1, Kind.UNIFORM_DOWN: -1}.get(self, 0)


@dataclass(frozen=True)
class Thresholds:
    uniform: float = 0.9
    stripe_excess: int = 2
    charge: float = 0.5
    # |m_z| below this is treated as "inside a wall" when counting sign changes
    band_eps: float = 0.1


@dataclass(frozen=True)
class TextureClass:
    kind: Kind
    u: float
    mz: float
    charge: float
    bands_x: int
    bands_y: int


def skyrmion_number(m: VectorField) -> float:
    """Topological charge Q = 1/(4 pi) sum m . (dm/dx x dm/dy) dx dy."""
    mesh = m.mesh
    if mesh.nz != 1:
        raise ValueError("skyrmion number needs a single layer")
    a = m.data
    if mesh.nx < 2 or mesh.ny < 2:
        return 0.0
    dmx = np.gradient(a, mesh.dx, axis=1)
    dmy = np.gradient(a, mesh.dy, axis=0)
    density = np.einsum("...i,...i->...", a, np.cross(dmx, dmy))
    return float(np.sum(density) * mesh.dx * mesh.dy / (4.0 * np.pi))


def _sign_changes(line: np.ndarray, eps: float) -> int:
    s = np.sign(line[np.abs(line) > eps])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def band_counts(m: VectorField, eps: float = Thresholds.band_eps) -> tuple[int, int]:
    """Largest number of m_z sign changes along any row (x) and any column (y)."""
    mz = m.data[..., 2]
    bx = max(_sign_changes(row, eps) for row in mz)
    by = max(_sign_changes(col, eps) for col in mz.T)
    return bx, by


def classify(m: VectorField, thresholds: Thresholds = Thresholds()) -> TextureClass:
    mz = float(np.mean(m.data[..., 2]))
    u = abs(mz)
    q = skyrmion_number(m)
    bx, by = band_counts(m, thresholds.band_eps)

    if u >= thresholds.uniform:
        kind = Kind.UNIFORM_UP if mz > 0 else Kind.UNIFORM_DOWN
    elif abs(bx - by) >= thresholds.stripe_excess and abs(q) < thresholds.charge:
        kind = Kind.VERTICAL_STRIPE
    elif abs(q) >= thresholds.charge or min(bx, by) >= 1:
        kind = Kind.CIRCULAR_STRIPE
    else:
        kind = Kind.INDETERMINATE
    return TextureClass(kind, u, mz, q, bx, by)
