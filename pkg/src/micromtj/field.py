"""Effective induction (tesla) and energy (joules) of the free layer.

Exchange and interfacial DMI are discretized as sums over nearest-neighbour
bonds, and every field is the exact discrete gradient of its energy,
B = -1/(Ms V) dE/dm. Open edges simply have no bond to the missing cell; the
chiral edge condition dm/dn = D/(2A) (z x n) x m then emerges as the natural
boundary condition of the combined exchange + DMI energy.

Array-level helpers (leading underscore) take ``(ny, nx, 3)`` arrays and are
what the integrator calls in its inner loop.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .materials import MU0, MaterialParams
from .mesh import Mesh, ScalarField, VectorField, check_unit_norm


def _exchange(m: np.ndarray, mesh: Mesh, p: MaterialParams) -> np.ndarray:
    b = np.zeros_like(m)
    cx = 2.0 * p.Aex / (p.Ms * mesh.dx**2)
    cy = 2.0 * p.Aex / (p.Ms * mesh.dy**2)
    d = m[:, 1:] - m[:, :-1]
    b[:, :-1] += cx * d
    b[:, 1:] -= cx * d
    d = m[1:, :] - m[:-1, :]
    b[:-1, :] += cy * d
    b[1:, :] -= cy * d
    return b


def _exchange_energy(m: np.ndarray, mesh: Mesh, p: MaterialParams) -> float:
    v = mesh.cell_volume
    ex = np.sum((m[:, 1:] - m[:, :-1]) ** 2) / mesh.dx**2
    ey = np.sum((m[1:, :] - m[:-1, :]) ** 2) / mesh.dy**2
    return float(p.Aex * v * (ex + ey))


def _cross_y(a):
    # a x y_hat
    return np.stack([-a[..., 2], np.zeros_like(a[..., 0]), a[..., 0]], axis=-1)


def _cross_x(a):
    # a x x_hat
    return np.stack([np.zeros_like(a[..., 0]), a[..., 2], -a[..., 1]], axis=-1)


def _dmi(m: np.ndarray, mesh: Mesh, p: MaterialParams) -> np.ndarray:
    # x bond (i, j=i+x): energy (D V/dx) y.(m_i x m_j)
    # y bond (i, j=i+y): energy -(D V/dy) x.(m_i x m_j)
    b = np.zeros_like(m)
    if p.D == 0:
        return b
    cx = p.D / (p.Ms * mesh.dx)
    cy = p.D / (p.Ms * mesh.dy)
    b[:, :-1] -= cx * _cross_y(m[:, 1:])
    b[:, 1:] += cx * _cross_y(m[:, :-1])
    b[:-1, :] += cy * _cross_x(m[1:, :])
    b[1:, :] -= cy * _cross_x(m[:-1, :])
    return b


def _dmi_energy(m: np.ndarray, mesh: Mesh, p: MaterialParams) -> float:
    v = mesh.cell_volume
    cx = np.cross(m[:, :-1], m[:, 1:])
    cy = np.cross(m[:-1, :], m[1:, :])
    return float(p.D * v * (np.sum(cx[..., 1]) / mesh.dx - np.sum(cy[..., 0]) / mesh.dy))


def _anisotropy(m: np.ndarray, k: np.ndarray, p: MaterialParams) -> np.ndarray:
    u = np.asarray(p.easy_axis)
    mu = m @ u
    return (2.0 / p.Ms) * (k * mu)[..., None] * u


def _anisotropy_energy(m: np.ndarray, k: np.ndarray, mesh: Mesh, p: MaterialParams) -> float:
    mu = m @ np.asarray(p.easy_axis)
    return float(np.sum(k * (1.0 - mu**2)) * mesh.cell_volume)


def _demag(m: np.ndarray, p: MaterialParams) -> np.ndarray:
    b = np.zeros_like(m)
    if p.demag == "thin_film":
        b[..., 2] = -MU0 * p.Ms * m[..., 2]
    return b


def _demag_energy(m: np.ndarray, mesh: Mesh, p: MaterialParams) -> float:
    if p.demag != "thin_film":
        return 0.0
    return float(0.5 * MU0 * p.Ms**2 * np.sum(m[..., 2] ** 2) * mesh.cell_volume)


def _zeeman_energy(m: np.ndarray, b_ext, mesh: Mesh, p: MaterialParams) -> float:
    return float(-p.Ms * mesh.cell_volume * np.sum(m @ np.asarray(b_ext, dtype=float)))


def _total(m, k, mesh, p, b_ext=None) -> np.ndarray:
    b = _exchange(m, mesh, p) + _dmi(m, mesh, p) + _anisotropy(m, k, p) + _demag(m, p)
    if b_ext is not None:
        b += np.asarray(b_ext, dtype=float)
    return b


def _energy(m, k, mesh, p, b_ext=None) -> float:
    e = (
        _exchange_energy(m, mesh, p)
        + _dmi_energy(m, mesh, p)
        + _anisotropy_energy(m, k, mesh, p)
        + _demag_energy(m, mesh, p)
    )
    if b_ext is not None:
        e += _zeeman_energy(m, b_ext, mesh, p)
    return e


@dataclass(frozen=True)
class FieldTerms:
    exchange: VectorField
    dmi: VectorField
    anisotropy: VectorField
    demag: VectorField
    total: VectorField


def exchange_field(m: VectorField, p: MaterialParams) -> VectorField:
    check_unit_norm(m)
    return VectorField(m.mesh, _exchange(m.data, m.mesh, p))


def dmi_field(m: VectorField, p: MaterialParams) -> VectorField:
    """Interfacial (Neel) DMI induction for a film with its interface normal along z.

    Interior cells see (2D/Ms)(dmz/dx, dmz/dy, -dmx/dx - dmy/dy) with central
    differences; an edge cell has one neighbour missing from the stencil.
    """
    check_unit_norm(m)
    return VectorField(m.mesh, _dmi(m.data, m.mesh, p))


def anisotropy_field(m: VectorField, k: ScalarField, p: MaterialParams) -> VectorField:
    check_unit_norm(m)
    if np.any(k.data < 0):
        raise ValueError("anisotropy map must be non-negative")
    return VectorField(m.mesh, _anisotropy(m.data, k.data, p))


def demag_field(m: VectorField, p: MaterialParams) -> VectorField:
    return VectorField(m.mesh, _demag(m.data, p))


def field_terms(m: VectorField, k: ScalarField, p: MaterialParams) -> FieldTerms:
    ex = exchange_field(m, p)
    dm = dmi_field(m, p)
    an = anisotropy_field(m, k, p)
    dg = demag_field(m, p)
    total = VectorField(m.mesh, ex.data + dm.data + an.data + dg.data)
    return FieldTerms(ex, dm, an, dg, total)


def effective_field(m: VectorField, k: ScalarField, p: MaterialParams, b_ext=None) -> VectorField:
    check_unit_norm(m)
    return VectorField(m.mesh, _total(m.data, k.data, m.mesh, p, b_ext))


def total_energy(m: VectorField, k: ScalarField, p: MaterialParams, b_ext=None) -> tuple[float, dict]:
    """Total energy in joules and its per-term breakdown."""
    check_unit_norm(m)
    mesh = m.mesh
    terms = {
        "exchange": _exchange_energy(m.data, mesh, p),
        "dmi": _dmi_energy(m.data, mesh, p),
        "anisotropy": _anisotropy_energy(m.data, k.data, mesh, p),
        "demag": _demag_energy(m.data, mesh, p),
    }
    if b_ext is not None:
        terms["zeeman"] = _zeeman_energy(m.data, b_ext, mesh, p)
    return sum(terms.values()), terms
