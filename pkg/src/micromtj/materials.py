"""Material constants, drive schedules and the voltage-controlled anisotropy map."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .mesh import Mesh, RegionMask, ScalarField

MU0 = 4e-7 * np.pi
HBAR = 1.054571817e-34
E_CHARGE = 1.602176634e-19


class StrongVoltageWarning(UserWarning):
    """Gate voltage drives the local anisotropy below zero; the map is clamped."""


@dataclass(frozen=True)
class MaterialParams:
    """Free-layer constants in SI units.

    ``demag`` selects the demagnetizing treatment: ``"off"`` keeps only
    exchange, DMI and uniaxial anisotropy; ``"thin_film"`` adds the local
    shape anisotropy of an infinite film, -mu0 Ms m_z z.
    """

    Ms: float = 1.1e6
    Aex: float = 1.6e-11
    Ku0: float = 8e5
    easy_axis: tuple[float, float, float] = (0.0, 0.0, 1.0)
    D: float = 1e-3
    alpha: float = 0.1
    pol: float = 0.15
    sot_xi: float = -2.0
    gamma: float = 1.7595e11
    demag: Literal["off", "thin_film"] = "thin_film"

    def __post_init__(self):
        for name in ("Ms", "Aex", "gamma"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        for name in ("Ku0", "alpha"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be >= 0")
        u = np.asarray(self.easy_axis, dtype=float)
        if u.shape != (3,) or abs(np.linalg.norm(u) - 1.0) > 1e-9:
            raise ValueError("easy_axis must be a unit 3-vector")
        object.__setattr__(self, "easy_axis", tuple(float(c) for c in u))
        if self.demag not in ("off", "thin_film"):
            raise ValueError("demag must be 'off' or 'thin_film'")

    @property
    def K_eff(self) -> float:
        """Effective perpendicular anisotropy including the thin-film shape term."""
        shape = 0.5 * MU0 * self.Ms**2 if self.demag == "thin_film" else 0.0
        return self.Ku0 - shape


def dmi_boundary_coefficient(p: MaterialParams) -> float:
    """Edge slope D / (2 Aex) of the chiral boundary condition, in 1/m."""
    return p.D / (2.0 * p.Aex)


def critical_dmi(p: MaterialParams) -> float:
    """Extended-film threshold 4 sqrt(A K_eff) / pi above which spirals win."""
    return 4.0 * np.sqrt(p.Aex * max(p.K_eff, 0.0)) / np.pi


@dataclass(frozen=True)
class VcmaProfile:
    """Gate geometry and VCMA strength.

    ``beta`` is used so that beta * V / t_ox is an anisotropy energy density
    change in J/m^3. The spatial weight g is 0..1: a linear ramp across the
    x extent of the gate, or 1 on the gate for ``shape="step"``; 0 outside.
    """

    beta: float = 9.0429e-5
    t_ox: float = 1e-9
    gate: RegionMask | None = None
    shape: Literal["linear", "step"] = "linear"

    def __post_init__(self):
        if not self.t_ox > 0:
            raise ValueError("t_ox must be > 0")
        if self.shape not in ("linear", "step"):
            raise ValueError("shape must be 'linear' or 'step'")

    def weight(self, mesh: Mesh) -> np.ndarray:
        gate = self.gate if self.gate is not None else RegionMask.full(mesh)
        gate.require_nonempty("gate")
        member = gate.member
        if self.shape == "step":
            return member.astype(float)
        cols = np.flatnonzero(member.any(axis=0))
        lo, hi = cols[0], cols[-1]
        ix = np.arange(mesh.nx, dtype=float)
        ramp = np.ones(mesh.nx) if hi == lo else (ix - lo) / (hi - lo)
        return np.where(member, np.clip(ramp, 0.0, 1.0)[None, :], 0.0)

    def delta_k(self, vb: float) -> float:
        return self.beta * vb / self.t_ox


def anisotropy_map(p: MaterialParams, v: VcmaProfile, vb: float, mesh: Mesh) -> ScalarField:
    """Per-cell K_u = Ku0 - (beta Vb / t_ox) g, clamped at zero."""
    k = p.Ku0 - v.delta_k(vb) * v.weight(mesh)
    if np.any(k < 0):
        warnings.warn(
            f"gate voltage {vb:+.4g} V drives K_u to {k.min():.4g} J/m^3; clamped at 0",
            StrongVoltageWarning,
            stacklevel=2,
        )
        k = np.maximum(k, 0.0)
    return ScalarField(mesh, k)


def gradient_magnitude(k: ScalarField) -> float:
    """Mean |dK/dx| over cells (central differences, one-sided at the edges)."""
    mesh = k.mesh
    if mesh.nx < 2:
        raise ValueError("gradient along x needs nx >= 2")
    dkdx = np.gradient(k.data, mesh.dx, axis=1)
    return float(np.mean(np.abs(dkdx)))


@dataclass(frozen=True)
class DriveSegment:
    duration: float
    J: float = 0.0
    j_dir: tuple[float, float, float] = (1.0, 0.0, 0.0)
    V: float = 0.0

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError("segment duration must be > 0")
        d = np.asarray(self.j_dir, dtype=float)
        if self.J != 0:
            if abs(d[2]) > 1e-12 or abs(np.linalg.norm(d) - 1.0) > 1e-9:
                raise ValueError("current direction must be an in-plane unit vector")
        object.__setattr__(self, "j_dir", tuple(float(c) for c in d))


@dataclass(frozen=True)
class DriveSchedule:
    segments: tuple[DriveSegment, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def duration(self) -> float:
        return sum(s.duration for s in self.segments)

    def boundaries(self) -> list[float]:
        """Start times of each segment plus the end time."""
        return list(np.cumsum([0.0] + [s.duration for s in self.segments]))

    @classmethod
    def three_step(
        cls,
        J: float = 1.5e12,
        V: float = 0.165,
        durations: tuple[float, float, float] = (2e-9, 1e-9, 5e-9),
        j_dir=(1.0, 0.0, 0.0),
    ) -> "DriveSchedule":
        """Current only, then current plus gate voltage, then voltage only."""
        t1, t2, t3 = durations
        return cls((
            DriveSegment(t1, J, j_dir, 0.0),
            DriveSegment(t2, J, j_dir, V),
            DriveSegment(t3, 0.0, j_dir, V),
        ))
