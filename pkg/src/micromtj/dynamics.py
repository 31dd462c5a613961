"""Landau-Lifshitz-Gilbert dynamics with spin-orbit torque.

Time integration uses the Dormand-Prince 5(4) pair with adaptive steps,
renormalizing m after each accepted step.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from . import field as fld
from .materials import E_CHARGE, HBAR, MU0, DriveSegment, MaterialParams
from .mesh import Mesh, ScalarField, VectorField, check_unit_norm

log = logging.getLogger(__name__)


class StiffnessError(RuntimeError):
    """Adaptive step size collapsed below the configured minimum."""


def _cross(a, b):
    ax, ay, az = a[..., 0], a[..., 1], a[..., 2]
    bx, by, bz = b[..., 0], b[..., 1], b[..., 2]
    return np.stack([ay * bz - az * by, az * bx - ax * bz, ax * by - ay * bx], axis=-1)


def _renorm(m):
    return m / np.sqrt(np.sum(m * m, axis=-1, keepdims=True))


@dataclass(frozen=True)
class SotDrive:
    """Spin-Hall drive from an in-plane charge current.

    ``beta_j`` (tesla) scales the damping-like torque; the field-like torque
    has coefficient ``sot_xi * beta_j / 2``.
    """

    J: float
    j_dir: tuple[float, float, float]
    pol: float
    Ms: float
    t_fl: float
    xi: float = -2.0

    @classmethod
    def from_segment(cls, seg: DriveSegment, p: MaterialParams, mesh: Mesh) -> "SotDrive":
        return cls(seg.J, seg.j_dir, p.pol, p.Ms, mesh.dz, p.sot_xi)

    @property
    def sigma(self) -> np.ndarray:
        # z x (charge-current direction); reversing J reverses sigma
        return np.sign(self.J) * np.cross([0.0, 0.0, 1.0], self.j_dir)

    @property
    def beta_j(self) -> float:
        return HBAR * abs(self.J) * self.pol / (2.0 * E_CHARGE * self.Ms * self.t_fl)

    @property
    def beta_fl(self) -> float:
        return self.xi * self.beta_j / 2.0


@dataclass(frozen=True)
class Controller:
    tol: float = 1e-5
    max_dm: float = 0.01
    dt_init: float = 1e-14
    dt_min: float = 1e-18
    dt_max: float = 1e-11
    safety: float = 0.9


@dataclass(frozen=True)
class RelaxCriteria:
    torque_tol: float = 1e-4
    max_time: float = 20e-9
    check_every: int = 5


@dataclass(frozen=True, eq=False)
class SimState:
    t: float
    m: VectorField
    k_map: ScalarField
    drive: DriveSegment | None = None
    b_ext: tuple[float, float, float] | None = None
    dt: float | None = None
    converged: bool | None = None

    def __post_init__(self):
        check_unit_norm(self.m)

    @property
    def mesh(self) -> Mesh:
        return self.m.mesh


@dataclass
class LLGSystem:
    """Right-hand side and energy for fixed drive and anisotropy map."""

    mesh: Mesh
    p: MaterialParams
    k: np.ndarray
    sot: SotDrive | None = None
    b_ext: np.ndarray | None = None
    precess: bool = True
    nfev: int = field(default=0, init=False)
    _c: np.ndarray | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self._k = np.ascontiguousarray(self.k, dtype=float)

    @classmethod
    def from_state(cls, state: SimState, p: MaterialParams, precess: bool = True) -> "LLGSystem":
        sot = None
        if state.drive is not None and state.drive.J != 0:
            sot = SotDrive.from_segment(state.drive, p, state.mesh)
        b_ext = None if state.b_ext is None else np.asarray(state.b_ext, dtype=float)
        return cls(state.mesh, p, np.asarray(state.k_map.data), sot, b_ext, precess)

    def field(self, m):
        return fld._total(m, self.k, self.mesh, self.p, self.b_ext)

    def energy(self, m) -> float:
        return fld._energy(m, self.k, self.mesh, self.p, self.b_ext)

    def torque(self, m) -> float:
        """Largest per-cell |m x B_eff| in tesla."""
        t = _cross(m, self.field(m))
        return float(np.sqrt(np.max(np.sum(t * t, axis=-1))))

    def coefficients(self) -> np.ndarray:
        p, mesh = self.p, self.mesh
        c = np.zeros(_kernels.NCOEF)
        c[0] = 2.0 * p.Aex / (p.Ms * mesh.dx**2)
        c[1] = 2.0 * p.Aex / (p.Ms * mesh.dy**2)
        c[2] = p.D / (p.Ms * mesh.dx)
        c[3] = p.D / (p.Ms * mesh.dy)
        c[4] = 2.0 / p.Ms
        c[5:8] = p.easy_axis
        c[8] = MU0 * p.Ms if p.demag == "thin_film" else 0.0
        if self.b_ext is not None:
            c[9:12] = self.b_ext
        c[12] = p.gamma / (1.0 + p.alpha**2)
        c[13] = p.alpha
        c[14] = 1.0 if self.precess else 0.0
        if self.sot is not None:
            c[15:18] = self.sot.sigma
            c[18] = self.sot.beta_j
            c[19] = self.sot.beta_fl
        return c

    def __call__(self, m):
        """dm/dt via the compiled kernel."""
        if self._c is None:
            self._c = self.coefficients()
        self.nfev += 1
        out = np.empty_like(m)
        _kernels.rhs(np.ascontiguousarray(m), self._k, self._c, out)
        return out

    def trial(self, m, k1, dt):
        if self._c is None:
            self._c = self.coefficients()
        self.nfev += 6
        y5 = np.empty_like(m)
        k7 = np.empty_like(m)
        err, dm = _kernels.dp45_trial(m, self._k, self._c, k1, dt, y5, k7)
        return y5, err, dm, k7

    def reference_rhs(self, m):
        """dm/dt assembled with numpy from the field module (slow reference)."""
        p = self.p
        g = p.gamma / (1.0 + p.alpha**2)
        b = self.field(m)
        mxb = _cross(m, b)
        out = -g * p.alpha * _cross(m, mxb)
        if self.precess:
            out -= g * mxb
        if self.sot is not None:
            bdl, bfl = self.sot.beta_j, self.sot.beta_fl
            s = self.sot.sigma
            mxs = _cross(m, np.broadcast_to(s, m.shape))
            out -= g * ((bdl + p.alpha * bfl) * _cross(m, mxs) + (bfl - p.alpha * bdl) * mxs)
        return out


# Dormand-Prince 5(4) tableau
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = _A[6] + (0.0,)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


def dp45_trial(rhs, m, k1, dt):
    """One Dormand-Prince trial step.

    Returns the renormalized 5th-order solution, the max per-cell embedded
    error, the max per-cell change of m, and the slope at the new point
    (reused as the next k1).
    """
    ks = [k1]
    for i in range(1, 6):
        y = m + dt * sum(a * k for a, k in zip(_A[i], ks) if a != 0.0)
        ks.append(rhs(y))
    y5 = _renorm(m + dt * sum(b * k for b, k in zip(_B5, ks) if b != 0.0))
    k7 = rhs(y5)
    ks.append(k7)
    e = dt * sum(c * k for c, k in zip(_E, ks) if c != 0.0)
    err = float(np.sqrt(np.max(np.sum(e * e, axis=-1))))
    dm = float(np.sqrt(np.max(np.sum((y5 - m) ** 2, axis=-1))))
    return y5, err, dm, k7


class Stepper:
    """Adaptive DP45 driver for one right-hand side.

    With ``energy`` set, steps that raise the energy by more than a
    round-off tolerance are rejected; this is used for damped relaxation.
    """

    def __init__(self, rhs, ctrl: Controller, dt: float | None = None, energy=None, energy_floor=0.0):
        self.rhs = rhs
        self.ctrl = ctrl
        self.dt = dt if dt is not None else ctrl.dt_init
        self.energy = energy
        self.energy_floor = energy_floor
        self._trial = getattr(rhs, "trial", None) or (lambda m, k1, dt: dp45_trial(rhs, m, k1, dt))
        self._k1 = None
        self._e = None
        self.naccept = 0
        self.nreject = 0

    def reset(self):
        self._k1 = None
        self._e = None

    def step(self, m, t, t_stop=None):
        """Take one accepted step, never passing ``t_stop``. Returns ``(m, t, dt_taken)``."""
        c = self.ctrl
        if self._k1 is None:
            self._k1 = self.rhs(m)
        if self.energy is not None and self._e is None:
            self._e = self.energy(m)
        while True:
            dt = min(self.dt, c.dt_max)
            clipped = False
            if t_stop is not None and t + dt >= t_stop * (1 - 1e-12):
                dt = t_stop - t
                clipped = True
            if dt < c.dt_min and not clipped:
                raise StiffnessError(
                    f"step size {dt:.3e} s fell below {c.dt_min:.1e} s at t = {t:.4e} s"
                )
            y, err, dm, k7 = self._trial(m, self._k1, dt)
            ok = err <= c.tol and dm <= c.max_dm
            e_new = None
            if ok and self.energy is not None:
                e_new = self.energy(y)
                slack = 1e-12 * max(abs(self._e), self.energy_floor)
                ok = e_new <= self._e + slack
                if not ok:
                    self.nreject += 1
                    self.dt = dt * 0.5
                    continue
            if ok:
                fac = 5.0 if err == 0 else min(5.0, max(0.2, c.safety * (c.tol / err) ** 0.2))
                if dm > 0:
                    fac = min(fac, max(0.2, c.safety * c.max_dm / dm))
                if not clipped or dt * fac > self.dt:
                    self.dt = dt * fac
                self._k1 = k7
                self._e = e_new
                self.naccept += 1
                t_new = t_stop if clipped else t + dt
                return y, t_new, dt
            self.nreject += 1
            shrink = max(0.1, c.safety * (c.tol / err) ** 0.25) if err > c.tol else 1.0
            if dm > c.max_dm:
                shrink = min(shrink, c.safety * c.max_dm / dm)
            self.dt = dt * shrink

    def advance(self, m, t, t_end):
        while t < t_end:
            m, t, _ = self.step(m, t, t_end)
        return m, t


def llg_rhs(state: SimState, p: MaterialParams) -> VectorField:
    """dm/dt in 1/s (stored in a VectorField for convenience)."""
    sysm = LLGSystem.from_state(state, p)
    return VectorField(state.mesh, sysm(np.asarray(state.m.data)))


def step(state: SimState, p: MaterialParams, controller: Controller = Controller()) -> SimState:
    """Advance ``state`` by one accepted adaptive step."""
    sysm = LLGSystem.from_state(state, p)
    st = Stepper(sysm, controller, state.dt)
    m, t, _ = st.step(np.array(state.m.data), state.t)
    return replace(state, t=t, m=VectorField(state.mesh, m), dt=st.dt)


def run(
    state: SimState,
    p: MaterialParams,
    duration: float,
    controller: Controller = Controller(),
    sample_dt: float | None = None,
    on_sample=None,
) -> SimState:
    """Integrate for ``duration`` seconds at fixed drive and anisotropy.

    ``on_sample(t, m_array)`` is called at every multiple of ``sample_dt``
    after the start time (steps are clipped to land on sample instants).
    """
    sysm = LLGSystem.from_state(state, p)
    st = Stepper(sysm, controller, state.dt)
    m = np.array(state.m.data)
    t0 = state.t
    t_end = t0 + duration
    if sample_dt is None:
        m, t = st.advance(m, t0, t_end)
    else:
        n = int(round(duration / sample_dt))
        t = t0
        for i in range(1, n + 1):
            ts = t_end if i == n else t0 + i * sample_dt
            m, t = st.advance(m, t, ts)
            if on_sample is not None:
                on_sample(t, m)
    return replace(state, t=t_end, m=VectorField(state.mesh, m), dt=st.dt)


def relax(
    state: SimState,
    p: MaterialParams,
    stop: RelaxCriteria = RelaxCriteria(),
    controller: Controller = Controller(dt_max=1e-11),
) -> SimState:
    """Damping-only descent to the nearest energy minimum.

    Stops when the largest per-cell torque |m x B_eff| drops below
    ``stop.torque_tol`` (tesla). If ``stop.max_time`` elapses first, the
    state is returned with ``converged=False``.
    """
    if state.drive is not None and state.drive.J != 0:
        raise ValueError("relax requires zero current")
    if p.alpha == 0:
        raise ValueError("relax needs alpha > 0")
    sysm = LLGSystem.from_state(state, p, precess=False)
    # absolute slack for states whose energy is near zero
    floor = (p.Ku0 + 0.5 * MU0 * p.Ms**2) * state.mesh.cell_volume * state.mesh.ncells
    st = Stepper(sysm, controller, state.dt, energy=sysm.energy, energy_floor=floor)
    m = np.array(state.m.data)
    t = state.t
    t_end = t + stop.max_time
    converged = sysm.torque(m) < stop.torque_tol
    n = 0
    while not converged and t < t_end:
        m, t, _ = st.step(m, t, t_end)
        n += 1
        if n % stop.check_every == 0 or t >= t_end:
            converged = sysm.torque(m) < stop.torque_tol
    if not converged:
        log.warning("relax did not reach torque %.1e T within %.3g s", stop.torque_tol, stop.max_time)
    return replace(state, t=t, m=VectorField(state.mesh, m), dt=st.dt, converged=converged)
