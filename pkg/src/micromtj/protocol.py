"""Three-step field-free write, readout and recovery-time measurement.

Write sequence: (1) spin-orbit current alone, (2) current plus gate voltage,
(3) voltage held after the current is removed. The gate voltage makes the
anisotropy non-uniform along x, which decides which uniform state the chiral
intermediate texture collapses into.

With the default geometry (gate ramp increasing along +x, current along +y,
D > 0) simulation gives this truth table, independent of the initial state:

    +V  ->  UniformUp   (readout P)
    -V  ->  UniformDown (readout AP)
     0  ->  no preference; the layer stays in the in-plane intermediate state
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import Controller, LLGSystem, RelaxCriteria, SimState, Stepper, relax
from .materials import DriveSchedule, MaterialParams, VcmaProfile, anisotropy_map
from .mesh import Mesh, RegionMask, VectorField, mean_vector
from .texture import Kind, TextureClass, Thresholds, classify

log = logging.getLogger(__name__)

# sign(V) -> final m_z polarity, found by simulation for the default geometry
VOLTAGE_POLARITY = {+1: +1, -1: -1}


class IndeterminateReadout(ValueError):
    """Pillar magnetization too weak to decide between P and AP."""


@dataclass(frozen=True)
class WriteTiming:
    J: float = 1.5e12
    V: float = 0.165
    durations: tuple[float, float, float] = (2e-9, 1e-9, 5e-9)
    j_dir: tuple[float, float, float] = (0.0, 1.0, 0.0)
    sample_dt: float = 1e-12

    def __post_init__(self):
        if self.sample_dt <= 0:
            raise ValueError("sample_dt must be > 0")
        if any(d <= 0 for d in self.durations) or len(self.durations) != 3:
            raise ValueError("durations must be three positive times")
        for d in self.durations:
            n = d / self.sample_dt
            if abs(n - round(n)) > 1e-6:
                raise ValueError("segment durations must be multiples of sample_dt")
        object.__setattr__(self, "durations", tuple(float(d) for d in self.durations))
        object.__setattr__(self, "j_dir", tuple(float(c) for c in self.j_dir))

    def schedule(self, polarity: int) -> DriveSchedule:
        return DriveSchedule.three_step(self.J, polarity * self.V, self.durations, self.j_dir)


@dataclass(frozen=True, eq=False)
class Trace:
    """Sampled layer averages; columns t [s], <m>, J [A/m^2], V [V]."""

    t: np.ndarray
    m: np.ndarray
    J: np.ndarray
    V: np.ndarray

    COLUMNS = ("t_s", "mx", "my", "mz", "J_A_per_m2", "V_volt")

    def rows(self):
        for i in range(len(self.t)):
            yield (self.t[i], *self.m[i], self.J[i], self.V[i])

    def release_index(self) -> int:
        """Index of the first sample after the current has been switched off."""
        on = np.flatnonzero(self.J != 0)
        if len(on) == 0:
            raise ValueError("trace has no current-on segment")
        after = np.flatnonzero(self.J[on[0]:] == 0)
        if len(after) == 0:
            raise ValueError("trace has no current-off segment after the current pulse")
        return int(on[0] + after[0])


@dataclass(frozen=True, eq=False)
class WriteResult:
    trace: Trace
    final_class: TextureClass
    final_state: SimState
    target: int
    switched: bool
    recovery_time: float | None

    @property
    def deterministic(self) -> bool:
        """False when no gate voltage was applied (nothing selects a polarity)."""
        return self.target != 0


def initial_state(
    mesh: Mesh,
    p: MaterialParams,
    polarity: int,
    vcma: VcmaProfile | None = None,
    tilt_deg: float = 5.0,
    stop: RelaxCriteria = RelaxCriteria(),
) -> SimState:
    """Relaxed near-uniform state of the given polarity at zero voltage."""
    k = anisotropy_map(p, vcma or VcmaProfile(), 0.0, mesh)
    th = np.deg2rad(tilt_deg)
    m0 = VectorField.uniform(mesh, [np.sin(th), 0.0, polarity * np.cos(th)])
    return relax(SimState(0.0, m0, k), p, stop)


def write(
    initial: SimState,
    polarity: int,
    p: MaterialParams,
    vcma: VcmaProfile,
    timing: WriteTiming = WriteTiming(),
    controller: Controller = Controller(),
    thresholds: Thresholds = Thresholds(),
) -> WriteResult:
    """Run the three-step write with gate voltage ``polarity * timing.V``.

    ``polarity`` is +1 or -1 (0 applies no voltage). ``switched`` is true
    when the final state is uniform with the polarity selected by the sign
    of the voltage (see ``VOLTAGE_POLARITY``).
    """
    if polarity not in (-1, 0, 1):
        raise ValueError("polarity must be +1, -1 or 0")
    mesh = initial.mesh
    sched = timing.schedule(polarity)
    m = np.array(initial.m.data)
    dt_hint = initial.dt
    n_seg = [int(round(s.duration / timing.sample_dt)) for s in sched.segments]
    t_start = 0.0  # trace time is measured from the start of the write

    ts, ms, js, vs = [], [], [], []
    i0 = 0
    state = initial
    for seg, n in zip(sched.segments, n_seg):
        k = anisotropy_map(p, vcma, seg.V, mesh)
        state = SimState(t_start + i0 * timing.sample_dt, VectorField(mesh, m), k, drive=seg, dt=dt_hint)
        st = Stepper(LLGSystem.from_state(state, p), controller, dt_hint)
        t = state.t
        for i in range(i0, i0 + n):
            ts.append(t_start + i * timing.sample_dt)
            ms.append(m.reshape(-1, 3).mean(axis=0))
            js.append(seg.J)
            vs.append(seg.V)
            m, t = st.advance(m, t, t_start + (i + 1) * timing.sample_dt)
        dt_hint = st.dt
        i0 += n
    ts.append(t_start + i0 * timing.sample_dt)
    ms.append(m.reshape(-1, 3).mean(axis=0))
    js.append(sched.segments[-1].J)
    vs.append(sched.segments[-1].V)

    trace = Trace(np.array(ts), np.array(ms), np.array(js), np.array(vs))
    final = replace(state, t=ts[-1], m=VectorField(mesh, m), dt=dt_hint)
    fc = classify(final.m, thresholds)
    target = VOLTAGE_POLARITY.get(int(np.sign(polarity)), 0) if polarity != 0 and timing.V != 0 else 0
    switched = target != 0 and fc.kind.is_uniform and fc.kind.polarity == target
    if fc.kind == Kind.INDETERMINATE:
        log.info("write ended in an indeterminate texture (u = %.3f)", fc.u)
    rt = recovery_time(trace, thresholds.uniform)
    return WriteResult(trace, fc, final, target, switched, rt)


def recovery_time(trace: Trace, threshold: float = 0.9) -> float | None:
    """Time from current release until |<m_z>| reaches ``threshold`` for good.

    Returns None if the final sample is still below the threshold.
    """
    i_rel = trace.release_index()
    u = np.abs(trace.m[i_rel:, 2])
    below = np.flatnonzero(u < threshold)
    if len(below) == 0:
        return 0.0
    last = below[-1]
    if last == len(u) - 1:
        return None
    return float(trace.t[i_rel + last + 1] - trace.t[i_rel])


def readout(state: SimState, pillar: RegionMask | None = None, threshold: float = 0.5) -> tuple[str, int]:
    """Tunnel-junction state against a reference layer along +z."""
    mz = mean_vector(state.m, pillar)[2]
    if abs(mz) < threshold:
        raise IndeterminateReadout(f"|<m_z>| = {abs(mz):.3f} under the pillar is below {threshold}")
    return ("P", 1) if mz > 0 else ("AP", -1)
