"""Batch drivers: (Ku0, D) phase diagram, DMI switching window, gradient curve.

Each grid point is an independent pure job. Per-point random seeds come from
``(sweep seed, point index)`` so results do not depend on worker count or
scheduling; tables are returned in canonical sorted order.
"""

from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .config import RunConfig, SweepSpec
from .dynamics import SimState, relax
from .field import total_energy
from .materials import anisotropy_map, gradient_magnitude
from .mesh import VectorField
from .protocol import initial_state, write
from .texture import Kind, classify

log = logging.getLogger(__name__)


def point_config(cfg: RunConfig, point: dict[str, float]) -> RunConfig:
    """Copy of ``cfg`` with sweep parameters substituted."""
    mat = {k: v for k, v in point.items() if k in ("Ku0", "D")}
    vc = {k: v for k, v in point.items() if k == "beta"}
    wr = {"V": point["Vb"]} if "Vb" in point else {}
    if "J" in point:
        wr["J"] = point["J"]
    return dataclasses.replace(
        cfg,
        material=dataclasses.replace(cfg.material, **mat),
        vcma=dataclasses.replace(cfg.vcma, **vc),
        write=dataclasses.replace(cfg.write, **wr),
    )


def point_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def _map(fn, jobs, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs))


# -- phase diagram -----------------------------------------------------------

PHASE_COLUMNS = ("Ku0_J_per_m3", "D_J_per_m2", "kind", "u", "mz", "Q", "energy_J", "seed_used", "converged")


def _phase_point(job):
    cfg, point, index = job
    c = point_config(cfg, point)
    p, mesh = c.material, c.mesh
    k = anisotropy_map(p, c.vcma_profile(), 0.0, mesh)
    th = np.deg2rad(5.0)
    seeds = {
        "tilted": VectorField.uniform(mesh, [np.sin(th), 0.0, np.cos(th)]),
        "random": VectorField.normalized(mesh, point_rng(cfg.seed, index).normal(size=(mesh.ny, mesh.nx, 3))),
    }
    best = None
    for name, m0 in seeds.items():
        out = relax(SimState(0.0, m0, k), p, c.relax, c.integrator)
        e, _ = total_energy(out.m, k, p)
        if best is None or e < best[0]:
            best = (e, name, out)
    e, name, out = best
    tc = classify(out.m, c.thresholds)
    kind = tc.kind.value if out.converged else Kind.INDETERMINATE.value
    return (point["Ku0"], point["D"], kind, tc.u, tc.mz, tc.charge, e, name, bool(out.converged))


def phase_diagram(cfg: RunConfig, spec: SweepSpec | None = None) -> list[tuple]:
    """Equilibrium class on a (Ku0, D) grid, sorted by (Ku0, D).

    Each point relaxes from a 5-degree tilted uniform state and from a seeded
    random state; the lower-energy equilibrium is classified. A point that
    does not converge is reported as Indeterminate.
    """
    spec = spec or cfg.sweeps.phase_diagram
    names = {a.name for a in spec.axes}
    if names != {"Ku0", "D"}:
        raise ValueError("phase diagram axes must be Ku0 and D")
    grid = sorted(spec.grid(), key=lambda pt: (pt["Ku0"], pt["D"]))
    jobs = [(cfg, pt, i) for i, pt in enumerate(grid)]
    return _map(_phase_point, jobs, spec.workers)


def boundary_is_monotone(rows: list[tuple]) -> bool:
    """Uniform region shrinks with D and grows with Ku0.

    Along each Ku0 row the uniform points form a prefix in D; along each D
    column they form a suffix in Ku0.
    """
    ku = sorted({r[0] for r in rows})
    dd = sorted({r[1] for r in rows})
    uni = {(r[0], r[1]): r[2] in (Kind.UNIFORM_UP.value, Kind.UNIFORM_DOWN.value) for r in rows}

    def prefix(seq):
        return all(a or not b for a, b in zip(seq, seq[1:]))

    rows_ok = all(prefix([uni[(k, d)] for d in dd]) for k in ku)
    cols_ok = all(prefix([uni[(k, d)] for k in reversed(ku)]) for d in dd)
    return rows_ok and cols_ok


# -- DMI window --------------------------------------------------------------

DMI_COLUMNS = (
    "D_J_per_m2", "switched_plus", "switched_minus", "deterministic",
    "recovery_plus_s", "recovery_minus_s", "final_plus_from_up", "final_plus_from_down",
    "final_minus_from_up", "final_minus_from_down",
)


def write_runs(c: RunConfig, polarities, starts) -> dict:
    """Writes keyed by ``(voltage sign, initial polarity)``, each from a relaxed start."""
    p, mesh, vc = c.material, c.mesh, c.vcma_profile()
    init = {s: initial_state(mesh, p, s, vc, stop=c.relax) for s in starts}
    return {
        (pol, s): write(init[s], pol, p, vc, c.write, c.integrator, c.thresholds)
        for pol in polarities for s in starts
    }


def _dmi_point(job):
    cfg, point = job
    c = point_config(cfg, point)
    res = write_runs(c, (1, -1), (1, -1))
    sw_p = res[(1, 1)].switched and res[(1, -1)].switched
    sw_m = res[(-1, 1)].switched and res[(-1, -1)].switched
    # recovery time of the run that actually reverses the layer
    rec_p = res[(1, -1)].recovery_time
    rec_m = res[(-1, 1)].recovery_time
    finals = [res[(pol, s)].final_class.kind.value for pol in (1, -1) for s in (1, -1)]
    return (point["D"], sw_p, sw_m, sw_p and sw_m, rec_p, rec_m, *finals)


def dmi_window(cfg: RunConfig, spec: SweepSpec | None = None) -> list[tuple]:
    """Four writes per D value: {+V, -V} x {start Up, start Down}."""
    spec = spec or cfg.sweeps.dmi_window
    if [a.name for a in spec.axes] != ["D"]:
        raise ValueError("DMI window sweeps exactly one axis, D")
    grid = sorted(spec.grid(), key=lambda pt: pt["D"])
    rows = _map(_dmi_point, [(cfg, pt) for pt in grid], spec.workers)
    if not deterministic_set_is_contiguous(rows):
        log.warning("deterministic D values are not contiguous; inspect the sweep")
    return rows


def deterministic_set_is_contiguous(rows: list[tuple]) -> bool:
    flags = [r[3] for r in sorted(rows, key=lambda r: r[0])]
    idx = [i for i, f in enumerate(flags) if f]
    return not idx or idx[-1] - idx[0] + 1 == len(idx)


# -- gradient curve ----------------------------------------------------------

GRADIENT_COLUMNS = ("Vb_V", "beta", "mean_gradient_J_per_m4", "recovery_s", "switched", "deterministic", "final_kind")


def _gradient_point(job):
    cfg, point = job
    c = point_config(cfg, point)
    p, mesh, vc = c.material, c.mesh, c.vcma_profile()
    vb = c.write.V
    grad = gradient_magnitude(anisotropy_map(p, vc, vb, mesh))
    start = -1 if vb > 0 else 1
    init = initial_state(mesh, p, start, vc, stop=c.relax)
    res = write(init, 1, p, vc, c.write, c.integrator, c.thresholds)
    return (vb, vc.beta, grad, res.recovery_time, res.switched, res.deterministic, res.final_class.kind.value)


def gradient_curve(cfg: RunConfig, spec: SweepSpec | None = None) -> list[tuple]:
    """Recovery time after current release versus realized anisotropy gradient.

    All points share D and timing; each starts from the state opposite to the
    one its voltage selects. Sorted by gradient magnitude.
    """
    spec = spec or cfg.sweeps.gradient_curve
    names = [a.name for a in spec.axes]
    if len(names) != 1 or names[0] not in ("Vb", "beta"):
        raise ValueError("gradient curve sweeps one axis, Vb or beta")
    grid = spec.grid()
    rows = _map(_gradient_point, [(cfg, pt) for pt in grid], spec.workers)
    return sorted(rows, key=lambda r: (r[2], r[0], r[1]))


def recovery_is_nonincreasing(rows: list[tuple], tie: float) -> bool:
    """Recovery time never grows with gradient (ties within ``tie`` seconds allowed)."""
    rec = [r[3] for r in sorted(rows, key=lambda r: r[2])]
    if any(r is None for r in rec):
        return False
    return all(b <= a + tie for a, b in zip(rec, rec[1:]))
