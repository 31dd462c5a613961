"""Command-line entry point: ``micromtj <subcommand> --config FILE --out DIR``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

import numpy as np

from . import sweeps
from .config import ConfigError, RunConfig, load_config, save_config
from .dynamics import SimState, relax
from .field import total_energy
from .io import write_csv, write_ovf
from .materials import anisotropy_map
from .mesh import VectorField
from .protocol import Trace, initial_state, readout, write
from .texture import classify

log = logging.getLogger("micromtj")

SUMMARY_COLUMNS = ("kind", "u", "mz", "Q", "energy_J", "converged", "t_s")


def _cmd_relax(cfg: RunConfig, out: Path, args) -> None:
    p, mesh = cfg.material, cfg.mesh
    k = anisotropy_map(p, cfg.vcma_profile(), 0.0, mesh)
    if args.initial == "random":
        rng = np.random.default_rng(cfg.seed)
        m0 = VectorField.normalized(mesh, rng.normal(size=(mesh.ny, mesh.nx, 3)))
    else:
        s = 1.0 if args.initial == "up" else -1.0
        th = np.deg2rad(5.0)
        m0 = VectorField.uniform(mesh, [np.sin(th), 0.0, s * np.cos(th)])
    st = relax(SimState(0.0, m0, k), p, cfg.relax, cfg.integrator)
    tc = classify(st.m, cfg.thresholds)
    e, _ = total_energy(st.m, k, p)
    write_csv(out / "relax.csv", SUMMARY_COLUMNS, [(tc.kind.value, tc.u, tc.mz, tc.charge, e, st.converged, st.t)])
    write_ovf(st.m, out / "relaxed.ovf", t=st.t, Ms=p.Ms)
    print(f"relaxed: {tc.kind.value} u={tc.u:.4f}")


def _cmd_write(cfg: RunConfig, out: Path, args) -> None:
    pol = {"+": 1, "-": -1, "0": 0}[args.polarity]
    start = {"up": 1, "down": -1}[args.initial]
    p, mesh, vc = cfg.material, cfg.mesh, cfg.vcma_profile()
    init = initial_state(mesh, p, start, vc, stop=cfg.relax)
    res = write(init, pol, p, vc, cfg.write, cfg.integrator, cfg.thresholds)
    write_csv(out / "write_trace.csv", Trace.COLUMNS, res.trace.rows())
    try:
        state, _ = readout(res.final_state, cfg.pillar_mask())
    except ValueError:
        state = "indeterminate"
    fc = res.final_class
    write_csv(
        out / "write_summary.csv",
        ("polarity", "initial", "final_kind", "u", "Q", "switched", "deterministic", "recovery_s", "readout"),
        [(args.polarity, args.initial, fc.kind.value, fc.u, fc.charge, res.switched, res.deterministic,
          res.recovery_time, state)],
    )
    write_ovf(res.final_state.m, out / "final.ovf", t=res.final_state.t, Ms=p.Ms)
    print(f"write {args.polarity}: {args.initial} -> {fc.kind.value}, switched={res.switched}")


def _cmd_phase(cfg: RunConfig, out: Path, args) -> None:
    rows = sweeps.phase_diagram(cfg)
    write_csv(out / "phase_diagram.csv", sweeps.PHASE_COLUMNS, rows)
    print(f"phase diagram: {len(rows)} points, monotone boundary = {sweeps.boundary_is_monotone(rows)}")


def _cmd_dmi(cfg: RunConfig, out: Path, args) -> None:
    rows = sweeps.dmi_window(cfg)
    write_csv(out / "dmi_window.csv", sweeps.DMI_COLUMNS, rows)
    det = [r[0] for r in rows if r[3]]
    print(f"dmi window: deterministic at D = {det}")


def _cmd_gradient(cfg: RunConfig, out: Path, args) -> None:
    rows = sweeps.gradient_curve(cfg)
    write_csv(out / "gradient_curve.csv", sweeps.GRADIENT_COLUMNS, rows)
    print(f"gradient curve: {len(rows)} points")


def _cmd_validate(cfg: RunConfig, out: Path, args) -> None:
    print("config ok")


COMMANDS = {
    "relax": _cmd_relax,
    "write": _cmd_write,
    "phase-diagram": _cmd_phase,
    "dmi-window": _cmd_dmi,
    "gradient-curve": _cmd_gradient,
    "validate-config": _cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="micromtj", description="Field-free SOT/VCMA free-layer simulator")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", default="defaults", help="JSON config file, or 'defaults'")
        sp.add_argument("--out", default=None, help="output directory (default: config out_dir)")
        sp.add_argument("--seed", type=int, default=None, help="override the global seed")
        if name == "relax":
            sp.add_argument("--initial", choices=("up", "down", "random"), default="up")
        if name == "write":
            sp.add_argument("--polarity", choices=("+", "-", "0"), required=True)
            sp.add_argument("--initial", choices=("up", "down"), default="down")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, seed=args.seed)
        if args.command == "validate-config":
            _cmd_validate(cfg, None, args)
            return 0
        out = Path(args.out or cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        save_config(cfg, out / "resolved_config.json")
        COMMANDS[args.command](cfg, out, args)
    except ConfigError as e:
        print(f"error: config: {e}", file=sys.stderr)
        return 1
    except (OSError, ValueError, RuntimeError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
