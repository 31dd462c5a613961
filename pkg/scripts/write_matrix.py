"""Run the {+V, -V} x {start Up, start Down} write matrix and save every trace.

    python scripts/write_matrix.py [--config cfg.json] [--out out/matrix]
"""

import argparse
from pathlib import Path

from micromtj import sweeps
from micromtj.config import load_config
from micromtj.io import write_csv, write_ovf
from micromtj.protocol import Trace


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default="defaults")
    ap.add_argument("--out", default="out/matrix")
    args = ap.parse_args()
    out = Path(args.out)
    cfg = load_config(args.config, echo_dir=out)

    runs = sweeps.write_runs(cfg, (1, -1), (1, -1))
    summary = []
    for (pol, start), res in sorted(runs.items()):
        tag = f"V{'p' if pol > 0 else 'm'}_from_{'up' if start > 0 else 'down'}"
        write_csv(out / f"{tag}.csv", Trace.COLUMNS, res.trace.rows())
        write_ovf(res.final_state.m, out / f"{tag}.ovf", t=res.final_state.t, Ms=cfg.material.Ms)
        fc = res.final_class
        summary.append((pol, start, fc.kind.value, fc.u, res.switched, res.recovery_time))
        print(f"{tag:14s} -> {fc.kind.value:14s} u={fc.u:.3f} recovery={res.recovery_time}")
    write_csv(out / "matrix.csv", ("V_sign", "start", "final_kind", "u", "switched", "recovery_s"), summary)


if __name__ == "__main__":
    main()
