"""Equilibrium (Ku0, D) phase diagram; prints a letter map and writes a CSV.

    python scripts/phase_diagram.py [--config cfg.json] [--out out/phase] [--workers N]
"""

import argparse
import dataclasses
from pathlib import Path

from micromtj import sweeps
from micromtj.config import load_config
from micromtj.io import write_csv

LETTER = {"UniformUp": "U", "UniformDown": "D", "VerticalStripe": "S", "CircularStripe": "C", "Indeterminate": "?"}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default="defaults")
    ap.add_argument("--out", default="out/phase")
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()
    out = Path(args.out)
    cfg = load_config(args.config, echo_dir=out)
    spec = cfg.sweeps.phase_diagram
    if args.workers:
        spec = dataclasses.replace(spec, workers=args.workers)

    rows = sweeps.phase_diagram(cfg, spec)
    write_csv(out / "phase_diagram.csv", sweeps.PHASE_COLUMNS, rows)
    ds = sorted({r[1] for r in rows})
    print("Ku0 \\ D  " + " ".join(f"{d:.1e}" for d in ds))
    for ku in sorted({r[0] for r in rows}, reverse=True):
        line = {r[1]: LETTER[r[2]] for r in rows if r[0] == ku}
        print(f"{ku:.2e} " + " ".join(f"{line[d]:>7s}" for d in ds))
    print("monotone boundary:", sweeps.boundary_is_monotone(rows))


if __name__ == "__main__":
    main()
