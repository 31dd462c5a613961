"""Recovery time after current release versus the anisotropy gradient.

    python scripts/gradient_curve.py [--config cfg.json] [--out out/gradient]
"""

import argparse
from pathlib import Path

from micromtj import sweeps
from micromtj.config import load_config
from micromtj.io import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default="defaults")
    ap.add_argument("--out", default="out/gradient")
    args = ap.parse_args()
    out = Path(args.out)
    cfg = load_config(args.config, echo_dir=out)

    rows = sweeps.gradient_curve(cfg)
    write_csv(out / "gradient_curve.csv", sweeps.GRADIENT_COLUMNS, rows)
    for r in rows:
        rec = "never" if r[3] is None else f"{r[3] * 1e9:.3f} ns"
        print(f"Vb={r[0]:.3f} V  <|dK/dx|>={r[2]:.3e} J/m^4  recovery {rec}  final {r[6]}")
    print("non-increasing:", sweeps.recovery_is_nonincreasing(rows, tie=cfg.write.sample_dt))


if __name__ == "__main__":
    main()
