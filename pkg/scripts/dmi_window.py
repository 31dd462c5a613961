"""DMI switching window: four writes per D value, deterministic flag per point.

    python scripts/dmi_window.py [--config cfg.json] [--out out/dmi]
"""

import argparse
from pathlib import Path

from micromtj import sweeps
from micromtj.config import load_config
from micromtj.io import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default="defaults")
    ap.add_argument("--out", default="out/dmi")
    args = ap.parse_args()
    out = Path(args.out)
    cfg = load_config(args.config, echo_dir=out)

    rows = sweeps.dmi_window(cfg)
    write_csv(out / "dmi_window.csv", sweeps.DMI_COLUMNS, rows)
    for r in rows:
        rec = [f"{x * 1e9:.2f} ns" if x is not None else "-" for x in r[4:6]]
        print(f"D={r[0]:.2e}  deterministic={str(r[3]):5s}  recovery +V {rec[0]}, -V {rec[1]}  finals {r[6:]}")
    print("contiguous:", sweeps.deterministic_set_is_contiguous(rows))


if __name__ == "__main__":
    main()
