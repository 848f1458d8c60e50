"""Write every figure CSV into one directory by driving the CLI.

    python3 scripts/reproduce_figures.py out/ [--trials N] [--seed S]

Fig. 5 needs one sum-rate sweep per Omega_sw value; the other figures map
to a single subcommand each.
"""
import argparse
import sys
from pathlib import Path

from efas_mimo.cli import main as cli

JOBS = [
    ("outage.csv", ["fig-outage"]),
    ("capacity.csv", ["fig-capacity"]),
    ("zf_dist.csv", ["fig-zf-dist"]),
    *[(f"sumrate_snr_osw{o}.csv", ["fig-sumrate", "--vary", "snr", "--set", f"omega_sw={o}"])
      for o in (0, 1, 5, 10)],
    ("sumrate_k.csv", ["fig-sumrate", "--vary", "k", "--set", "snr_grid_db=0,5,10"]),
    ("sumrate_m.csv", ["fig-sumrate", "--vary", "m", "--set", "snr_db=5"]),
    ("physical_omega.csv", ["physical-omega"]),
]


def run(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("out_dir")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=1)
    args = p.parse_args(argv)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    common = ["--seed", str(args.seed)] + (["--trials", str(args.trials)] if args.trials else [])
    for name, cmd in JOBS:
        code = cli([*cmd, *common, "--out", str(out / name)])
        print(f"{name}: exit {code}")
        if code:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(run())
