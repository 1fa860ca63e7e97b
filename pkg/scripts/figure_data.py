"""Data behind the figures (no plotting).

fig1_fig5_rc*.csv   J(q) and -J ln J for 1s, 2s, 3s, 2p, 3p, 3d at rc = 0.1, 10, 20
fig2_J0.csv         <1/2p> versus n (l <= 5, n <= 9) at rc = 0.1, 10, 20, inf
fig3_shannon.csv    S^c versus n, same states and radii
fig4_onicescu.csv   E^c versus n, same states and radii

    python3 scripts/figure_data.py --out results/figures --jobs 4
"""
import argparse
import os
import sys

from confined_compton.cli import main as cli_main

STATES = ["1,0", "2,0", "3,0", "2,1", "3,1", "3,2"]
# q range per radius: strong confinement spreads J over q ~ pi/rc
PROFILE_Q_MAX = {"0.1": 120.0, "10": 5.0, "20": 5.0}
SCAN_RC = ["0.1", "10", "20", "inf"]


def run(out_dir: str, jobs: int) -> int:
    os.makedirs(out_dir, exist_ok=True)
    codes = []
    for rc, q_max in PROFILE_Q_MAX.items():
        argv = ["profile", "--rc", rc, "--q-max", str(q_max), "--points", "601", "--format", "csv",
                "--jobs", str(jobs), "--out", os.path.join(out_dir, f"fig1_fig5_rc{rc}.csv")]
        for s in STATES:
            argv += ["--state", s]
        codes.append(cli_main(argv))
    for fig, quantity in (("fig2", "J0"), ("fig3", "shannon"), ("fig4", "onicescu")):
        argv = ["scan", "--n-max", "9", "--l-max", "5", "--quantity", quantity, "--format", "csv",
                "--jobs", str(jobs), "--out", os.path.join(out_dir, f"{fig}_{quantity}.csv")]
        for rc in SCAN_RC:
            argv += ["--rc", rc]
        codes.append(cli_main(argv))
    print(f"figure data written to {out_dir}")
    return max(codes)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--out", default="results/figures")
    ap.add_argument("--jobs", type=int, default=1)
    a = ap.parse_args()
    sys.exit(run(a.out, a.jobs))
