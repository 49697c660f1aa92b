"""Flip-probability sweep over all correction modes, i.i.d. and burst noise.

Writes one CSV per noise model into results/ (or --out) and echoes a table.

    python scripts/run_sweep.py --trials 1000 --seed 0
"""

import argparse
from pathlib import Path

from scanline39.experiment import ExperimentSpec, rows_to_csv, rows_to_table, run_experiment

PROBS = (0.0, 0.001, 0.002, 0.005, 0.01, 0.02, 0.05)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    for burst in (False, True):
        spec = ExperimentSpec(
            flip_probs=PROBS,
            trials=args.trials,
            corrections=("on", "off", "symmetric"),
            base_seed=args.seed,
            burst=burst,
        )
        rows = run_experiment(spec)
        name = "sweep_burst.csv" if burst else "sweep_iid.csv"
        (args.out / name).write_text(rows_to_csv(rows))
        print(f"== {name}")
        print(rows_to_table(rows))


if __name__ == "__main__":
    main()
