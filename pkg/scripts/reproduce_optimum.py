"""Backflow-maximizing state: minimal transfer, leading coefficients, alpha scan, guess state.

    python scripts/reproduce_optimum.py --n 9999 --scan-n 500 --out-dir results/
"""
import argparse
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ringflow.guess import build_guess, fidelity
from ringflow.optimizer import minimize_transfer, scan_alpha
from ringflow.state import ALPHA_OPT, DimensionalParams, mean_energy, save_state
from ringflow.transfer import transfer_double_sum


@dataclass
class OptimumConfig:
    n: int = 9999
    alpha: float = ALPHA_OPT
    scan_n: int = 500
    scan_min: float = 0.8
    scan_max: float = 1.5
    scan_steps: int = 15


def run(cfg: OptimumConfig, out_dir: Path) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    opt = minimize_transfer(cfg.n, cfg.alpha)
    save_state(out_dir / f"optimum_N{cfg.n}.txt", opt.state)
    guess = build_guess(cfg.n, cfg.alpha)
    save_state(out_dir / f"guess_N{cfg.n}.txt", guess.state)

    scan = scan_alpha(cfg.scan_n, np.linspace(cfg.scan_min, cfg.scan_max, cfg.scan_steps))
    with open(out_dir / f"scan_N{cfg.scan_n}.csv", "w") as fh:
        fh.write("alpha,p_min\n")
        fh.writelines(f"{a!r},{p!r}\n" for a, p in scan.points)

    summary = {
        "config": asdict(cfg),
        "optimum": opt.as_dict(),
        "mean_energy_hbar2_over_MR2": mean_energy(opt.state, DimensionalParams()),
        "guess_transfer": transfer_double_sum(guess.state),
        "guess_fidelity": fidelity(guess.state, opt.state),
        "scan_best": scan.best,
        "scan_minima": scan.minima,
    }
    (out_dir / "optimum_summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return summary


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=9999)
    ap.add_argument("--alpha", type=float, default=ALPHA_OPT)
    ap.add_argument("--scan-n", type=int, default=500)
    ap.add_argument("--out-dir", default="results")
    args = ap.parse_args(argv)
    summary = run(OptimumConfig(n=args.n, alpha=args.alpha, scan_n=args.scan_n), Path(args.out_dir))
    print(json.dumps(summary, indent=2))


if __name__ == "__main__":
    main()
