"""Fractal dimension of the optimal current: Higuchi fit and power-spectrum slopes.

    python scripts/reproduce_fractality.py --n 9999 --samples 262144 --out-dir results/
"""
import argparse
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ringflow.dynamics import sample_current
from ringflow.fractal import HiguchiConfig, default_strides, higuchi_dimension, spectrum_slope
from ringflow.guess import build_guess
from ringflow.optimizer import minimize_transfer
from ringflow.state import ALPHA_OPT


@dataclass
class FractalConfig:
    n: int = 9999
    alpha: float = ALPHA_OPT
    samples: int = 2**18
    k_max: int = 2**13
    strides: int = 47
    threads: int = 1


def run(cfg: FractalConfig, out_dir: Path) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    opt = minimize_transfer(cfg.n, cfg.alpha)
    series = sample_current(opt.state, 0.0, cfg.alpha, cfg.samples, threads=cfg.threads)
    np.save(out_dir / "current_optimum.npy", series.samples)

    k_max = min(cfg.k_max, cfg.samples // 2)
    higuchi = higuchi_dimension(series, HiguchiConfig(tuple(default_strides(k_max, cfg.strides).tolist())))
    (out_dir / "higuchi_table.csv").write_text(higuchi.table_csv())

    guess = build_guess(cfg.n, cfg.alpha).state
    spectra = {f"{who}_{w}": spectrum_slope(state, w).as_dict()
               for who, state in (("guess", guess), ("optimum", opt.state))
               for w in ("none", "m")}
    summary = {"config": asdict(cfg), "higuchi": higuchi.as_dict(), "spectra": spectra,
               "current_min": float(series.samples.min()),
               "current_max": float(series.samples.max())}
    (out_dir / "fractality_summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return summary


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=9999)
    ap.add_argument("--samples", type=int, default=2**18)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out-dir", default="results")
    args = ap.parse_args(argv)
    cfg = FractalConfig(n=args.n, samples=args.samples, threads=args.threads)
    print(json.dumps(run(cfg, Path(args.out_dir)), indent=2))


if __name__ == "__main__":
    main()
