"""Command-line front end.

Each subcommand parses its flags, calls one library function and writes the
result: JSON for scalars and reports, CSV for series and tables. A run
manifest (parameters, file digests, duration, version) is written as one
JSON line to stderr and, with ``--manifest``, to a file.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .dynamics import default_threads, sample_current, series_to_csv
from .errors import RingflowError
from .fractal import (HiguchiConfig, default_strides, higuchi_dimension,
                      read_series_csv, spectrum_slope)
from .guess import build_guess, fidelity
from .optimizer import minimize_transfer, scan_alpha
from .spectral import asymptotic_bounds, closed_form_spectrum
from .state import ALPHA_OPT, format_state, load_state, looks_like_state_file
from .transfer import transfer_decomposed, transfer_double_sum


def _sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _sha256_file(path) -> str:
    return _sha256_bytes(Path(path).read_bytes())


class _Run:
    """Collects outputs and file digests for the manifest."""

    def __init__(self, args):
        self.args = args
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, str] = {}
        self.stdout_parts: list[str] = []

    def read_input(self, path):
        self.inputs[str(path)] = _sha256_file(path)

    def emit(self, text: str, path=None):
        if path is None:
            self.stdout_parts.append(text)
            sys.stdout.write(text)
            return
        Path(path).write_text(text, encoding="utf-8")
        self.outputs[str(path)] = _sha256_bytes(text.encode("utf-8"))

    def emit_json(self, obj, path=None):
        self.emit(json.dumps(obj, sort_keys=True) + "\n", path)

    def manifest(self, duration: float) -> dict:
        params = {k: v for k, v in vars(self.args).items() if k not in ("func", "manifest")}
        outputs = dict(self.outputs)
        if self.stdout_parts:
            outputs["<stdout>"] = _sha256_bytes("".join(self.stdout_parts).encode("utf-8"))
        return {
            "subcommand": self.args.command,
            "params": params,
            "inputs": self.inputs,
            "outputs": outputs,
            "duration_s": duration,
            "version": __version__,
        }


# --------------------------------------------------------------------------
# subcommands

def cmd_bounds(run: _Run):
    sp = closed_form_spectrum(run.args.n)
    lo, hi = asymptotic_bounds(run.args.n)
    run.emit_json({
        "n": sp.n_max,
        "lambda_minus": sp.lambda_minus,
        "lambda_plus": sp.lambda_plus,
        "a_plus": sp.a_plus,
        "A_plus": sp.A_plus,
        "A_minus": sp.A_minus,
        "asymptotic_lower": lo,
        "asymptotic_upper": hi,
    }, run.args.out)


def _load(run: _Run, path):
    run.read_input(path)
    return load_state(path)


def cmd_current(run: _Run):
    a = run.args
    state = _load(run, a.state)
    t_end = state.alpha if a.t_end is None else a.t_end
    series = sample_current(state, a.t_start, t_end, a.samples, threads=a.threads)
    run.emit(series_to_csv(series), a.out)


def cmd_transfer(run: _Run):
    a = run.args
    state = _load(run, a.state)
    alpha = a.alpha if a.alpha is not None else state.alpha
    total = transfer_double_sum(state, alpha)
    parts = transfer_decomposed(state, a.panels, alpha)
    run.emit_json({"total": total, "plus": parts.plus_part, "minus": parts.minus_part,
                   "alpha": alpha}, a.json)


def cmd_minimize(run: _Run):
    a = run.args
    res = minimize_transfer(a.n, a.alpha, a.tol, method=a.method, backend=a.backend)
    if a.out:
        run.emit(format_state(res.state), a.out)
    run.emit_json(res.as_dict(), a.json)


def cmd_scan_alpha(run: _Run):
    a = run.args
    if a.steps < 3:
        raise RingflowError("scan needs at least 3 grid points")
    grid = np.linspace(a.alpha_min, a.alpha_max, a.steps)
    scan = scan_alpha(a.n, grid)
    lines = ["alpha,p_min"] + [f"{x!r},{y!r}" for x, y in scan.points]
    run.emit("\n".join(lines) + "\n", a.out)
    if a.summary:
        best = scan.best
        run.emit_json({
            "n": a.n,
            "minima": [{"alpha": x, "p_min": y} for x, y in scan.minima],
            "best_alpha": best[0] if best else None,
            "best_p_min": best[1] if best else None,
            "failures": {repr(k): v for k, v in scan.failures.items()},
        }, a.summary)


def cmd_guess(run: _Run):
    a = run.args
    g = build_guess(a.n, a.alpha)
    report = {
        "n": g.n_max,
        "alpha": g.alpha,
        "normalization": g.normalization,
        "transfer": transfer_double_sum(g.state),
    }
    if a.compare:
        other = _load(run, a.compare)
        report["fidelity"] = fidelity(g.state, other)
    if a.out:
        run.emit(format_state(g.state), a.out)
    run.emit_json(report, a.json)


def cmd_higuchi(run: _Run):
    a = run.args
    run.read_input(a.input)
    if looks_like_state_file(a.input):
        state = load_state(a.input)
        values = sample_current(state, 0.0, state.alpha, a.samples, threads=a.threads).samples
    else:
        values = read_series_csv(a.input)
    k_max = min(a.k_max, values.size // 2)
    config = HiguchiConfig(tuple(default_strides(k_max, a.strides).tolist()))
    report = higuchi_dimension(values, config)
    if a.table:
        run.emit(report.table_csv(), a.table)
    run.emit_json(report.as_dict(), a.out)


def cmd_spectrum(run: _Run):
    a = run.args
    state = _load(run, a.state)
    report = spectrum_slope(state, a.weight)
    if a.table:
        run.emit(report.table_csv(), a.table)
    run.emit_json(report.as_dict(), a.out)


# --------------------------------------------------------------------------

def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ringflow",
                                description="Quantum backflow on a ring: bounds, optimal states, fractality.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--threads", type=_positive_int, default=None,
                   help="worker cap (default: $RINGFLOW_THREADS or 1)")
    p.add_argument("--manifest", default=None, help="also write the run manifest here")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("bounds", help="instantaneous current bounds lambda_-/lambda_+")
    s.add_argument("--n", type=_positive_int, required=True)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("current", help="sample j(t) on a uniform grid as CSV")
    s.add_argument("--state", required=True)
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--t-start", type=float, default=0.0)
    s.add_argument("--t-end", type=float, default=None, help="default: the state's alpha")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_current)

    s = sub.add_parser("transfer", help="probability transfer and its +/- parts")
    s.add_argument("--state", required=True)
    s.add_argument("--alpha", type=_positive_float, default=None)
    s.add_argument("--panels", type=int, default=None)
    s.add_argument("--json", default=None)
    s.set_defaults(func=cmd_transfer)

    s = sub.add_parser("minimize", help="minimal transfer eigenpair of the sinc kernel")
    s.add_argument("--n", type=_positive_int, required=True)
    s.add_argument("--alpha", type=_positive_float, default=ALPHA_OPT)
    s.add_argument("--tol", type=float, default=1e-12)
    s.add_argument("--method", choices=("davidson", "lanczos"), default="davidson")
    s.add_argument("--backend", choices=("dense", "direct", "fft"), default=None)
    s.add_argument("--out", default=None, help="coefficient file to write")
    s.add_argument("--json", default=None)
    s.set_defaults(func=cmd_minimize)

    s = sub.add_parser("scan-alpha", help="P_min over a grid of alpha values (CSV)")
    s.add_argument("--n", type=_positive_int, required=True)
    s.add_argument("--alpha-min", type=_positive_float, default=0.8)
    s.add_argument("--alpha-max", type=_positive_float, default=1.5)
    s.add_argument("--steps", type=_positive_int, default=15)
    s.add_argument("--out", default=None)
    s.add_argument("--summary", default=None, help="JSON file with refined minima")
    s.set_defaults(func=cmd_scan_alpha)

    s = sub.add_parser("guess", help="closed-form guess state")
    s.add_argument("--n", type=_positive_int, required=True)
    s.add_argument("--alpha", type=_positive_float, default=ALPHA_OPT)
    s.add_argument("--out", default=None)
    s.add_argument("--compare", default=None, help="state file to compute fidelity against")
    s.add_argument("--json", default=None)
    s.set_defaults(func=cmd_guess)

    s = sub.add_parser("higuchi", help="Higuchi dimension of a series or of a state's current")
    s.add_argument("--input", required=True, help="t,j CSV or coefficient file")
    s.add_argument("--samples", type=int, default=2**18)
    s.add_argument("--k-max", type=_positive_int, default=8192)
    s.add_argument("--strides", type=_positive_int, default=47)
    s.add_argument("--table", default=None, help="CSV of (log2 k, log2 L_k)")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_higuchi)

    s = sub.add_parser("spectrum", help="power-spectrum slope of h0 or h1")
    s.add_argument("--state", required=True)
    s.add_argument("--weight", choices=("none", "m"), default="none")
    s.add_argument("--table", default=None)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_spectrum)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads is None:
        args.threads = default_threads()

    job = _Run(args)
    start = time.perf_counter()
    try:
        with threadpool_limits(limits=args.threads):
            args.func(job)
    except RingflowError as exc:
        print(f"ringflow {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        where = f" ({exc.filename})" if getattr(exc, "filename", None) else ""
        print(f"ringflow {args.command}: I/O error{where}: {exc.strerror or exc}", file=sys.stderr)
        return 1
    manifest = job.manifest(time.perf_counter() - start)
    line = json.dumps(manifest, sort_keys=True, default=str)
    print(line, file=sys.stderr)
    if args.manifest:
        Path(args.manifest).write_text(line + "\n", encoding="utf-8")
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
