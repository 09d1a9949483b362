"""Command-line entry point: ``shiftmean <subcommand> [options]``.

Exit status is 0 on success, 1 for invalid parameters or input files and 2
for numerical failures.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
import warnings
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from . import io
from .baselines import ProcrustesConfig, direct_mean, procrustean_mean
from .errors import NumericalError, ParameterError
from .estimators import ThresholdPolicy, estimate_fn1, estimate_fn2, hard_threshold_estimate
from .fourier import PeriodicSignal, curves_to_coeffs
from .harness import (
    PAPER_ESTIMATORS,
    Dataset,
    EstimatorSpec,
    ExperimentConfig,
    _parallel_map,
    mise,
    paper_config,
    rate_study,
    resolve_threads,
    run_estimator,
    run_risk_study,
    simulate,
)
from .meyer import WaveletBasisSpec
from .signals import SIGNAL_NAMES

PANELS = (
    ("a_mean_pattern", None),
    ("b_sample", None),
    ("c_direct_mean", "direct"),
    ("d_fn1", "fn1"),
    ("e_fn2", "fn2"),
    ("f_procrustean", "procrustes"),
)
SAMPLE_CURVES = 10


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParameterError(f"{self.prog}: {message}")


def _validation_message(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "config"
        parts.append(f"{loc}: {err['msg']}")
    return "invalid config: " + "; ".join(parts)


def load_config(path, seed: int | None = None, paper_defaults: bool = False, **overrides) -> ExperimentConfig:
    if path is not None:
        data = io.read_json(path)
        if not isinstance(data, dict):
            raise ParameterError(f"{path}: config must be a JSON object")
        cfg = ExperimentConfig.model_validate(data)
    elif paper_defaults:
        cfg = paper_config()
    else:
        cfg = ExperimentConfig()
    updates = {k: v for k, v in overrides.items() if v is not None}
    if seed is not None:
        updates["seed"] = seed
    if updates:
        cfg = ExperimentConfig.model_validate({**cfg.model_dump(), **updates})
    return cfg


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="experiment config JSON")
    p.add_argument("--seed", type=int, help="master seed (overrides the config)")
    p.add_argument("--out-dir", type=Path, default=Path("."), help="output directory")
    p.add_argument("--threads", type=int, help="worker threads (default: $SHIFTMEAN_THREADS or 1)")
    p.add_argument("--paper-defaults", action="store_true",
                   help="start from the n=200 Laplace(0.1) four-estimator configuration")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="shiftmean", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="draw one dataset and write it as CSV")
    _common(p)
    p.add_argument("--replication", type=int, default=0)

    p = sub.add_parser("estimate", help="run one estimator on a dataset CSV")
    _common(p)
    p.add_argument("--data", type=Path, required=True, help="dataset CSV with columns m,i,y")
    p.add_argument("--estimator", required=True,
                   choices=["direct", "procrustes", "frechet", "cutoff", "known_g", "fn1", "fn2"])
    p.add_argument("--density", help='shift density as JSON, e.g. \'{"kind": "laplace", "scale": 0.1}\'')
    p.add_argument("--noise-sd", type=float, help="known per-sample noise sd (default: estimated)")
    p.add_argument("--eta", type=float)
    p.add_argument("--ell0", type=int)
    p.add_argument("--j0", type=int)
    p.add_argument("--j1", type=int)
    p.add_argument("--M", type=int)

    p = sub.add_parser("risk", help="Monte Carlo MISE of every configured estimator")
    _common(p)
    p.add_argument("--replications", type=int)

    p = sub.add_parser("rate", help="slope of log MISE against log n for the known-density estimator")
    _common(p)
    p.add_argument("--n-grid", default="50,100,200,400,800,1600")
    p.add_argument("--s", type=float, help="smoothness used for the reference slope")
    p.add_argument("--nu", type=float, help="ill-posedness used for the reference slope")
    p.add_argument("--replications", type=int)

    p = sub.add_parser("compare", help="four-signal comparison with per-panel CSV files")
    _common(p)
    return parser


# -- subcommands ---------------------------------------------------------------------

def cmd_simulate(args) -> dict:
    cfg = load_config(args.config, args.seed, args.paper_defaults)
    data = simulate(cfg, args.replication)
    out = args.out_dir
    io.write_dataset(out / "dataset.csv", data.curves, data.taus)
    io.write_signal(out / "signal.csv", data.f)
    io.write_json(out / "config.json", cfg.model_dump(mode="json"))
    return {"dataset": str(out / "dataset.csv"), "n": cfg.n, "N": cfg.N}


def cmd_estimate(args) -> dict:
    cfg = load_config(args.config, args.seed, args.paper_defaults)
    Y, _ = io.read_dataset(args.data)
    n, N = Y.shape
    updates = {"n": n, "N": N, "noise_known": args.noise_sd is not None}
    if args.noise_sd is not None:
        updates["noise_sd"] = args.noise_sd
    if args.density is not None:
        try:
            updates["density"] = json.loads(args.density)
        except json.JSONDecodeError as exc:
            raise ParameterError(f"--density: invalid JSON ({exc})") from None
    base = next((e for e in cfg.estimators if e.name == args.estimator), EstimatorSpec(name=args.estimator))
    params = {k: getattr(args, k) for k in ("eta", "ell0", "j0", "j1", "M") if getattr(args, k) is not None}
    spec = EstimatorSpec.model_validate({**base.model_dump(), **params})
    cfg = ExperimentConfig.model_validate({**cfg.model_dump(), **updates, "estimators": [spec.model_dump()]})
    noise = cfg.effective_noise_sd if cfg.noise_known else float("nan")
    data = Dataset(Y, np.zeros(n), PeriodicSignal(np.zeros(N)), noise)
    result = _estimate_result(spec, data, cfg)
    out = args.out_dir
    io.write_signal(out / "f_hat.csv", result["f_hat"], "f_hat")
    io.write_json(out / "metadata.json", result["metadata"])
    if result.get("wavelet") is not None:
        io.write_wavelet_coeffs(out / "wavelet_coeffs.csv", result["wavelet"])
    if result.get("taus") is not None:
        io.write_shifts(out / "shifts.csv", result["taus"])
    return {"f_hat": str(out / "f_hat.csv")}


def _estimate_result(spec: EstimatorSpec, data: Dataset, cfg: ExperimentConfig) -> dict:
    """Like :func:`run_estimator` but keeping metadata for export."""
    N = data.curves.shape[1]
    base = {"estimator": spec.name, "n": data.curves.shape[0]}
    if spec.name == "direct":
        return {"f_hat": direct_mean(data.curves), "metadata": base}
    if spec.name == "procrustes":
        ref, taus = procrustean_mean(data.curves, ProcrustesConfig(spec.i_max, spec.refine))
        return {"f_hat": ref, "taus": taus, "metadata": {**base, "i_max": spec.i_max, "refine": spec.refine}}
    if spec.name in ("frechet", "cutoff"):
        f_hat = run_estimator(spec, data, cfg)
        return {"f_hat": f_hat, "metadata": {**base, "ell0": spec.ell0, "M": spec.M}}
    coeffs = curves_to_coeffs(data.curves)
    eps = data.eps if cfg.noise_known else None
    policy = ThresholdPolicy(eta=spec.eta, j0=spec.j0, j1=spec.j1)
    basis = WaveletBasisSpec(spec.j0, spec.j1) if spec.j0 is not None and spec.j1 is not None else None
    if spec.name == "known_g":
        res = hard_threshold_estimate(coeffs, cfg.shift_density, eps, policy, basis, N)
        taus = None
    else:
        fn = estimate_fn1 if spec.name == "fn1" else estimate_fn2
        res = fn(coeffs, None, eps, policy, basis, spec.ell0, N)
        taus = res.shifts
    meta = res.metadata()
    return {"f_hat": res.f_hat, "wavelet": res.wavelet, "taus": taus, "metadata": meta}


def _risk_table(report):
    return ([e.label, e.name, e.mean_mise, e.std_error, e.replications, e.failures] for e in report.estimators)


def cmd_risk(args) -> dict:
    cfg = load_config(args.config, args.seed, args.paper_defaults, replications=args.replications)
    start = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = run_risk_study(cfg, resolve_threads(args.threads))
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    elapsed = time.perf_counter() - start
    out = args.out_dir
    io.write_json(out / "risk_report.json", report.model_dump(mode="json"))
    io.write_csv(out / "risk_table.csv",
                 ["label", "estimator", "mean_mise", "std_error", "replications", "failures"],
                 _risk_table(report))
    io.write_json(out / "timing.json", {"wall_clock_seconds": elapsed, "threads": resolve_threads(args.threads)})
    return {e.label: e.mean_mise for e in report.estimators}


def _parse_grid(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ParameterError(f"--n-grid: expected comma-separated integers, got {text!r}") from None


def cmd_rate(args) -> dict:
    cfg = load_config(args.config, args.seed, args.paper_defaults, replications=args.replications)
    est = next((e for e in cfg.estimators if e.name == "known_g"), EstimatorSpec(name="known_g"))
    start = time.perf_counter()
    report = rate_study(cfg, _parse_grid(args.n_grid), args.s, args.nu, est, resolve_threads(args.threads))
    elapsed = time.perf_counter() - start
    out = args.out_dir
    io.write_json(out / "rate_report.json", report.model_dump(mode="json"))
    io.write_csv(out / "rate_table.csv", ["n", "mean_mise"], zip(report.n_grid, report.mean_mise))
    io.write_json(out / "timing.json", {"wall_clock_seconds": elapsed, "threads": resolve_threads(args.threads)})
    return {"slope": report.slope, "theoretical_slope": report.theoretical_slope}


def _compare_one(cfg: ExperimentConfig, signal: str, out: Path) -> list:
    cfg = cfg.model_copy(update={"signal": signal})
    data = simulate(cfg, 0)
    x = data.f.grid
    folder = out / signal
    io.write_csv(folder / "a_mean_pattern.csv", ["x", "f"], zip(x, data.f.samples))
    k = min(SAMPLE_CURVES, data.curves.shape[0])
    io.write_csv(folder / "b_sample.csv", ["x"] + [f"y{m + 1}" for m in range(k)],
                 ([xi, *data.curves[:k, i]] for i, xi in enumerate(x)))
    specs = {e.name: e for e in cfg.estimators}
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for panel, name in PANELS[2:]:
            spec = specs.get(name, EstimatorSpec(name=name, j0=3, j1=7))
            f_hat = run_estimator(spec, data, cfg)
            io.write_csv(folder / f"{panel}.csv", ["x", "f_hat"], zip(x, f_hat.samples))
            rows.append([signal, name, mise(f_hat, data.f)])
    return rows


def cmd_compare(args) -> dict:
    if args.config is None:
        cfg = load_config(None, args.seed, paper_defaults=True)
    else:
        cfg = load_config(args.config, args.seed)
    out = args.out_dir
    results = _parallel_map(lambda s: _compare_one(cfg, s, out), SIGNAL_NAMES, resolve_threads(args.threads))
    rows = [r for block in results for r in block]
    io.write_csv(out / "compare_mise.csv", ["signal", "estimator", "mise"], rows)
    io.write_json(out / "config.json", cfg.model_dump(mode="json"))
    return {f"{s}/{e}": v for s, e, v in rows}


COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "risk": cmd_risk,
    "rate": cmd_rate,
    "compare": cmd_compare,
}


def cli_main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.threads is not None and args.threads < 1:
            raise ParameterError("--threads must be >= 1")
        summary = COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {_validation_message(exc)}", file=sys.stderr)
        return 1
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(summary, indent=2, default=str))
    return 0


def main() -> None:  # console-script entry point
    sys.exit(cli_main())


__all__ = ["cli_main", "main", "build_parser", "load_config", "PANELS", "PAPER_ESTIMATORS"]
