"""Command-line front end: bound evaluation, Monte Carlo sweeps, self-checks.

Exit codes: 0 success, 1 invalid configuration, 2 failed self-check,
3 output I/O failure.  Output is deterministic given (config, seed):
numbers are serialized in scientific notation with 12 significant digits,
and the JSON document carries the same values as the CSV plus the
per-segment bound vector.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass

from .bounds import pe_bound, uniform_theta_grid
from .channel import FadingModel, snr_to_sigma
from .codec import CodeParams, ConfigurationError
from .sim import sweep
from .verify import run_checks

CSV_HEADER = ("model,n,k,c,v,L,N,snr_db,sigma,trials,errors,"
              "fer,fer_stderr,pe_bound")

DEFAULTS = dict(
    model="rayleigh", omega=1.0, m=2.0, K=0.5,
    n=8, k=2, c=8, v=32, L=6,
    snr_start=0.0, snr_stop=30.0, snr_step=2.0,
    trials=100_000, theta_points=20, seed=0,
    out=None, format="csv", workers=1,
    early_stop=None, min_trials=0, quick=False,
)


@dataclass(frozen=True)
class RunConfig:
    model: str
    omega: float
    m: float
    K: float
    n: int
    k: int
    c: int
    v: int
    L: int
    snr_start: float
    snr_stop: float
    snr_step: float
    trials: int
    theta_points: int
    seed: int
    out: str | None
    format: str
    workers: int
    early_stop: int | None
    min_trials: int
    quick: bool

    def code_params(self) -> CodeParams:
        return CodeParams(n=self.n, k=self.k, c=self.c, v=self.v, L=self.L)

    def fading_model(self) -> FadingModel:
        if self.model == "rayleigh":
            return FadingModel.rayleigh(self.omega)
        if self.model == "nakagami":
            return FadingModel.nakagami(self.m, self.omega)
        if self.model == "rician":
            return FadingModel.rician(self.K, self.omega)
        raise ConfigurationError(f"unknown model {self.model!r}")

    def snr_values(self) -> list[float]:
        if self.snr_step <= 0:
            raise ConfigurationError(
                f"snr step must be > 0, got {self.snr_step}")
        values = []
        snr = self.snr_start
        while snr <= self.snr_stop + 1e-9 or not values:
            values.append(snr)
            snr = self.snr_start + self.snr_step * len(values)
        return values


def fmt(x: float) -> str:
    """12-significant-digit scientific notation, shared by CSV and JSON."""
    return f"{float(x):.11e}"


def _merge_config(args: argparse.Namespace) -> RunConfig:
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        with open(args.config) as f:
            file_conf = json.load(f)
        unknown = set(file_conf) - set(DEFAULTS)
        if unknown:
            raise ConfigurationError(
                f"unknown config keys: {', '.join(sorted(unknown))}")
        merged.update(file_conf)
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None and value is not False:
            merged[key] = value
    if merged["trials"] < 1:
        raise ConfigurationError(f"trials must be >= 1, got {merged['trials']}")
    if merged["seed"] < 0:
        raise ConfigurationError(f"seed must be >= 0, got {merged['seed']}")
    if merged["theta_points"] < 1:
        raise ConfigurationError(
            f"theta-points must be >= 1, got {merged['theta_points']}")
    if merged["format"] not in ("csv", "json"):
        raise ConfigurationError(f"unknown format {merged['format']!r}")
    return RunConfig(**merged)


def _row_csv(config: RunConfig, row: dict) -> str:
    sim_cols = (
        [str(row["trials"]), str(row["errors"]), fmt(row["fer"]),
         fmt(row["fer_stderr"])]
        if "trials" in row else ["", "", "", ""]
    )
    cols = [config.model, str(config.n), str(config.k), str(config.c),
            str(config.v), str(config.L), str(config.theta_points),
            fmt(row["snr_db"]), fmt(row["sigma"])] + sim_cols + [fmt(row["pe_bound"])]
    return ",".join(cols)


def _render(config: RunConfig, rows: list[dict]) -> str:
    if config.format == "csv":
        return "\n".join([CSV_HEADER] + [_row_csv(config, r) for r in rows]) + "\n"
    doc_rows = []
    for row in rows:
        out = {"snr_db": float(fmt(row["snr_db"])),
               "sigma": float(fmt(row["sigma"])),
               "pe_bound": float(fmt(row["pe_bound"])),
               "segment_bounds": [float(fmt(e)) for e in row["segment_bounds"]]}
        if "trials" in row:
            out.update(trials=row["trials"], errors=row["errors"],
                       fer=float(fmt(row["fer"])),
                       fer_stderr=float(fmt(row["fer_stderr"])))
        doc_rows.append(out)
    doc = {"config": asdict(config), "rows": doc_rows}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(config: RunConfig, text: str) -> int:
    if config.out is None:
        sys.stdout.write(text)
        return 0
    try:
        with open(config.out, "w", newline="") as f:
            f.write(text)
    except OSError as exc:
        print(f"error: cannot write {config.out}: {exc}", file=sys.stderr)
        return 3
    return 0


def cmd_bound(config: RunConfig) -> int:
    params = config.code_params()
    model = config.fading_model()
    grid = uniform_theta_grid(config.theta_points)
    rows = []
    for snr_db in config.snr_values():
        sigma = snr_to_sigma(snr_db, model, params.c)
        bound = pe_bound(params, model, sigma, grid)
        rows.append(dict(snr_db=snr_db, sigma=sigma, pe_bound=bound.pe,
                         segment_bounds=list(bound.segment_bounds)))
    return _emit(config, _render(config, rows))


def cmd_simulate(config: RunConfig) -> int:
    params = config.code_params()
    model = config.fading_model()
    grid = uniform_theta_grid(config.theta_points)
    results = sweep(params, model, config.snr_values(), config.trials,
                    config.seed, grid, workers=config.workers,
                    early_stop_errors=config.early_stop,
                    min_trials=config.min_trials)
    rows = [dict(snr_db=r.snr_db, sigma=r.sigma, trials=r.fer.trials,
                 errors=r.fer.errors, fer=r.fer.fer, fer_stderr=r.fer.stderr,
                 pe_bound=r.bound.pe,
                 segment_bounds=list(r.bound.segment_bounds))
            for r in results]
    return _emit(config, _render(config, rows))


def cmd_verify(config: RunConfig) -> int:
    results = run_checks(quick=config.quick)
    width = max(len(r.name) for r in results)
    print(f"{'check':<{width}}  {'observed':>14}  {'tolerance':>14}  status")
    failures = 0
    for r in results:
        status = "pass" if r.passed else "FAIL"
        failures += 0 if r.passed else 1
        print(f"{r.name:<{width}}  {r.observed:14.6e}  {r.tolerance:14.6e}  {status}")
    if failures:
        print(f"{failures} check(s) failed", file=sys.stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinalfade",
        description="Spinal-code FER bounds and Monte Carlo sweeps over "
                    "fading channels.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("bound", "evaluate the analytical FER bound over an SNR grid"),
            ("simulate", "Monte Carlo sweep with the bound alongside"),
            ("verify", "run the numerical self-check suite")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--model", choices=["rayleigh", "nakagami", "rician"])
        p.add_argument("--omega", type=float, help="mean-square fading gain")
        p.add_argument("--m", type=float, help="Nakagami shape parameter")
        p.add_argument("--K", type=float, help="Rician K-factor")
        p.add_argument("--n", type=int, help="message length in bits")
        p.add_argument("--k", type=int, help="segment size in bits")
        p.add_argument("--c", type=int, help="bits per channel symbol")
        p.add_argument("--v", type=int, help="spine width in bits")
        p.add_argument("--L", type=int, help="number of passes")
        p.add_argument("--snr-start", dest="snr_start", type=float)
        p.add_argument("--snr-stop", dest="snr_stop", type=float)
        p.add_argument("--snr-step", dest="snr_step", type=float)
        p.add_argument("--trials", type=int, help="Monte Carlo trials per point")
        p.add_argument("--theta-points", dest="theta_points", type=int,
                       help="number of theta grid cells")
        p.add_argument("--seed", type=int, help="run seed (default 0)")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("--workers", type=int, help="parallel workers per point")
        p.add_argument("--early-stop", dest="early_stop", nargs="?", const=100,
                       type=int, help="stop a point after this many errors "
                                      "(default 100 when given)")
        p.add_argument("--min-trials", dest="min_trials", type=int,
                       help="minimum trials before early stop")
        p.add_argument("--quick", action="store_true",
                       help="verify only: reduced trial counts")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _merge_config(args)
        if args.command == "bound":
            return cmd_bound(config)
        if args.command == "simulate":
            return cmd_simulate(config)
        return cmd_verify(config)
    except (ConfigurationError, ValueError, OSError) as exc:
        if isinstance(exc, OSError):
            print(f"error: {exc}", file=sys.stderr)
            return 3
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
