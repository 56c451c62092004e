"""Command-line surface: fit on CSV data, evaluate functionals, run studies.

Reports are pure functions of the input bytes and the configuration: no
timestamps or other nondeterministic fields appear in report bodies, so
repeated runs are byte-identical.  Every error path exits nonzero with a
single ``error:<code>: message`` line on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .errors import DataError, DomainError, IdentifiabilityError, QuantfuncError
from .model import (Dataset, StepQuantileProcess, design_diagnostics,
                    empirical_quantile_process)
from .ranks import fit_r_estimator
from .two_step import averaged_two_step_process, centered_process, two_step_quantile
from . import functionals as fn
from . import simulation as sim

FUNCTIONALS = {
    "cvar": fn.cvar,
    "mean_excess": fn.mean_excess,
    "lorenz": fn.lorenz,
    "gastwirth_j": fn.gastwirth_j,
    "staudte_r": fn.staudte_r,
}


class CliError(QuantfuncError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def read_csv_dataset(path: str, response: str, covariates: list[str]) -> Dataset:
    """Strict CSV ingestion: header row, comma separator, '.' decimals, UTF-8.

    Missing or non-numeric cells abort with the offending row number.
    """
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise CliError("input", f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CliError("input", f"{path}: empty file, header row required")
        header = [h.strip() for h in header]
        for col in [response, *covariates]:
            if col not in header:
                raise CliError("input", f"{path}: column {col!r} not in header {header}")
        y_idx = header.index(response)
        x_idx = [header.index(c) for c in covariates]
        y_rows, x_rows = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                y_rows.append(float(row[y_idx]))
                x_rows.append([float(row[j]) for j in x_idx])
            except (ValueError, IndexError) as exc:
                raise CliError("input", f"{path}: row {lineno}: bad numeric cell ({exc})") from exc
        if not y_rows:
            raise CliError("input", f"{path}: no data rows")
    y = np.asarray(y_rows)
    x = np.asarray(x_rows).reshape(len(y_rows), len(covariates))
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(x))):
        bad = int(np.argmax(~np.isfinite(y))) + 2 if not np.all(np.isfinite(y)) else \
            int(np.argmax(~np.all(np.isfinite(x), axis=1))) + 2
        raise CliError("input", f"{path}: row {bad}: non-finite value")
    try:
        return Dataset(y=y, x=x)
    except DataError as exc:
        raise CliError("data", str(exc)) from exc


def _dump(payload, path: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run_fit(args) -> None:
    ds = read_csv_dataset(args.input, args.response, args.covariates)
    lam = args.lam
    if ds.p > 0:
        est = fit_r_estimator(ds, lam)
        slopes = est.beta_tilde
        dispersion = est.dispersion
    else:
        slopes = np.zeros(0)
        dispersion = None
    proc = averaged_two_step_process(ds, lam, slopes=slopes)
    diag = design_diagnostics(ds)
    intercepts = {
        repr(a): two_step_quantile(ds, a, lam, slopes=slopes).intercept
        for a in args.alphas
    }
    if args.format == "csv":
        if not args.output:
            raise CliError("config", "csv format requires --output")
        StepQuantileProcess(values=proc.sorted_adjusted).to_csv(args.output)
        return
    report = {
        "lambda": lam,
        "n": ds.n,
        "p": ds.p,
        "slopes": [float(s) for s in slopes],
        "dispersion": dispersion,
        "two_step_intercepts": intercepts,
        "nuisance_estimate": proc.nuisance_estimate,
        "averaged_process": [float(v) for v in proc.sorted_adjusted],
        "design_diagnostics": {
            "max_centered_norm": diag.max_centered_norm,
            "max_leverage": diag.max_leverage,
            "v_n_over_n_spectral_norm": diag.v_n_over_n_spectral_norm,
            "x1_suspect": diag.x1_suspect,
        },
    }
    _dump(report, args.output)


def run_functional(args) -> None:
    if args.functional not in FUNCTIONALS:
        raise CliError("config", f"unknown functional {args.functional!r}; "
                                 f"choose from {sorted(FUNCTIONALS)}")
    if args.level is None:
        raise CliError("config", "--level is required for a functional run")
    ds = read_csv_dataset(args.input, args.response, args.covariates)
    if ds.p == 0:
        proc = empirical_quantile_process(ds.y)
        source = "empirical"
    else:
        proc = centered_process(averaged_two_step_process(ds, args.lam))
        source = "centered_two_step"
    est = FUNCTIONALS[args.functional](proc, args.level)
    payload = {
        "kind": est.kind,
        "level": est.level,
        "value": est.value,
        "n": est.n,
        "lambda": args.lam,
        "process_source": source,
    }
    if args.format == "csv":
        if not args.output:
            raise CliError("config", "csv format requires --output")
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("kind,level,value,n,lambda,process_source\n")
            fh.write(f"{est.kind},{est.level!r},{est.value!r},{est.n},"
                     f"{args.lam!r},{source}\n")
        return
    _dump(payload, args.output)


def _load_sim_config(args) -> tuple[sim.SimulationConfig, dict]:
    if not args.config:
        raise CliError("config", "simulate requires --config with a JSON config file")
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError("config", f"cannot parse config {args.config}: {exc}") from exc
    problems = []
    def take(key, default=None, required=False):
        if key not in raw:
            if required:
                problems.append(f"missing key {key!r}")
            return default
        return raw[key]
    n_grid = take("n_grid", required=True)
    p = take("p", required=True)
    beta0 = take("beta0", 0.0)
    beta = take("beta", [])
    error_dist = take("error_dist", "standard_normal")
    error_param = take("error_param", 1.0)
    design = take("design", "iid_uniform_cube")
    lam = take("lambda", 0.5)
    alphas = take("alphas", None)
    replications = take("replications", 100)
    seed = args.seed if args.seed is not None else take("seed", 0)
    study = take("study", "two_step_rate")
    if study not in ("two_step_rate", "r_estimator_rate", "functional_consistency"):
        problems.append(f"unknown study {study!r}")
    if study == "functional_consistency":
        if take("functional") is None:
            problems.append("functional_consistency needs key 'functional'")
        if take("level") is None:
            problems.append("functional_consistency needs key 'level'")
    if problems:
        raise CliError("config", "; ".join(problems))
    try:
        kwargs = dict(
            n_grid=tuple(int(n) for n in n_grid),
            p=int(p),
            beta0=float(beta0),
            beta=tuple(float(b) for b in beta),
            error_dist=sim.ErrorDistribution(kind=error_dist, param=float(error_param)),
            design=design,
            lam=float(lam),
            replications=int(replications),
            seed=int(seed),
        )
        if alphas is not None:
            kwargs["alphas"] = tuple(float(a) for a in alphas)
        config = sim.SimulationConfig(**kwargs)
    except (DomainError, TypeError, ValueError) as exc:
        raise CliError("config", str(exc)) from exc
    return config, raw


def run_simulate(args) -> None:
    config, raw = _load_sim_config(args)
    study = raw.get("study", "two_step_rate")
    if study == "two_step_rate":
        reports = sim.rate_study_two_step(config)
    elif study == "r_estimator_rate":
        reports = [sim.rate_study_r_estimator(config)]
    else:
        reports = [sim.functional_consistency_study(config, raw["functional"],
                                                    float(raw["level"]))]
    if args.format == "csv":
        if not args.output:
            raise CliError("config", "csv format requires --output")
        sim.reports_to_csv(reports, args.output)
        return
    payload = [json.loads(r.to_json()) for r in reports]
    _dump(payload, args.output)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quantfunc",
        description="Quantile functionals of regression errors via averaged "
                    "two-step regression quantiles.",
    )
    parser.add_argument("--command", required=True, choices=("fit", "functional", "simulate"))
    parser.add_argument("--input", help="input CSV path (fit, functional)")
    parser.add_argument("--response", help="response column name")
    parser.add_argument("--covariates", default="",
                        help="comma-separated covariate column names (may be empty)")
    parser.add_argument("--alpha", default="0.5",
                        help="comma-separated quantile levels in (0,1)")
    parser.add_argument("--lambda", dest="lam", type=float, default=0.5,
                        help="level for the rank-based slope estimate")
    parser.add_argument("--functional", help="cvar|mean_excess|lorenz|gastwirth_j|staudte_r")
    parser.add_argument("--level", type=float, help="functional level/threshold")
    parser.add_argument("--output", help="report destination (stdout when omitted)")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--seed", type=int, help="override for the simulation seed")
    parser.add_argument("--config", help="JSON config file (simulate)")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.covariates = [c for c in args.covariates.split(",") if c.strip()]
        try:
            args.alphas = [float(a) for a in args.alpha.split(",") if a.strip()]
        except ValueError as exc:
            raise CliError("config", f"bad --alpha list: {exc}") from exc
        if not 0.0 < args.lam < 1.0:
            raise CliError("config", f"--lambda must be in (0, 1), got {args.lam}")
        if args.command in ("fit", "functional"):
            if not args.input or not args.response:
                raise CliError("config", f"{args.command} requires --input and --response")
        if args.command == "fit":
            run_fit(args)
        elif args.command == "functional":
            run_functional(args)
        else:
            run_simulate(args)
    except CliError as exc:
        print(f"error:{exc.code}: {exc}", file=sys.stderr)
        return 2
    except (DomainError, DataError) as exc:
        print(f"error:domain: {exc}", file=sys.stderr)
        return 2
    except IdentifiabilityError as exc:
        print(f"error:identifiability: {exc}", file=sys.stderr)
        return 2
    except QuantfuncError as exc:
        print(f"error:solver: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
