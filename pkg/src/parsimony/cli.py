"""Command-line interface.

    parsimony fit       --input data.csv --models models.yaml [--model LABEL]
    parsimony rank      --input data.csv --models models.yaml [--sigma S] [--k 6]
    parsimony posterior --input data.csv --models models.yaml --model LABEL --points pts.csv
    parsimony validate  [--seed N]

Exit status: 0 success, 1 validation or math error, 2 I/O or parse error.
"""
import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dataio import read_dataset, read_models, read_points
from .design import build_design_matrix
from .errornorm import APPROXIMATE, EXACT, NoiseModel
from .errors import InputError, ParsimonyError, SpecError
from .ols import fit
from .oracles import OracleConfig, run_suite
from .posterior import marginal_posterior_logdensity, posterior_known_sigma, student_t_posterior
from .prior import PriorSpec
from .report import input_digest, rank_models

SEED_ENV = "PARSIMONY_SEED"


def _add_io(p, models=True):
    p.add_argument("--input", required=True, help="CSV dataset with a header row")
    if models:
        p.add_argument("--models", required=True, help="YAML model specification file")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", default="-", help="output path (default: stdout)")


def _add_prior(p):
    p.add_argument("--k", type=float, default=6.0, help="sigma multiplier of the ||e|| bound")
    p.add_argument("--sigma", type=float, default=None,
                   help="known noise spread; omit to marginalize sigma (Jeffreys prior)")
    p.add_argument("--bound-mode", choices=(EXACT, APPROXIMATE), default=None,
                   help="exact or large-N ||e|| bound (default: exact for known sigma; "
                        "unknown sigma always uses approximate)")
    p.add_argument("--jeffreys-a", type=float, default=1.0, help="Jeffreys prior constant A")


def build_parser():
    parser = argparse.ArgumentParser(prog="parsimony", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="least-squares fit of one model")
    _add_io(p)
    p.add_argument("--model", help="label of the model to fit (default: the only model)")

    p = sub.add_parser("rank", help="evidence and posterior probability of every model")
    _add_io(p)
    _add_prior(p)
    p.add_argument("--jobs", type=int, default=None, help="worker threads for model evaluation")

    p = sub.add_parser("posterior", help="coefficient posterior density at given points")
    _add_io(p)
    _add_prior(p)
    p.add_argument("--model", required=True, help="model label")
    p.add_argument("--points", required=True, help="CSV of coefficient vectors, one per row")

    p = sub.add_parser("validate", help="run the numerical oracle suite")
    p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default: ${SEED_ENV} or 0)")
    p.add_argument("--mc-samples", type=int, default=10 ** 6)
    p.add_argument("--mc-se-multiple", type=float, default=4.0,
                   help="Monte Carlo pass band in standard errors")
    p.add_argument("--output", default="-")
    return parser


def _prior_spec(args):
    mode = args.bound_mode
    if args.sigma is None:
        if mode == EXACT:
            raise SpecError("unknown-sigma evidence only supports the approximate bound")
        mode = APPROXIMATE
    return PriorSpec(k=args.k, bound_mode=mode or EXACT, sigma=args.sigma, jeffreys_a=args.jeffreys_a)


def _emit(text, output):
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        try:
            Path(output).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot write {output}: {exc.strerror or exc}") from None


def _select(specs, label):
    if label is None:
        if len(specs) != 1:
            raise SpecError(f"{len(specs)} models in spec file; choose one with --model")
        return specs[0]
    for s in specs:
        if s.label == label:
            return s
    raise SpecError(f"no model labelled {label!r}")


def _table(fieldnames, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fieldnames)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def cmd_fit(args):
    data = read_dataset(args.input)
    spec = _select(read_models(args.models), args.model)
    X = build_design_matrix(data, spec)
    f = fit(X, data[spec.response])
    if args.format == "json":
        out = {"label": spec.label, "columns": list(X.names),
               "beta_hat": [float(b) for b in f.beta_hat],
               "residual_norm": f.residual_norm, "n": f.n, "m": f.m}
        text = json.dumps(out, indent=2) + "\n"
    else:
        text = _table(["column", "beta_hat"], zip(X.names, map(float, f.beta_hat)))
    _emit(text, args.output)
    return 0


def cmd_rank(args):
    data_bytes = _bytes(args.input)
    model_bytes = _bytes(args.models)
    data = read_dataset(args.input)
    specs = read_models(args.models)
    prior = _prior_spec(args)
    meta = {"tool_version": __version__, "input_digest": input_digest(data_bytes, model_bytes)}
    report = rank_models(data, specs, prior, workers=args.jobs, metadata=meta)
    _emit(report.render(args.format), args.output)
    return 0


def cmd_posterior(args):
    data = read_dataset(args.input)
    spec = _select(read_models(args.models), args.model)
    prior = _prior_spec(args)
    X = build_design_matrix(data, spec)
    f = fit(X, data[spec.response])
    points = read_points(args.points, X.m)
    if prior.sigma is not None:
        post = posterior_known_sigma(f, X, NoiseModel(prior.sigma, f.n))
        logd = post.logpdf(points) if len(points) else np.empty(0)
        mode = "normal"
    else:
        post = student_t_posterior(f, X)
        logd = marginal_posterior_logdensity(points, post) if len(points) else np.empty(0)
        mode = "student_t"
    logd = np.atleast_1d(logd)
    if args.format == "json":
        out = {"label": spec.label, "mode": mode, "columns": list(X.names),
               "points": [{"beta": [float(v) for v in p], "log_density": float(ld),
                           "density": float(np.exp(ld))} for p, ld in zip(points, logd)]}
        text = json.dumps(out, indent=2) + "\n"
    else:
        rows = ([*map(float, p), float(ld), float(np.exp(ld))] for p, ld in zip(points, logd))
        text = _table([*X.names, "log_density", "density"], rows)
    _emit(text, args.output)
    return 0


def cmd_validate(args):
    seed = args.seed
    if seed is None:
        env = os.environ.get(SEED_ENV)
        try:
            seed = int(env) if env else 0
        except ValueError:
            raise SpecError(f"${SEED_ENV} must be an integer, got {env!r}") from None
    cfg = OracleConfig(rng_seed=seed, mc_samples=args.mc_samples, mc_se_multiple=args.mc_se_multiple)
    outcomes = run_suite(cfg)
    _emit(json.dumps([o.to_dict() for o in outcomes], indent=2) + "\n", args.output)
    failed = [o.check_name for o in outcomes if not o.passed]
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def _bytes(path):
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


COMMANDS = {"fit": cmd_fit, "rank": cmd_rank, "posterior": cmd_posterior, "validate": cmd_validate}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"parsimony: error: {exc}", file=sys.stderr)
        return 2
    except (ParsimonyError, ValueError) as exc:
        print(f"parsimony: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
