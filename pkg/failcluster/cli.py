"""
Command line front end.

Per-file subcommands (suspiciousness, represent, distance, estimate, cluster,
evaluate) read one coverage file; generate writes a corpus; rq1-rq4 run the
experiments described by a config file.
"""

import argparse
import logging
import os
import sys

import pandas as pd
from dotenv import dotenv_values
from pydantic import ValidationError

from failcluster import __version__
from failcluster.cluster import MountainParams, estimate_clusters
from failcluster.distance import distance_matrix, write_distance_csv
from failcluster.errors import ConfigurationError, FailclusterError
from failcluster.evaluation import evaluate_version, load_oracle
from failcluster.faultgen.corpus import generate_corpus, write_corpus
from failcluster.formulas import rank, resolve_refs, suspiciousness
from failcluster.harness.config import load_config
from failcluster.harness.experiments import EXPERIMENTS, run_experiment
from failcluster.harness.reports import write_table
from failcluster.pipeline import cluster_failures
from failcluster.spectrum import SuiteSelection, compute_spectrum, load_coverage
from failcluster.srr import Nsp1fPolicy, represent_all

logger = logging.getLogger(__name__)

LOG_FORMAT = '[%(asctime)s] %(levelname)s - %(message)s'
LOG_DATEFMT = '%Y-%m-%d %H:%M:%S'


def setup_logging(verbose=False):
    level = "DEBUG" if verbose else os.getenv("FAILCLUSTER_LOG_LEVEL", "INFO").upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT,
                        datefmt=LOG_DATEFMT)


def _fractions(text):
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigurationError("nsp1f", f"not a number list: {text!r}") from exc
    return [v / 100.0 if v > 1.0 else v for v in values]


def load_mountain_params(path):
    if path is None:
        return MountainParams()
    if not os.path.exists(path):
        raise ConfigurationError("params", f"file {path} not found")
    values = {k.strip().lower(): v for k, v in dotenv_values(path).items() if v is not None}
    try:
        return MountainParams(**values)
    except ValidationError as exc:
        error = exc.errors()[0]
        raise ConfigurationError(".".join(str(p) for p in error["loc"]) or "params",
                                 error["msg"]) from exc


def _policy(args):
    fraction = _fractions(args.nsp1f)[0] if args.nsp1f else 1.0
    try:
        return Nsp1fPolicy(fraction=fraction, seed=args.seed or 0)
    except ValidationError as exc:
        raise ConfigurationError("nsp1f", exc.errors()[0]["msg"]) from exc


def _emit(frame, out):
    if out:
        write_table(frame, out)
        logger.info("Wrote %s", out)
    else:
        frame.to_csv(sys.stdout, index=False, float_format="%.6f", lineterminator="\n")


def cmd_suspiciousness(args):
    cov = load_coverage(args.coverage)
    spectrum = compute_spectrum(cov, SuiteSelection.full(cov))
    frame = pd.DataFrame({"statement": [f"s{j + 1}" for j in range(cov.num_statements)]})
    for ref in resolve_refs(args.ref):
        scores = suspiciousness(ref, spectrum)
        frame[ref.value] = scores
        frame[f"{ref.value}_rank"] = rank(scores).positions
    _emit(frame, args.out)


def cmd_represent(args):
    cov = load_coverage(args.coverage)
    ref = resolve_refs(args.ref)[0]
    rows = []
    for proxy in represent_all(cov, _policy(args), ref):
        rows.append({
            "failed_test_id": proxy.failed_test_id,
            "ref": ref.value,
            "sampled_passed_ids": " ".join(str(t) for t in proxy.sampled_passed_ids),
            "ranking": " ".join(str(p) for p in proxy.ranking.positions),
        })
    _emit(pd.DataFrame(rows), args.out)


def cmd_distance(args):
    cov = load_coverage(args.coverage)
    distances = distance_matrix(represent_all(cov, _policy(args), resolve_refs(args.ref)[0]))
    if args.out:
        write_distance_csv(distances, args.out)
    else:
        distances.to_frame().to_csv(sys.stdout, float_format="%.6f", lineterminator="\n")


def cmd_estimate(args):
    cov = load_coverage(args.coverage)
    distances = distance_matrix(represent_all(cov, _policy(args), resolve_refs(args.ref)[0]))
    estimate = estimate_clusters(distances, load_mountain_params(args.params))
    failed = distances.failed_ids
    rows = [{"step": step, "failed_test_id": failed[row], "potential": value}
            for step, (row, value) in enumerate(estimate.potential_trace, start=1)]
    print(f"[estimate] k={estimate.k}", file=sys.stderr)
    _emit(pd.DataFrame(rows), args.out)


def cmd_cluster(args):
    cov = load_coverage(args.coverage)
    result = cluster_failures(cov, resolve_refs(args.ref)[0], _policy(args),
                              load_mountain_params(args.params))
    clustering = result.clustering
    medoid_ids = {clustering.failed_ids[m] for m in clustering.medoids}
    frame = pd.DataFrame({
        "failed_test_id": clustering.failed_ids,
        "cluster_id": clustering.assignment,
        "is_medoid": [int(t in medoid_ids) for t in clustering.failed_ids],
    })
    _emit(frame, args.out)


def cmd_evaluate(args):
    if not args.oracle:
        raise ConfigurationError("oracle", "evaluate needs --oracle")
    cov = load_coverage(args.coverage)
    oracle = load_oracle(args.oracle)
    ref = resolve_refs(args.ref)[0]
    result = cluster_failures(cov, ref, _policy(args), load_mountain_params(args.params))
    report = evaluate_version(result.clustering, oracle,
                              version_id=os.path.basename(args.coverage), ref=ref)
    _emit(pd.DataFrame([report.as_row()]), args.out)


def _experiment_config(args):
    overrides = {
        "seed": args.seed,
        "out_dir": args.out,
        "refs": args.ref,
        "nsp1f": args.nsp1f,
    }
    return load_config(args.config, overrides)


def cmd_generate(args):
    cfg = _experiment_config(args)
    versions = generate_corpus(cfg)
    target = args.out or cfg.corpus_dir or os.path.join(cfg.out_dir, "corpus")
    write_corpus(versions, target)
    print(f"[generate] {len(versions)} versions written to {target}")


def cmd_experiment(args):
    cfg = _experiment_config(args)
    result = run_experiment(args.command, cfg)
    print(f"[{args.command}] wrote {len(result.tables)} tables to {cfg.out_dir}")
    for warning in result.warnings:
        print(f"[{args.command}] WARNING: {warning}")


def build_parser():
    parser = argparse.ArgumentParser(prog="failcluster",
                                     description="SRR-based failure clustering for parallel debugging")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Flat key=value experiment config file")
    common.add_argument("--seed", type=int, help="Root seed (0 <= seed < 2^64)")
    common.add_argument("--ref", help="Formula name, GroupN or all-groups")
    common.add_argument("--nsp1f", help="Paired passed-test fractions, percent or (0,1], comma separated")
    common.add_argument("--out", help="Output file (per-file commands) or directory")
    common.add_argument("--verbose", action="store_true", help="Debug logging")

    per_file = argparse.ArgumentParser(add_help=False)
    per_file.add_argument("--coverage", required=True, help="Coverage file")
    per_file.add_argument("--params", help="Mountain method parameter file")

    sub = parser.add_subparsers(dest="command", required=True)
    handlers = {
        "suspiciousness": cmd_suspiciousness,
        "represent": cmd_represent,
        "distance": cmd_distance,
        "estimate": cmd_estimate,
        "cluster": cmd_cluster,
    }
    for name, handler in handlers.items():
        cmd = sub.add_parser(name, parents=[common, per_file])
        cmd.set_defaults(handler=handler)
    evaluate = sub.add_parser("evaluate", parents=[common, per_file])
    evaluate.add_argument("--oracle", help="Oracle file of '<test_id> <fault_id>' lines")
    evaluate.set_defaults(handler=cmd_evaluate)

    sub.add_parser("generate", parents=[common]).set_defaults(handler=cmd_generate)
    for name in EXPERIMENTS:
        sub.add_parser(name, parents=[common]).set_defaults(handler=cmd_experiment)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)
    if args.ref is None and args.command not in EXPERIMENTS and args.command != "generate":
        args.ref = "GP19"
    try:
        args.handler(args)
    except FailclusterError as exc:
        logger.error("%s failed: %s", args.command, exc)
        return 1
    return 0
