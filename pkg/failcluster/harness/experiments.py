"""
RQ1-RQ4 experiment orchestration.

Every experiment clusters each corpus version with each configured formula,
evaluates the clusters against the oracle and folds the reports per factor
level: formula groups (RQ1), number of faults (RQ2), fault type class (RQ3)
and paired passed-test fraction (RQ4).
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np
import pandas as pd

from failcluster.errors import ConfigurationError, DomainError
from failcluster.evaluation import (METRICS, Category, deviation, evaluate_version, sum_metric,
                                    sum_vote)
from failcluster.faultgen.corpus import FaultTypeClass, generate_corpus, load_corpus
from failcluster.formulas import group_of
from failcluster.harness.reports import write_experiment
from failcluster.pipeline import cluster_failures
from failcluster.srr import Nsp1fPolicy

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CategoryCounts:
    v_under: int = 0
    v_equal: int = 0
    v_over: int = 0

    @classmethod
    def from_reports(cls, reports):
        categories = [rep.category for rep in reports]
        return cls(categories.count(Category.UNDER), categories.count(Category.EQUAL),
                   categories.count(Category.OVER))

    @property
    def total(self):
        return self.v_under + self.v_equal + self.v_over


@dataclass
class ExperimentResult:
    name: str
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    def warn(self, message):
        logger.warning(message)
        self.warnings.append(message)


def opacity(v_equal_counts):
    """Each level's Equal count relative to the largest one."""
    counts = np.asarray(list(v_equal_counts), dtype=float)
    if counts.size == 0:
        raise DomainError("opacity needs at least one level")
    peak = counts.max()
    if peak == 0:
        logger.warning("No level has an Equal version; all opacities are 0")
        return [0.0] * counts.size
    return [float(c / peak) for c in counts]


def box_summary(values):
    """Quartiles (linear interpolation), median and mean of a value list."""
    series = pd.Series(list(values), dtype=float)
    if series.empty:
        return {"count": 0, "lower_quartile": np.nan, "median": np.nan,
                "upper_quartile": np.nan, "mean": np.nan}
    return {
        "count": int(series.size),
        "lower_quartile": float(series.quantile(0.25, interpolation="linear")),
        "median": float(series.quantile(0.5, interpolation="linear")),
        "upper_quartile": float(series.quantile(0.75, interpolation="linear")),
        "mean": float(series.mean()),
    }


def load_versions(cfg):
    if cfg.corpus_dir:
        return load_corpus(cfg.corpus_dir)
    return generate_corpus(cfg)


def _evaluate_one(version, ref, policy, cfg):
    result = cluster_failures(version.coverage, ref, policy, cfg.mountain)
    return evaluate_version(result.clustering, version.oracle, version.version_id, ref,
                            cfg.averaging)


def evaluate_corpus(versions, ref, fraction, cfg):
    """One EvalReport per usable version, in corpus order."""
    usable = [v for v in versions if v.oracle.usable]
    for version in versions:
        if not version.oracle.usable:
            logger.warning("Skipping %s: oracle has no labelled failed test", version.version_id)

    policy = Nsp1fPolicy(fraction=fraction, seed=cfg.seed)
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(lambda v: _evaluate_one(v, ref, policy, cfg), usable))
    return [_evaluate_one(v, ref, policy, cfg) for v in usable]


def _level_row(ref, level, reports):
    counts = CategoryCounts.from_reports(reports)
    dev_over, dev_under, dev_mean = deviation([(rep.k, rep.r) for rep in reports])
    row = {"ref": ref.value, "group": group_of(ref).name, "level": level,
           "v_under": counts.v_under, "v_equal": counts.v_equal, "v_over": counts.v_over}
    for metric in METRICS:
        row[f"sum_{metric}"] = sum_metric(reports, metric)
    row.update({"dev_over": dev_over, "dev_under": dev_under, "dev_mean": dev_mean,
                "sum_vote": sum_vote(reports)})
    return row


def _report_rows(ref, level, reports, with_level):
    rows = []
    for rep in reports:
        row = {"ref": ref.value}
        if with_level:
            row["level"] = level
        row.update(rep.as_row())
        rows.append(row)
    return rows


def _box_rows(ref, level, reports):
    equal = [rep for rep in reports if rep.category is Category.EQUAL]
    rows = []
    for metric in METRICS:
        row = {"ref": ref.value, "level": level, "metric": metric}
        row.update(box_summary(rep.metrics[metric] for rep in equal))
        rows.append(row)
    return rows


def _with_opacity(level_rows):
    frame = pd.DataFrame(level_rows)
    if frame.empty:
        return frame
    frame.insert(frame.columns.get_loc("v_over") + 1, "opacity", 0.0)
    for ref in frame["ref"].unique():
        mask = frame["ref"] == ref
        frame.loc[mask, "opacity"] = opacity(frame.loc[mask, "v_equal"])
    return frame


def _dominance(level_frame, metric):
    refs = list(level_frame["ref"])
    sums = level_frame[f"sum_{metric}"].to_numpy()
    table = (sums[:, None] > sums[None, :]).astype(int)
    frame = pd.DataFrame(table, columns=refs)
    frame.insert(0, "ref", refs)
    return frame


def run_rq1(cfg, versions=None):
    """Contrast the formula groups on one corpus at the first paired fraction."""
    versions = load_versions(cfg) if versions is None else versions
    result = ExperimentResult("rq1")
    if not versions:
        result.warn("Corpus is empty; RQ1 tables are empty")

    fraction = cfg.nsp1f[0]
    report_rows, level_rows = [], []
    for ref in cfg.refs:
        reports = evaluate_corpus(versions, ref, fraction, cfg)
        report_rows += _report_rows(ref, "all", reports, with_level=False)
        level_rows.append(_level_row(ref, "all", reports))

    levels = pd.DataFrame(level_rows)
    if not levels.empty:
        levels.insert(levels.columns.get_loc("v_over") + 1, "opacity",
                      opacity(levels["v_equal"]))
    result.tables["reports"] = pd.DataFrame(report_rows)
    result.tables["levels"] = levels
    if not levels.empty:
        for metric in METRICS:
            result.tables[f"dominance_{metric}"] = _dominance(levels, metric)
    return result


def _run_factor(name, cfg, versions, level_of, level_order, fractions):
    result = ExperimentResult(name)
    if not versions:
        result.warn(f"Corpus is empty; {name.upper()} tables are empty")

    present = []
    for level in level_order:
        if fractions is not None or any(level_of(v) == level for v in versions):
            present.append(level)
        else:
            result.warn(f"Level {level} is absent from the corpus")

    report_rows, level_rows, box_rows = [], [], []
    for ref in cfg.refs:
        for level in present:
            if fractions is not None:
                subset, fraction = versions, level
            else:
                subset, fraction = [v for v in versions if level_of(v) == level], cfg.nsp1f[0]
            reports = evaluate_corpus(subset, ref, fraction, cfg)
            report_rows += _report_rows(ref, level, reports, with_level=True)
            level_rows.append(_level_row(ref, level, reports))
            box_rows += _box_rows(ref, level, reports)

    result.tables["reports"] = pd.DataFrame(report_rows)
    result.tables["levels"] = _with_opacity(level_rows)
    result.tables["boxplot"] = pd.DataFrame(box_rows)
    return result


def run_rq2(cfg, versions=None):
    """Effect of the number of faults per version."""
    versions = load_versions(cfg) if versions is None else versions
    for version in versions:
        if version.nof is None:
            raise ConfigurationError("nof", f"version {version.version_id} has no fault count")
    order = sorted({v.nof for v in versions})
    return _run_factor("rq2", cfg, versions, lambda v: v.nof, order, None)


def run_rq3(cfg, versions=None):
    """Effect of the fault type class (TypeA, TypeP, TypeH)."""
    versions = load_versions(cfg) if versions is None else versions
    for version in versions:
        if version.fault_type is None:
            raise ConfigurationError("fault_types",
                                     f"version {version.version_id} has no fault type class")
    order = [t.value for t in FaultTypeClass]
    return _run_factor("rq3", cfg, versions, lambda v: v.fault_type.value, order, None)


def run_rq4(cfg, versions=None):
    """Effect of the fraction of passed tests paired with each failed test."""
    versions = load_versions(cfg) if versions is None else versions
    return _run_factor("rq4", cfg, versions, None, list(cfg.nsp1f), list(cfg.nsp1f))


EXPERIMENTS = {"rq1": run_rq1, "rq2": run_rq2, "rq3": run_rq3, "rq4": run_rq4}


def run_experiment(name, cfg, versions=None):
    result = EXPERIMENTS[name](cfg, versions)
    os.makedirs(cfg.out_dir, exist_ok=True)
    write_experiment(result, cfg)
    return result
