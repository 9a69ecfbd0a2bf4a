"""
External evaluation of generated clusters against oracle fault labels.

Pair-based metrics (JC, FMI) compare every pair of failed tests and ignore
cluster labels. Single-case metrics (PR, RR) need to know which generated
cluster stands for which fault; since that correspondence is unknown, every
bijection is tried and the best one kept (virtual mapping).
"""

import itertools
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from failcluster.errors import DomainError
from failcluster.spectrum import text_lines

logger = logging.getLogger(__name__)

METRICS = ("JC", "FMI", "PR", "RR")
AVERAGING_MODES = ("micro", "macro")


class Category(str, Enum):
    UNDER = "Under"
    EQUAL = "Equal"
    OVER = "Over"

    @classmethod
    def of(cls, k, r):
        if k < r:
            return cls.UNDER
        if k > r:
            return cls.OVER
        return cls.EQUAL


@dataclass(frozen=True)
class OracleLabels:
    """Root-cause fault of every labeled failed test, fault ids dense in [0, r)."""
    failed_ids: Tuple[int, ...]
    faults: Tuple[int, ...]
    r: int
    dropped_multi_cause: int = 0
    dropped_interaction: int = 0
    reduced_from: Optional[int] = None

    def __post_init__(self):
        if len(self.failed_ids) != len(self.faults):
            raise DomainError("one fault id per failed test is required")
        if len(set(self.failed_ids)) != len(self.failed_ids):
            raise DomainError("a failed test carries more than one fault label")
        if set(self.faults) != set(range(self.r)):
            raise DomainError(f"fault ids must cover exactly 0..{self.r - 1}")

    @classmethod
    def build(cls, labels, dropped_multi_cause=0, dropped_interaction=0):
        """Build from {test_id: fault_id}, renumbering faults that have no failed test away."""
        items = sorted(labels.items())
        present = sorted({fault for _, fault in items})
        dense = {fault: i for i, fault in enumerate(present)}
        declared = present[-1] + 1 if present else 0
        reduced_from = None
        if declared != len(present):
            logger.warning("Oracle faults %s have no failed test; r reduced from %d to %d",
                           sorted(set(range(declared)) - set(present)), declared, len(present))
            reduced_from = declared
        return cls(
            failed_ids=tuple(t for t, _ in items),
            faults=tuple(dense[f] for _, f in items),
            r=len(present),
            dropped_multi_cause=dropped_multi_cause,
            dropped_interaction=dropped_interaction,
            reduced_from=reduced_from,
        )

    @property
    def usable(self):
        return len(self.failed_ids) > 0

    def members(self, fault_id):
        return tuple(t for t, f in zip(self.failed_ids, self.faults) if f == fault_id)


@dataclass(frozen=True)
class PairCounts:
    x_ss: int
    x_sd: int
    x_ds: int
    x_dd: int


@dataclass(frozen=True)
class CaseCounts:
    x_tp: int
    x_fp: int
    x_tn: int
    x_fn: int

    def __add__(self, other):
        return CaseCounts(self.x_tp + other.x_tp, self.x_fp + other.x_fp,
                          self.x_tn + other.x_tn, self.x_fn + other.x_fn)


@dataclass(frozen=True)
class EvalReport:
    category: Category
    k: int
    r: int
    metrics: Dict[str, float] = field(default_factory=dict)
    permutations: Dict[str, Tuple[int, ...]] = field(default_factory=dict)
    votes: Optional[int] = None
    version_id: Optional[str] = None
    ref: Optional[str] = None

    def as_row(self):
        row = {
            "version_id": self.version_id,
            "category": self.category.value,
            "k": self.k,
            "r": self.r,
        }
        for name in METRICS:
            row[name] = self.metrics.get(name, np.nan)
        row["votes"] = self.votes
        return row


def _ratio(num, den):
    # 0/0 only happens when a class is empty on both sides
    return 1.0 if den == 0 else num / den


def _aligned_labels(gen, oracle):
    if set(gen.failed_ids) != set(oracle.failed_ids) or len(gen.failed_ids) != len(oracle.failed_ids):
        raise DomainError("generated clusters and oracle cover different failed tests")
    generated = dict(zip(gen.failed_ids, gen.assignment))
    g = np.array([generated[t] for t in oracle.failed_ids], dtype=np.int64)
    o = np.array(oracle.faults, dtype=np.int64)
    return g, o


def pair_counts(gen, oracle):
    g, o = _aligned_labels(gen, oracle)
    upper = np.triu(np.ones((len(g), len(g)), dtype=bool), k=1)
    same_gen = (g[:, None] == g[None, :]) & upper
    same_oracle = (o[:, None] == o[None, :]) & upper
    return PairCounts(
        x_ss=int((same_gen & same_oracle).sum()),
        x_sd=int((same_gen & ~same_oracle).sum()),
        x_ds=int((~same_gen & same_oracle & upper).sum()),
        x_dd=int((~same_gen & ~same_oracle & upper).sum()),
    )


def jc(c):
    return _ratio(c.x_ss, c.x_ss + c.x_sd + c.x_ds)


def fmi(c):
    return float(np.sqrt(_ratio(c.x_ss, c.x_ss + c.x_sd) * _ratio(c.x_ss, c.x_ss + c.x_ds)))


def _confusion(g, o, r, k):
    table = np.zeros((r, k), dtype=np.int64)
    np.add.at(table, (o, g), 1)
    return table


def _cases_from_table(table, mapping, positive):
    n = int(table.sum())
    tp = int(table[positive, mapping[positive]])
    fp = int(table[:, mapping[positive]].sum()) - tp
    fn = int(table[positive, :].sum()) - tp
    return CaseCounts(tp, fp, n - tp - fp - fn, fn)


def case_counts(gen, oracle, mapping, positive_cluster):
    """One-vs-rest counts with mapping[oracle fault] = generated cluster."""
    if gen.k != oracle.r:
        raise DomainError(f"virtual mapping needs k == r (k={gen.k}, r={oracle.r})")
    mapping = tuple(mapping)
    if sorted(mapping) != list(range(oracle.r)):
        raise DomainError(f"mapping {mapping} is not a bijection over {oracle.r} clusters")
    if not 0 <= positive_cluster < oracle.r:
        raise DomainError(f"positive cluster {positive_cluster} out of range")
    g, o = _aligned_labels(gen, oracle)
    return _cases_from_table(_confusion(g, o, oracle.r, gen.k), mapping, positive_cluster)


def pr(c):
    return _ratio(c.x_tp, c.x_tp + c.x_fp)


def rr(c):
    return _ratio(c.x_tp, c.x_tp + c.x_fn)


def _single_case_scores(table, mapping, averaging):
    per_cluster = [_cases_from_table(table, mapping, f) for f in range(len(mapping))]
    if averaging == "micro":
        total = sum(per_cluster[1:], per_cluster[0])
        return pr(total), rr(total)
    return (float(np.mean([pr(c) for c in per_cluster])),
            float(np.mean([rr(c) for c in per_cluster])))


def _first_argmax(values):
    return int(np.argmax(np.asarray(values)))


def evaluate_version(gen, oracle, version_id=None, ref=None, averaging="micro"):
    if averaging not in AVERAGING_MODES:
        raise DomainError(f"averaging must be one of {AVERAGING_MODES}, got {averaging!r}")
    ref_name = getattr(ref, "value", ref)
    category = Category.of(gen.k, oracle.r)
    if category is not Category.EQUAL:
        return EvalReport(category, gen.k, oracle.r, version_id=version_id, ref=ref_name)

    counts = pair_counts(gen, oracle)
    g, o = _aligned_labels(gen, oracle)
    table = _confusion(g, o, oracle.r, gen.k)

    # permutations() yields lexicographic order, so argmax picks the first on ties
    perms = list(itertools.permutations(range(oracle.r)))
    scores = np.array([_single_case_scores(table, p, averaging) for p in perms])
    best_pr = _first_argmax(scores[:, 0])
    best_rr = _first_argmax(scores[:, 1])
    best_sum = _first_argmax(scores.sum(axis=1))

    permutations = {"JC": perms[best_sum], "FMI": perms[best_sum],
                    "PR": perms[best_pr], "RR": perms[best_rr]}
    metrics = {"JC": jc(counts), "FMI": fmi(counts),
               "PR": float(scores[best_pr, 0]), "RR": float(scores[best_rr, 1])}
    ballot = {}
    for perm in permutations.values():
        ballot[perm] = ballot.get(perm, 0) + 1
    return EvalReport(category, gen.k, oracle.r, metrics, permutations, max(ballot.values()),
                      version_id=version_id, ref=ref_name)


def _equal_only(reports):
    return [rep for rep in reports if rep.category is Category.EQUAL]


def sum_metric(reports, metric):
    if metric not in METRICS:
        raise DomainError(f"unknown metric {metric!r}")
    return float(sum(rep.metrics[metric] for rep in _equal_only(reports)))


def deviation(estimates):
    """Mean overshoot, mean undershoot and mean absolute miss of (k, r) pairs; None when absent."""
    over = [k - r for k, r in estimates if k > r]
    under = [r - k for k, r in estimates if k < r]
    missed = over + under
    return (
        float(np.mean(over)) if over else None,
        float(np.mean(under)) if under else None,
        float(np.mean(missed)) if missed else None,
    )


def sum_vote(reports):
    return int(sum(rep.votes for rep in _equal_only(reports)))


_ORACLE_LINE = re.compile(r"^(\d+)\s+(\d+)$")
_ORACLE_NOTE = re.compile(r"^#\s*(dropped_multi_cause|dropped_interaction)\s*=\s*(\d+)$")


def parse_oracle(text):
    lines = text_lines(text, lambda line_no: DomainError(f"oracle line {line_no}: invalid UTF-8"))
    labels = {}
    notes = {"dropped_multi_cause": 0, "dropped_interaction": 0}
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        note = _ORACLE_NOTE.match(line)
        if note:
            notes[note.group(1)] = int(note.group(2))
            continue
        if not line or line.startswith("#"):
            continue
        match = _ORACLE_LINE.match(line)
        if not match:
            raise DomainError(f"oracle line {line_no}: expected '<test_id> <fault_id>', got {line!r}")
        test_id, fault_id = int(match.group(1)), int(match.group(2))
        if test_id in labels:
            raise DomainError(f"oracle line {line_no}: test {test_id} labeled twice")
        labels[test_id] = fault_id
    return OracleLabels.build(labels, **notes)


def load_oracle(path):
    with open(path, "rb") as file:
        return parse_oracle(file.read())


def format_oracle(oracle):
    lines = [f"# dropped_multi_cause={oracle.dropped_multi_cause}",
             f"# dropped_interaction={oracle.dropped_interaction}"]
    lines += [f"{t} {f}" for t, f in zip(oracle.failed_ids, oracle.faults)]
    return "\n".join(lines) + "\n"
