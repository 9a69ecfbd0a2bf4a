"""
Revised Kendall tau distance between ranking lists.

A statement pair is discordant when the two lists order it strictly opposite;
ties in either list are neutral. Each discordant pair (s_i, s_j) contributes
1/a(s_i) + 1/a(s_j) + 1/b(s_i) + 1/b(s_j), so disagreements near the top of
the lists weigh more.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import pandas as pd

from failcluster.errors import DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    failed_ids: Tuple[int, ...]
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (len(self.failed_ids), len(self.failed_ids)):
            raise DomainError("distance matrix shape does not match the failed tests")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "failed_ids", tuple(self.failed_ids))

    @property
    def n(self):
        return len(self.failed_ids)

    def to_frame(self):
        labels = list(self.failed_ids)
        return pd.DataFrame(self.values, index=pd.Index(labels, name="failed_test_id"),
                            columns=labels)


def write_distance_csv(d, path):
    """Dump a distance matrix as CSV, rows and columns in failed-test order."""
    d.to_frame().to_csv(path, float_format="%.6f", lineterminator="\n")
    logger.info("Wrote %dx%d distance matrix to %s", d.n, d.n, path)


def revised_kendall(a, b):
    a = np.asarray(getattr(a, "positions", a), dtype=float)
    b = np.asarray(getattr(b, "positions", b), dtype=float)
    if a.shape != b.shape:
        raise DomainError(f"ranking lists differ in length ({a.size} vs {b.size})")

    order_a = np.sign(a[:, None] - a[None, :])
    order_b = np.sign(b[:, None] - b[None, :])
    discordant = np.triu(order_a * order_b < 0, k=1)
    if not discordant.any():
        return 0.0

    inv_a, inv_b = 1.0 / a, 1.0 / b
    weights = inv_a[:, None] + inv_a[None, :] + inv_b[:, None] + inv_b[None, :]
    return float(weights[discordant].sum())


def distance_matrix(proxies):
    """Pairwise revised Kendall tau distances between failure proxies."""
    proxies = list(proxies)
    if not proxies:
        raise DomainError("no failure proxies to compare")
    lengths = {len(p.ranking) for p in proxies}
    refs = {p.ref for p in proxies}
    if len(lengths) > 1:
        raise DomainError(f"proxies have different statement counts {sorted(lengths)}")
    if len(refs) > 1:
        raise DomainError("proxies were built with different risk evaluation formulas")

    n = len(proxies)
    values = np.zeros((n, n), dtype=float)
    for i in range(n):
        for j in range(i + 1, n):
            values[i, j] = values[j, i] = revised_kendall(proxies[i].ranking, proxies[j].ranking)
    return DistanceMatrix(tuple(p.failed_test_id for p in proxies), values)
