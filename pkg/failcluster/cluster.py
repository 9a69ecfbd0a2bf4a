"""
Cluster-count estimation (mountain method) and improved K-medoids.

The mountain method gives every failed test a potential from a Gaussian kernel
over its distances, picks the highest potential as a medoid, lowers the
potential around it and repeats until what is left falls below a share of the
first pick. The medoids it selects seed K-medoids directly, so no search over
initial medoid combinations is needed.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.stats.mstats import winsorize

from failcluster.errors import DomainError

logger = logging.getLogger(__name__)

MAX_ITERATIONS = 100


class MountainParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    bandwidth_scale: float = Field(default=1.0, gt=0.0,
                                   description="Multiplier on the winsorized mean distance")
    revision_sharpening: float = Field(default=2.0, gt=0.0,
                                       description="Kernel sharpening used when revising potentials")
    stop_ratio: float = Field(default=0.15, gt=0.0, lt=1.0,
                              description="Stop once the best potential is below this share of the first")
    winsor_lower: float = Field(default=5.0, ge=0.0, le=100.0,
                                description="Lower winsorization percentile")
    winsor_upper: float = Field(default=95.0, ge=0.0, le=100.0,
                                description="Upper winsorization percentile")

    @model_validator(mode="after")
    def _ordered_limits(self):
        if self.winsor_lower >= self.winsor_upper:
            raise ValueError("winsor_lower must be below winsor_upper")
        return self


@dataclass(frozen=True)
class ClusterEstimate:
    """Estimated cluster count; medoids and trace hold row indices of the distance matrix."""
    k: int
    initial_medoids: Tuple[int, ...]
    potential_trace: Tuple[Tuple[int, float], ...]


@dataclass(frozen=True)
class Clustering:
    """Hard assignment of failed tests to clusters 0..k-1.

    assignment[i] is the cluster of failed_ids[i]; medoids[c] is a row index.
    """
    failed_ids: Tuple[int, ...]
    assignment: Tuple[int, ...]
    medoids: Tuple[int, ...]
    converged: bool = True
    iterations: int = 0

    @property
    def k(self):
        return len(self.medoids)

    @classmethod
    def from_labels(cls, failed_ids, labels):
        """Wrap an existing labeling; the first member of each cluster stands in as medoid."""
        labels = tuple(int(c) for c in labels)
        if len(labels) != len(failed_ids):
            raise DomainError("one label per failed test is required")
        k = max(labels) + 1 if labels else 0
        medoids = []
        for cluster_id in range(k):
            if cluster_id not in labels:
                raise DomainError(f"cluster {cluster_id} has no members")
            medoids.append(labels.index(cluster_id))
        return cls(tuple(failed_ids), labels, tuple(medoids))

    def members(self, cluster_id):
        return tuple(t for t, c in zip(self.failed_ids, self.assignment) if c == cluster_id)

    def clusters(self):
        return [self.members(c) for c in range(self.k)]


def bandwidth(d, p):
    """Scaled winsorized mean of the pairwise distances."""
    upper = d.values[np.triu_indices(d.n, k=1)]
    if upper.size == 0:
        return 0.0
    clipped = winsorize(upper, limits=(p.winsor_lower / 100.0, 1.0 - p.winsor_upper / 100.0))
    return p.bandwidth_scale * float(np.mean(clipped))


def estimate_clusters(d, p=None):
    p = p or MountainParams()
    n = d.n
    if n == 0:
        raise DomainError("cannot estimate clusters of zero failed tests")

    sigma = bandwidth(d, p)
    if n == 1 or sigma == 0.0:
        logger.debug("Degenerate distances (n=%d, sigma=%.3g); single cluster", n, sigma)
        return ClusterEstimate(1, (0,), ((0, float(n - 1)),))

    values = np.array(d.values, dtype=float)
    kernel = np.exp(-(values / sigma) ** 2)
    np.fill_diagonal(kernel, 0.0)
    potential = kernel.sum(axis=1)
    revision = np.exp(-(values * p.revision_sharpening / sigma) ** 2)

    selected = []
    trace = []
    first = None
    while len(selected) < n:
        candidates = potential.copy()
        candidates[selected] = -np.inf
        best = int(np.argmax(candidates))
        value = float(candidates[best])
        if first is None:
            first = value
        elif value < p.stop_ratio * first or first <= 0.0:
            break
        selected.append(best)
        trace.append((best, value))
        potential = potential - value * revision[:, best]

    logger.debug("Mountain method selected %d medoids: %s", len(selected), selected)
    return ClusterEstimate(len(selected), tuple(selected), tuple(trace))


def total_cost(d, clustering):
    """Sum of distances from every failed test to its cluster medoid."""
    medoid_rows = np.asarray(clustering.medoids)[np.asarray(clustering.assignment)]
    return float(d.values[np.arange(d.n), medoid_rows].sum())


def kmedoids(d, init, max_iter=MAX_ITERATIONS):
    n, k = d.n, init.k
    if k > n:
        raise DomainError(f"cannot form {k} clusters from {n} failed tests")
    if k < 1:
        raise DomainError("at least one initial medoid is required")

    values = d.values
    medoids = list(init.initial_medoids)
    assignment = None
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        labels = np.argmin(values[:, medoids], axis=1)
        labels[medoids] = np.arange(k)
        if assignment is not None and np.array_equal(labels, assignment):
            converged = True
            break
        assignment = labels
        for cluster_id in range(k):
            members = np.flatnonzero(assignment == cluster_id)
            costs = values[np.ix_(members, members)].sum(axis=1)
            medoids[cluster_id] = int(members[np.argmin(costs)])

    if not converged:
        logger.warning("K-medoids stopped at the %d iteration cap without converging", max_iter)

    return Clustering(
        failed_ids=d.failed_ids,
        assignment=tuple(int(c) for c in assignment),
        medoids=tuple(medoids),
        converged=converged,
        iterations=iterations,
    )
