"""Cluster the failed tests of one coverage record end to end."""

import logging
from dataclasses import dataclass
from typing import List

from failcluster.cluster import ClusterEstimate, Clustering, MountainParams, estimate_clusters, kmedoids
from failcluster.distance import DistanceMatrix, distance_matrix
from failcluster.formulas import RefId
from failcluster.srr import FailureProxy, Nsp1fPolicy, represent_all

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineResult:
    proxies: List[FailureProxy]
    distances: DistanceMatrix
    estimate: ClusterEstimate
    clustering: Clustering


def cluster_failures(cov, ref=RefId.GP19, policy=None, params=None):
    """Represent, compare, estimate and cluster the failed tests of one coverage record."""
    policy = policy or Nsp1fPolicy()
    params = params or MountainParams()

    proxies = represent_all(cov, policy, ref)
    distances = distance_matrix(proxies)
    estimate = estimate_clusters(distances, params)
    clustering = kmedoids(distances, estimate)
    logger.debug("%s: %d failed tests -> %d clusters", RefId(ref).value, len(proxies), clustering.k)
    return PipelineResult(proxies, distances, estimate, clustering)
