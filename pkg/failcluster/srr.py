"""
Statement ranking representation (SRR).

Each failed test is paired with (a sample of) the passed tests, scored with a
risk evaluation formula, and represented by the resulting ranking list.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from failcluster.errors import DomainError
from failcluster.formulas import RankingList, RefId, rank, suspiciousness
from failcluster.spectrum import SuiteSelection, Verdict, compute_spectrum

logger = logging.getLogger(__name__)


class Nsp1fPolicy(BaseModel):
    """How many passed tests are paired with one failed test."""
    model_config = ConfigDict(frozen=True)

    fraction: float = Field(default=1.0, gt=0.0, le=1.0,
                            description="Share of passed tests paired with each failed test")
    seed: int = Field(default=0, ge=0, lt=2 ** 64,
                      description="Seed of the per-failed-test sampling streams")


@dataclass(frozen=True, eq=False)
class FailureProxy:
    failed_test_id: int
    ref: RefId
    sampled_passed_ids: Tuple[int, ...]
    scores: np.ndarray
    ranking: RankingList


def sample_size(fraction, population):
    return math.ceil(Fraction(fraction).limit_denominator(10 ** 6) * population)


def sample_passed(all_passed, policy, failed_test_id):
    """Sample passed tests for one failed test, without replacement.

    The stream is seeded from (policy.seed, failed_test_id) alone, so the sample
    does not depend on the order failed tests are processed in.
    """
    all_passed = tuple(all_passed)
    if not all_passed:
        raise DomainError("cannot pair a failed test with an empty set of passed tests")
    if policy.fraction >= 1.0:
        return all_passed

    size = sample_size(policy.fraction, len(all_passed))
    rng = np.random.default_rng([policy.seed, failed_test_id])
    chosen = np.sort(rng.choice(len(all_passed), size=size, replace=False))
    return tuple(all_passed[i] for i in chosen)


def represent(cov, failed_test_id, policy, ref):
    """Build the ranking-list proxy of one failed test."""
    if not 0 <= failed_test_id < cov.num_tests:
        raise DomainError(f"test id {failed_test_id} out of range for {cov.num_tests} tests")
    if cov.verdicts[failed_test_id] is not Verdict.FAIL:
        raise DomainError(f"test {failed_test_id} passed; only failed tests can be represented")

    sample = sample_passed(cov.passed_ids, policy, failed_test_id)
    spectrum = compute_spectrum(cov, SuiteSelection((failed_test_id,), sample))
    scores = suspiciousness(ref, spectrum)
    return FailureProxy(
        failed_test_id=failed_test_id,
        ref=RefId(ref),
        sampled_passed_ids=sample,
        scores=scores,
        ranking=rank(scores),
    )


def represent_all(cov, policy, ref):
    """Proxies of every failed test, in file order."""
    failed = cov.failed_ids
    if not failed:
        raise DomainError("coverage record has no failed tests")
    proxies = [represent(cov, test_id, policy, ref) for test_id in failed]
    logger.debug("Represented %d failed tests with %s at fraction %.2f",
                  len(proxies), RefId(ref).value, policy.fraction)
    return proxies


def fault_focused_suites(cov, clustering):
    """One test suite F_i plus all passed tests per generated cluster."""
    suites = []
    for cluster_id in range(clustering.k):
        members = tuple(test_id for test_id, c in zip(clustering.failed_ids, clustering.assignment)
                        if c == cluster_id)
        suites.append(SuiteSelection(members, cov.passed_ids))
    return suites
