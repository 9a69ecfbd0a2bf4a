import numpy as np
import pytest

from failcluster.evaluation import evaluate_version
from failcluster.faultgen.corpus import sample_synthetic_spectrum
from failcluster.formulas import RefId, suspiciousness
from failcluster.pipeline import cluster_failures
from failcluster.spectrum import compute_spectrum
from failcluster.srr import Nsp1fPolicy, fault_focused_suites

from conftest import T3, T4, T5, T7, T8, T10


@pytest.mark.parametrize("ref", [RefId.OCHIAI, RefId.GP19])
def test_motivating_example_end_to_end(motivating_cov, motivating_oracle, ref):
    result = cluster_failures(motivating_cov, ref)
    clustering = result.clustering
    assert result.estimate.k == 2
    assert sorted(clustering.clusters()) == [(T3, T4, T7, T10), (T5, T8)]
    assert len(result.proxies) == 6

    report = evaluate_version(clustering, motivating_oracle)
    assert report.metrics == {"JC": 1.0, "FMI": 1.0, "PR": 1.0, "RR": 1.0}
    assert report.votes == 4


def test_fault_focused_suites_localize_each_fault(motivating_cov):
    clustering = cluster_failures(motivating_cov, RefId.OCHIAI).clustering
    suites = fault_focused_suites(motivating_cov, clustering)
    assert len(suites) == 2

    tops = {}
    for suite in suites:
        scores = suspiciousness(RefId.OCHIAI, compute_spectrum(motivating_cov, suite))
        tops[suite.failed_ids] = {int(s) + 1 for s in np.flatnonzero(scores == scores.max())}
    assert tops[(T5, T8)] == {5, 6}
    assert tops[(T3, T4, T7, T10)] == {9}


@pytest.mark.parametrize("n_faults", [2, 3, 5])
@pytest.mark.parametrize("ref", [RefId.OCHIAI, RefId.GP19])
def test_noiseless_planted_faults_are_recovered(n_faults, ref):
    cov, oracle = sample_synthetic_spectrum(n_faults, 3, 20, 40, 0.0, rng_seed=n_faults)
    result = cluster_failures(cov, ref)
    assert result.clustering.k == n_faults
    report = evaluate_version(result.clustering, oracle)
    assert set(report.metrics.values()) == {1.0}


def test_small_passed_sample_keeps_planted_clusters():
    cov, oracle = sample_synthetic_spectrum(3, 4, 20, 36, 0.0, rng_seed=3)
    result = cluster_failures(cov, RefId.GP19, Nsp1fPolicy(fraction=0.2, seed=8))
    assert all(len(p.sampled_passed_ids) == 4 for p in result.proxies)
    assert evaluate_version(result.clustering, oracle).metrics["JC"] == 1.0
