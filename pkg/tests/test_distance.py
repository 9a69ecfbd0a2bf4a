import itertools

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings, strategies as st

from failcluster.distance import distance_matrix, revised_kendall, write_distance_csv
from failcluster.errors import DomainError
from failcluster.formulas import RankingList, RefId, rank
from failcluster.srr import Nsp1fPolicy, represent, represent_all

from conftest import T3, T5, T8


def brute_force_kendall(a, b):
    total = 0.0
    for i, j in itertools.combinations(range(len(a)), 2):
        if (a[i] - a[j]) * (b[i] - b[j]) < 0:
            total += 1 / a[i] + 1 / a[j] + 1 / b[i] + 1 / b[j]
    return total


def test_identical_lists_are_at_distance_zero():
    assert revised_kendall(RankingList((4, 4, 3, 6, 1, 1)), RankingList((4, 4, 3, 6, 1, 1))) == 0.0


def test_single_discordant_pair():
    assert revised_kendall((1, 2, 3), (1, 3, 2)) == pytest.approx(5 / 3)


def test_full_reversal_of_two():
    assert revised_kendall((1, 2), (2, 1)) == pytest.approx(3.0)


def test_ties_are_neutral():
    assert revised_kendall((1, 1, 3), (1, 2, 3)) == 0.0


def test_length_mismatch():
    with pytest.raises(DomainError):
        revised_kendall((1, 2), (1, 2, 3))


rankings = st.integers(1, 6).flatmap(
    lambda n: st.tuples(st.lists(st.floats(-3, 3), min_size=n, max_size=n),
                        st.lists(st.floats(-3, 3), min_size=n, max_size=n)))


@settings(deadline=None, max_examples=300)
@given(rankings)
def test_matches_pairwise_enumeration(scores):
    a = rank(scores[0]).positions
    b = rank(scores[1]).positions
    assert revised_kendall(a, b) == pytest.approx(brute_force_kendall(a, b))
    assert revised_kendall(a, b) == pytest.approx(revised_kendall(b, a))
    assert (revised_kendall(a, b) == 0.0) == (brute_force_kendall(a, b) == 0.0)


def test_discordance_near_the_top_weighs_more():
    top = revised_kendall((1, 2, 3, 4), (2, 1, 3, 4))
    bottom = revised_kendall((1, 2, 3, 4), (1, 2, 4, 3))
    assert top == pytest.approx(3.0)
    assert bottom == pytest.approx(7 / 6)
    assert top > bottom


def test_motivating_matrix(motivating_cov):
    proxies = represent_all(motivating_cov, Nsp1fPolicy(), RefId.OCHIAI)
    d = distance_matrix(proxies)
    index = {t: i for i, t in enumerate(d.failed_ids)}
    assert d.values[index[T5], index[T8]] == 0.0
    assert d.values[index[T5], index[T3]] > 0.0
    assert np.array_equal(d.values, d.values.T)
    assert np.all(np.diag(d.values) == 0.0)
    assert np.all(d.values >= 0.0)


def test_single_and_duplicate_proxies(motivating_cov):
    one = represent(motivating_cov, T5, Nsp1fPolicy(), RefId.OCHIAI)
    assert distance_matrix([one]).values.tolist() == [[0.0]]
    assert distance_matrix([one, one]).values.tolist() == [[0.0, 0.0], [0.0, 0.0]]


def test_heterogeneous_proxies_are_rejected(motivating_cov):
    ochiai = represent(motivating_cov, T5, Nsp1fPolicy(), RefId.OCHIAI)
    gp19 = represent(motivating_cov, T3, Nsp1fPolicy(), RefId.GP19)
    with pytest.raises(DomainError):
        distance_matrix([ochiai, gp19])
    with pytest.raises(DomainError):
        distance_matrix([])


def test_csv_dump(tmp_path, motivating_cov):
    d = distance_matrix(represent_all(motivating_cov, Nsp1fPolicy(), RefId.OCHIAI))
    path = tmp_path / "matrix.csv"
    write_distance_csv(d, path)
    frame = pd.read_csv(path, index_col=0)
    assert list(frame.index) == list(motivating_cov.failed_ids)
    assert [int(c) for c in frame.columns] == list(motivating_cov.failed_ids)
    assert np.allclose(frame.to_numpy(), d.values, atol=1e-6)
