import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from bisectlimit.degrees import (
    DegreeDistribution,
    DegreeSequence,
    check_distributional_convergence,
    empirical_distribution,
    regular_distribution,
    sample_iid_degrees,
    truncated_poisson,
    wasserstein,
)
from bisectlimit.errors import InvalidInputError


def test_sequence_basics():
    d = DegreeSequence((2, 2, 1, 1))
    assert d.total == 6 and d.n == 4
    assert d[1] == 2 and d[4] == 1
    assert d.degree_of({1, 3}) == 3
    assert d.restrict({2, 4}).degrees == (2, 1)


def test_sequence_rejects_negative():
    with pytest.raises(InvalidInputError):
        DegreeSequence((1, -1))


@pytest.mark.parametrize("degs, mass, mean", [
    ((2, 2, 1, 1), {1: 0.5, 2: 0.5}, 1.5),
    ((3, 3, 3), {3: 1.0}, 3.0),
    ((0, 0, 4), {0: 2 / 3, 4: 1 / 3}, 4 / 3),
])
def test_empirical(degs, mass, mean):
    mu = empirical_distribution(degs)
    assert set(mu.support) == set(mass)
    for k, p in mass.items():
        assert mu[k] == pytest.approx(p, abs=1e-15)
    assert mu.mean == pytest.approx(mean, abs=1e-15)


@pytest.mark.parametrize("r", [0, 1, 3])
def test_regular(r):
    mu = regular_distribution(r)
    assert list(mu.support) == [r] and mu[r] == 1.0 and mu.mean == r


def test_truncated_poisson_values():
    mu = truncated_poisson(2, 10)
    z = sum(math.exp(-2) * 2**k / math.factorial(k) for k in range(11))
    assert z == pytest.approx(0.9999916918, abs=1e-10)
    assert mu[0] == pytest.approx(math.exp(-2) / z, abs=1e-15)
    assert mu[0] == pytest.approx(0.135336, abs=5e-7)
    assert math.fsum(mu.mass.values()) == pytest.approx(1.0, abs=1e-12)
    half = truncated_poisson(1, 1)
    assert half[0] == pytest.approx(0.5) and half[1] == pytest.approx(0.5)


def test_distribution_must_normalise():
    with pytest.raises(InvalidInputError):
        DegreeDistribution({1: 0.5, 2: 0.4})


def test_wasserstein_examples():
    mu = regular_distribution(2)
    assert wasserstein(mu, mu) == 0
    assert wasserstein(regular_distribution(2), regular_distribution(3)) == pytest.approx(1.0)
    assert wasserstein(DegreeDistribution({1: 0.5, 2: 0.5}), mu) == pytest.approx(0.5)


histograms = st.dictionaries(st.integers(0, 8), st.integers(1, 5), min_size=1, max_size=5).map(
    lambda h: DegreeDistribution({k: v / sum(h.values()) for k, v in h.items()}))


@given(histograms, histograms, histograms)
def test_wasserstein_is_a_metric(mu, nu, rho):
    d = wasserstein
    assert d(mu, mu) == pytest.approx(0, abs=1e-12)
    assert d(mu, nu) == pytest.approx(d(nu, mu), abs=1e-12)
    assert d(mu, rho) <= d(mu, nu) + d(nu, rho) + 1e-12
    assert d(mu, nu) == pytest.approx(oracles.wasserstein(dict(mu.mass), dict(nu.mass)), abs=1e-12)


def test_sampling():
    assert sample_iid_degrees(regular_distribution(3), 5, 0).degrees == (3,) * 5
    mu = DegreeDistribution({1: 0.5, 2: 0.5})
    a = sample_iid_degrees(mu, 10_000, 7)
    assert a == sample_iid_degrees(mu, 10_000, 7)
    assert wasserstein(empirical_distribution(a), mu) < 0.05


def test_distributional_convergence():
    seqs = [DegreeSequence((3,) * n) for n in (10, 20, 40)]
    rep = check_distributional_convergence(seqs, regular_distribution(3))
    assert rep.passed and rep.max_histogram_gap == 0 and rep.mean_gap == 0

    mu = DegreeDistribution({1: 0.5, 2: 0.5})
    seqs = [DegreeSequence((1,) * (n // 2) + (2,) * (n - n // 2)) for n in (11, 21, 41)]
    rep = check_distributional_convergence(seqs, mu, tol=0.1)
    assert rep.passed and rep.max_histogram_gap <= 1 / 41 + 1e-15

    n = 200
    hub = DegreeSequence((n,) + (1,) * (n - 1))
    rep = check_distributional_convergence([hub], regular_distribution(1))
    assert rep.max_histogram_gap <= 1 / n + 1e-15
    assert rep.mean_gap == pytest.approx((2 * n - 1) / n - 1)
    assert not rep.passed
