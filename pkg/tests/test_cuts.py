import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from bisectlimit import cuts
from bisectlimit.config_model import MultiGraph, random_regular_multigraph
from bisectlimit.cuts import Bisection, LocalSearchParams, SignedGraph
from bisectlimit.errors import InvalidInputError, ResourceGuardError
from conftest import random_multigraph, random_split

P4 = MultiGraph(4, ((1, 2), (2, 3), (3, 4)))
C4 = MultiGraph(4, ((1, 2), (2, 3), (3, 4), (1, 4)))
K3 = MultiGraph(3, ((1, 2), (2, 3), (1, 3)))
K2 = MultiGraph(2, ((1, 2),))


def test_signed_cut_value():
    assert cuts.signed_cut_value(SignedGraph.uniform(K2, 1), Bisection((1, 2))) == 1
    loop = SignedGraph(MultiGraph(2, ((1, 1),)), (1,))
    assert cuts.signed_cut_value(loop, Bisection((1, 2))) == 0
    assert cuts.signed_cut_value(SignedGraph.uniform(C4), Bisection.from_sets({1, 3}, 4)) == 4


def test_bisection_canonical_form():
    assert Bisection((2, 1, 2)).side == (1, 2, 1)
    assert Bisection.from_mask(0b110, 3).side == (1, 2, 2)
    b = Bisection((1, 2, 2, 1))
    assert b.is_balanced() and b.is_balanced({1, 2}, {3, 4}) and not b.is_balanced({1, 4}, {2, 3})


@pytest.mark.parametrize("g, mc, mb_min", [(P4, 3, 1), (C4, 4, 2), (K3, 2, 2), (K2, 1, 1)])
def test_unsigned_examples(g, mc, mb_min):
    assert cuts.max_cut(g).value == mc
    assert cuts.min_bisection(g).value == mb_min


def test_signed_examples():
    assert cuts.signed_max_bisection(SignedGraph.uniform(K2, -1)).value == -1
    assert cuts.signed_max_bisection(SignedGraph.uniform(K3, -1)).value == -2
    assert cuts.signed_max_bisection(SignedGraph.uniform(P4, 1)).value == 3


def test_constrained_examples():
    res = cuts.constrained_max_bisection(SignedGraph.uniform(P4), {1, 2}, {3, 4})
    assert res.value == 3 and res.witness.parts()[0] == frozenset({1, 3})
    assert cuts.constrained_max_bisection(SignedGraph.uniform(MultiGraph(4)), {1, 2}, {3, 4}).value == 0
    match = SignedGraph.uniform(MultiGraph(4, ((1, 3), (2, 4))))
    res = cuts.constrained_max_bisection(match, {1, 2}, {3, 4})
    assert res.value == 2 and res.witness.parts()[0] == frozenset({1, 4})


def test_optimal_constrained_set():
    both = cuts.enumerate_optimal_constrained(SignedGraph.uniform(MultiGraph(4)), {1, 2}, {3, 4})
    assert len(both) == 2
    assert len(cuts.enumerate_optimal_constrained(SignedGraph.uniform(K2), {1}, {2})) == 1
    match = SignedGraph.uniform(MultiGraph(4, ((1, 3), (2, 4))))
    (only,) = cuts.enumerate_optimal_constrained(match, {1, 2}, {3, 4})
    assert only.parts()[0] == frozenset({1, 4})


def test_alpha_cut():
    assert cuts.alpha_cut(SignedGraph.uniform(C4), 0.25).value == 2
    assert cuts.alpha_cut(SignedGraph.uniform(K2), 0.25).value == 1
    rng = np.random.default_rng(3)
    for _ in range(20):
        g = random_multigraph(rng, int(rng.integers(2, 9)), int(rng.integers(0, 10)))
        sg = SignedGraph(g, tuple(int(x) for x in rng.choice([1, -1], g.m)))
        assert cuts.alpha_cut(sg, 0.5).value == cuts.signed_max_bisection(sg).value


def test_witness_attains_value():
    rng = np.random.default_rng(11)
    for _ in range(30):
        n = int(rng.integers(2, 9))
        g = random_multigraph(rng, n, int(rng.integers(0, 12)))
        sg = SignedGraph(g, tuple(int(x) for x in rng.choice([1, -1], g.m)))
        A, B = random_split(rng, n)
        for res, cons in ((cuts.signed_max_bisection(sg), (None, None)),
                          (cuts.constrained_max_bisection(sg, A, B), (A, B))):
            assert cuts.signed_cut_value(sg, res.witness) == res.value
            assert res.witness.is_balanced(*cons)


graphs = st.integers(1, 7).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.tuples(st.integers(1, n), st.integers(1, n)), max_size=10)))


@given(graphs)
def test_solvers_match_naive_enumeration(spec):
    n, edges = spec
    g = MultiGraph(n, tuple(edges))
    labels = [1 if (u + v) % 3 else -1 for u, v in g.edges]
    assert cuts.max_cut(g).value == oracles.max_cut(n, g.edges)
    assert cuts.min_bisection(g).value == oracles.min_bisection(n, g.edges)
    assert cuts.max_bisection(g).value == oracles.max_bisection(n, g.edges)
    assert cuts.signed_max_bisection(SignedGraph(g, labels)).value == oracles.signed_max_bisection(n, g.edges, labels)


def test_exact_guard():
    with pytest.raises(ResourceGuardError):
        cuts.max_cut(MultiGraph(cuts.EXACT_GUARD + 1))


def test_bad_labels():
    with pytest.raises(InvalidInputError):
        SignedGraph(K2, (2,))
    with pytest.raises(InvalidInputError):
        SignedGraph(K2, (1, 1))


def test_local_search_against_exact():
    rng = np.random.default_rng(5)
    hits = 0
    for run in range(100):
        n = int(rng.integers(4, 21))
        g = random_regular_multigraph(n - n % 2, 3, run)
        sg = SignedGraph(g, tuple(int(x) for x in rng.choice([1, -1], g.m)))
        exact = cuts.signed_max_bisection(sg).value
        res = cuts.local_search_bisection(sg, None, LocalSearchParams(restarts=10), seed=run)
        assert res.value <= exact and res.witness.is_balanced()
        hits += res.value == exact
    assert hits >= 95


def test_local_search_constrained_and_unbalanced():
    rng = np.random.default_rng(8)
    for run in range(30):
        n = int(rng.integers(3, 12))
        g = random_multigraph(rng, n, int(rng.integers(1, 15)))
        sg = SignedGraph(g, tuple(int(x) for x in rng.choice([1, -1], g.m)))
        A, B = random_split(rng, n)
        res = cuts.local_search_bisection(sg, (A, B), LocalSearchParams(restarts=4, sweeps=60), run)
        assert res.witness.is_balanced(A, B)
        assert res.value <= cuts.constrained_max_bisection(sg, A, B).value
        free = cuts.local_search_bisection(SignedGraph.uniform(g), None, LocalSearchParams(4, 60), run,
                                           balanced=False)
        assert free.value <= cuts.max_cut(g).value


def test_local_search_trivia():
    empty = SignedGraph.uniform(MultiGraph(5))
    assert cuts.local_search_bisection(empty, seed=1).value == 0
    sg = SignedGraph.uniform(random_regular_multigraph(12, 3, 2))
    a = cuts.local_search_bisection(sg, seed=9)
    assert a == cuts.local_search_bisection(sg, seed=9)


def test_delta_matrix():
    g = MultiGraph(3, ((1, 2),))
    assert np.all(cuts.delta_matrix(cuts.edge_count, g) == 1)
    assert cuts.delta_matrix(cuts.mc_value, MultiGraph(2))[0, 1] == 1
    rng = np.random.default_rng(2)
    for _ in range(50):
        g = random_multigraph(rng, int(rng.integers(2, 7)), int(rng.integers(0, 8)))
        delta = cuts.delta_matrix(cuts.mb_value, g)
        assert np.all(np.abs(delta) <= 1)


def test_parameter_properties():
    rng = np.random.default_rng(4)
    for _ in range(50):
        g1 = random_multigraph(rng, int(rng.integers(1, 5)), int(rng.integers(0, 5)))
        g2 = random_multigraph(rng, int(rng.integers(1, 5)), int(rng.integers(0, 5)))
        union = MultiGraph(g1.n + g2.n, g1.edges + tuple((u + g1.n, v + g1.n) for u, v in g2.edges))
        assert cuts.mc_value(union) == cuts.mc_value(g1) + cuts.mc_value(g2)

    k3k3 = MultiGraph(6, ((1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6)))
    rep = cuts.check_parameter_properties(cuts.min_bisection_value, k3k3, parts=[[1, 2, 3], [4, 5, 6]])
    assert not rep.additive

    stars = MultiGraph(8, ((1, 2), (1, 3), (1, 4), (5, 6), (5, 7), (5, 8)))
    rep = cuts.check_parameter_properties(cuts.mb_value, stars, parts=[[1, 2, 3, 4], [5, 6, 7, 8]])
    assert not rep.additive
    assert cuts.mb_value(stars) == 6
