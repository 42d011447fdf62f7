import itertools
import json
import math
from fractions import Fraction

import numpy as np
import pytest

import oracles
from bisectlimit import cuts
from bisectlimit.config_model import (
    EdgeTypeCounts,
    HalfEdge,
    Matching,
    MultiGraph,
    enumerate_class,
    feasible_triples,
    graph_of_matching,
    sample_complete_matching,
)
from bisectlimit.degrees import DegreeSequence
from bisectlimit.errors import FeasibilityError, InvalidInputError, PreconditionError
from bisectlimit.hybrid import ConstrainedHybridParam, hybrid_exact_fraction
from bisectlimit.interpolation import (
    CheckReport,
    ClassDecomposition,
    F_mc,
    F_value,
    adjacent_pairs,
    check_corollary_average,
    check_desired_inequality,
    check_interpolation_inequality,
    check_lipschitz_F,
    check_local_superadd,
    check_subadditivity,
    class_polynomials,
    desired_form,
    enumerable_instances,
    half_edge_classes,
    increment_bruteforce,
    increment_bruteforce_fraction,
    increment_formula,
    increment_fraction,
    increment_sweep,
    interpolation_sweep,
    max_delta,
    psi,
    sweep_jsonl,
)
from conftest import SMALL_A, SMALL_B, SMALL_DEGREES

SMALL = DegreeSequence(SMALL_DEGREES)
FOUR = DegreeSequence((1, 1, 1, 1))
A12, B34 = frozenset({1, 2}), frozenset({3, 4})


def edge_count(g):
    return g.m


def empty_four():
    return half_edge_classes(Matching((), FOUR), (), A12, B34)


# ---------------------------------------------------------------- psi

def test_psi_values():
    assert psi(0) == 0
    assert psi(1) == pytest.approx(5.8279, abs=1e-4)
    assert psi(3) == pytest.approx(14.2754, abs=1e-4)
    with pytest.raises(InvalidInputError):
        psi(-1)


def test_psi_increasing_and_concave():
    xs = np.concatenate([np.linspace(0, 10, 2000, endpoint=False), np.geomspace(10, 1e6, 2001)])
    ys = np.array([psi(x) for x in xs])
    assert np.all(np.diff(ys) > 0)
    for grid in (np.linspace(0.01, 10, 2001), np.linspace(10, 1e6, 2001)):
        v = np.array([psi(x) for x in grid])
        assert np.all(v[:-2] + v[2:] - 2 * v[1:-1] <= 1e-9 * np.abs(v[1:-1]))


# ------------------------------------------------------------- F values

def test_F_edge_count_and_constant():
    for t in feasible_triples(SMALL, SMALL_A, SMALL_B):
        assert F_value(edge_count, SMALL, SMALL_A, SMALL_B, t) == sum(t)
        assert F_value(lambda g: 5, SMALL, SMALL_A, SMALL_B, t) == 5


def test_F_small_instance_against_enumeration_oracle():
    # mean of constrained max-bisections over the 9 members of M(1,1,1)
    vals = [oracles.signed_max_bisection(4, oracles.edges_of(m), [1] * 3, SMALL_A, SMALL_B)
            for m in oracles.class_members(SMALL_DEGREES, SMALL_A, (1, 1, 1))]
    assert len(vals) == 9
    want = Fraction(sum(vals), 9)
    assert want == Fraction(7, 3)
    param = ConstrainedHybridParam(SMALL_A, SMALL_B, 1)
    assert F_value(param, SMALL, SMALL_A, SMALL_B, (1, 1, 1)) == want


def test_F_infeasible():
    with pytest.raises(FeasibilityError):
        F_value(edge_count, SMALL, SMALL_A, SMALL_B, (2, 0, 0))
    with pytest.raises(FeasibilityError):
        F_mc(edge_count, SMALL, SMALL_A, SMALL_B, (2, 0, 0), 10, 0)


def test_F_mc():
    param = ConstrainedHybridParam(SMALL_A, SMALL_B, Fraction(3, 4))
    exact = float(F_value(param, SMALL, SMALL_A, SMALL_B, (1, 1, 1)))
    est = F_mc(param, SMALL, SMALL_A, SMALL_B, (1, 1, 1), 3000, 4)
    assert abs(est.value - exact) <= 3 * est.stderr
    assert est == F_mc(param, SMALL, SMALL_A, SMALL_B, (1, 1, 1), 3000, 4)
    flat = F_mc(edge_count, SMALL, SMALL_A, SMALL_B, (1, 1, 1), 50, 1)
    assert flat.value == 3 and flat.stderr == 0


# ------------------------------------------------------------ Lipschitz

def test_lipschitz_examples():
    param = ConstrainedHybridParam(SMALL_A, SMALL_B, Fraction(3, 4))
    rep = check_lipschitz_F(param, SMALL, SMALL_A, SMALL_B, [((1, 1, 1), (1, 1, 0))])
    assert rep.passed and rep.lhs <= 1
    rep = check_lipschitz_F(param, SMALL, SMALL_A, SMALL_B, [((1, 1, 1), (1, 1, 1))])
    assert rep.lhs == 0
    pairs = adjacent_pairs(SMALL, SMALL_A, SMALL_B)
    rep = check_lipschitz_F(edge_count, SMALL, SMALL_A, SMALL_B, pairs)
    assert rep.passed and rep.slack == 0


@pytest.mark.parametrize("p", [Fraction(1, 2), Fraction(3, 4), 1])
def test_lipschitz_small_sweep(p):
    for d, A, B in enumerable_instances(8):
        if not A or not B:
            continue
        rep = check_lipschitz_F(ConstrainedHybridParam(A, B, p), d, A, B, adjacent_pairs(d, A, B))
        assert rep.passed, (d, A, rep)


# -------------------------------------------------------- decompositions

def test_decomposition_examples():
    dec = empty_four()
    assert dec.k == 2 and dec.a == 2 and dec.b == 2
    assert [tuple(c[:4]) for c in dec.pairs] == [(1, 1, 0, 0), (0, 0, 1, 1)]
    assert not dec.has_empty_partner

    d = DegreeSequence((1, 1))
    full = Matching(((HalfEdge(1, 1), HalfEdge(2, 1)),), d)
    assert half_edge_classes(full, (1,), {1}, {2}).pairs == ()

    d = DegreeSequence((2, 1, 1))
    dec = half_edge_classes(Matching((), d), (), {1}, {2, 3})
    (cls,) = [c for c in dec.pairs if HalfEdge(1, 1) in c.O + c.P]
    group = cls.O if HalfEdge(1, 1) in cls.O else cls.P
    assert HalfEdge(1, 2) in group


def test_decomposition_partitions_unmatched():
    rng = np.random.default_rng(3)
    for _ in range(30):
        d = DegreeSequence(tuple(int(x) for x in rng.integers(1, 4, size=int(rng.integers(2, 6)))))
        m = sample_complete_matching(d, int(rng.integers(1 << 30))) if d.total % 2 == 0 else None
        pairs = m.pairs[: int(rng.integers(0, len(m.pairs) + 1))] if m else ()
        m = Matching(pairs, d)
        labels = tuple(int(x) for x in rng.choice([1, -1], len(pairs)))
        A = frozenset(range(1, d.n // 2 + 1))
        B = frozenset(range(1, d.n + 1)) - A
        dec = half_edge_classes(m, labels, A, B)
        seen = [h for c in dec.pairs for h in c.O + c.P]
        assert sorted(seen) == sorted(m.unmatched())
        assert dec.a == sum(h.vertex in A for h in m.unmatched())


# ------------------------------------------------------------ increments

def test_increment_examples():
    dec = empty_four()
    m = Matching((), FOUR)
    p = Fraction(3, 4)
    assert increment_formula(dec, 0.75, "A") == pytest.approx(0.5, abs=1e-12)
    assert increment_formula(dec, 0.75, "A", "paper") == pytest.approx(0.625, abs=1e-12)
    assert increment_formula(dec, 0.75, "cross") == pytest.approx(0.75, abs=1e-12)
    assert increment_formula(dec, 0.75, "cross", "paper") == pytest.approx(0.75, abs=1e-12)
    assert increment_bruteforce(m, (), A12, B34, 0.75, "A") == pytest.approx(0.5, abs=1e-12)
    assert increment_bruteforce(m, (), A12, B34, 0.75, "cross") == pytest.approx(0.75, abs=1e-12)
    assert increment_bruteforce(m, (), A12, B34, 1, "A") == 1
    assert increment_bruteforce_fraction(m, (), A12, B34, p, "A") == oracles.increment(
        (1, 1, 1, 1), [], [], A12, B34, p, "A")


def test_increment_singletons_at_p1():
    singles = ClassDecomposition.from_counts([(1, 0, 0, 0), (1, 0, 0, 0), (1, 0, 0, 0), (0, 0, 1, 0)])
    assert increment_fraction(singles, 1, "A") == 1


def test_increment_preconditions():
    dec = ClassDecomposition.from_counts([(1, 0, 1, 0)])
    with pytest.raises(PreconditionError):
        increment_formula(dec, 0.5, "A")
    with pytest.raises(PreconditionError):
        increment_formula(ClassDecomposition.from_counts([(2, 0, 0, 0)]), 0.5, "cross")
    with pytest.raises(InvalidInputError):
        increment_formula(dec, 0.5, "cross", "other")
    with pytest.raises(PreconditionError):
        increment_bruteforce(Matching((), DegreeSequence((1, 1))), (), {1}, {2}, 0.5, "A")


def test_paper_variant_identity():
    rng = np.random.default_rng(12)
    for _ in range(200):
        counts = [tuple(int(x) for x in rng.integers(0, 4, 4)) for _ in range(int(rng.integers(1, 4)))]
        dec = ClassDecomposition.from_counts(counts)
        p = Fraction(int(rng.integers(0, 11)), 10)
        for kind, n, idx in (("A", dec.a, (0, 1)), ("B", dec.b, (2, 3))):
            if n < 2:
                continue
            gap = increment_fraction(dec, p, kind, "paper") - increment_fraction(dec, p, kind, "exact")
            extra = (1 - p) * sum(2 * c[idx[0]] * c[idx[1]] for c in dec.pairs) * (
                Fraction(1, n * (n - 1)) - Fraction(1, n * n))
            # the +1 parts differ only in how the same-class term is written
            plus = p * (sum(Fraction(c[idx[0]] * (c[idx[0]] - 1) + c[idx[1]] * (c[idx[1]] - 1), n * (n - 1))
                            for c in dec.pairs)
                        - sum(Fraction(c[idx[0]] ** 2 + c[idx[1]] ** 2, n * n)
                              - Fraction(c[idx[0]] * (n - c[idx[0]]) + c[idx[1]] * (n - c[idx[1]]), n * n * (n - 1))
                              for c in dec.pairs))
            assert gap == extra + plus
        if dec.a and dec.b:
            assert increment_fraction(dec, p, "cross", "paper") == increment_fraction(dec, p, "cross")


def test_increment_formula_matches_bruteforce_per_matching():
    rng = np.random.default_rng(21)
    checked = 0
    for d, A, B in enumerable_instances(7):
        if not A or not B:
            continue
        for t in feasible_triples(d, A, B):
            members = enumerate_class(d, A, B, t)
            m = members[int(rng.integers(len(members)))]
            labels = tuple(int(x) for x in rng.choice([1, -1], len(m.pairs)))
            dec = half_edge_classes(m, labels, A, B)
            p = Fraction(int(rng.integers(0, 5)), 4)
            for kind in ("A", "B", "cross"):
                try:
                    want = increment_bruteforce_fraction(m, labels, A, B, p, kind)
                except PreconditionError:
                    continue
                assert increment_fraction(dec, p, kind) == want, (d, A, m, labels, kind)
                checked += 1
    assert checked > 100


def test_increment_sweep_small():
    for d, A, B in enumerable_instances(6):
        sw = increment_sweep(d, A, B)
        assert not sw.mismatches, sw.mismatches
    sw = increment_sweep(SMALL, SMALL_A, SMALL_B)
    assert sw.rows > 0 and sw.comparisons > 0


# ------------------------------------------------------- desired inequality

def test_desired_examples():
    dec = empty_four()
    for p in (1, 0.5):
        rep = check_desired_inequality(dec, p)
        assert rep.passed and rep.lhs == pytest.approx(-0.5, abs=1e-12)
    rep = check_desired_inequality(dec, 1)
    assert rep.details["sos_agree"]
    assert rep.details["sos_p1"] == pytest.approx(-0.5) and rep.details["sos_half"] == pytest.approx(-0.5)
    sym = ClassDecomposition.from_counts([(1, 0, 1, 0), (0, 1, 0, 1)])
    for p in (0.5, 0.8, 1):
        rep = check_desired_inequality(sym, p)
        assert rep.passed and rep.lhs == 0
    with pytest.raises(PreconditionError):
        desired_form(ClassDecomposition.from_counts([(2, 0, 0, 0)]), 1)


def test_desired_form_is_affine():
    rng = np.random.default_rng(5)
    for _ in range(100):
        dec = ClassDecomposition.from_counts(
            [tuple(int(x) for x in rng.integers(0, 4, 4)) for _ in range(int(rng.integers(1, 4)))])
        if not dec.a or not dec.b:
            continue
        f0, f1 = desired_form(dec, 0), desired_form(dec, 1)
        for k in range(11):
            p = Fraction(k, 10)
            assert desired_form(dec, p) == f0 + p * (f1 - f0)
        rep = check_desired_inequality(dec, 1)
        assert rep.details["sos_agree"]


# ---------------------------------------------- super-additivity, interpolation

@pytest.mark.parametrize("p", [Fraction(3, 4), 1, Fraction(1, 2)])
def test_local_superadd_small_instance(p):
    assert max_delta(SMALL, SMALL_A, SMALL_B, (0, 0, 0)) >= 2
    assert check_local_superadd(SMALL, SMALL_A, SMALL_B, (0, 0, 0), 2, p).passed


def test_local_superadd_errors():
    with pytest.raises(PreconditionError):
        check_local_superadd(SMALL, SMALL_A, SMALL_B, (0, 0, 0), 1, 0.5)
    with pytest.raises(FeasibilityError):
        check_local_superadd(SMALL, SMALL_A, SMALL_B, (0, 0, 0), 5, 0.5)


def test_interpolation_examples():
    param = ConstrainedHybridParam(SMALL_A, SMALL_B, Fraction(3, 4))
    for gamma in (0, 1, 3):
        rep = check_interpolation_inequality(param, SMALL, SMALL_A, SMALL_B, gamma)
        assert rep.passed
    rep = check_interpolation_inequality(param, SMALL, SMALL_A, SMALL_B, 0)
    assert rep.slack == pytest.approx(0, abs=1e-12)
    rep = check_interpolation_inequality(param, SMALL, SMALL_A, SMALL_B, 1)
    assert rep.details["psi"] == pytest.approx(5.8279, abs=1e-4)
    with pytest.raises(FeasibilityError):
        check_interpolation_inequality(param, SMALL, SMALL_A, SMALL_B, 4)


def test_corollary_examples():
    param = ConstrainedHybridParam(SMALL_A, SMALL_B, Fraction(3, 4))
    assert check_corollary_average(param, SMALL, SMALL_A, SMALL_B).passed
    rep = check_corollary_average(edge_count, SMALL, SMALL_A, SMALL_B)
    # floor(3/2) edges per side on the left, all three on average
    assert rep.passed and rep.lhs == 2 and rep.details["expectation"] == 3
    assert check_corollary_average(ConstrainedHybridParam(A12, B34, 1), FOUR, A12, B34).passed


# ---------------------------------------------------------- subadditivity

def test_subadditivity_example():
    rep = check_subadditivity(FOUR, A12, B34, 0.75)
    assert rep.passed
    assert rep.lhs == pytest.approx(1.0, abs=1e-12)
    p = 0.75
    want = (4 * p - 2) / 3 + 4 * p * p / 3
    assert rep.details["expectation_constrained"] == pytest.approx(want, abs=1e-12)
    assert rep.rhs == pytest.approx(want + psi(2), abs=1e-12)
    assert check_subadditivity(FOUR, A12, B34, 1).passed


def test_subadditivity_preconditions():
    with pytest.raises(PreconditionError):
        check_subadditivity(FOUR, {1, 2, 3, 4}, set(), 0.5)
    with pytest.raises(PreconditionError):
        check_subadditivity(FOUR, {1}, {2, 3, 4}, 0.5)
    with pytest.raises(InvalidInputError):
        check_subadditivity(FOUR, A12, B34, 0.5, mode="guess")


def test_subadditivity_mc():
    d = DegreeSequence((3, 3, 2, 2, 1, 1))
    A, B = frozenset({1, 3, 5}), frozenset({2, 4, 6})
    rep = check_subadditivity(d, A, B, 0.75, mode="mc", samples=2000, seed=2)
    assert rep.passed and rep.details["stderr"] > 0
    assert rep == check_subadditivity(d, A, B, 0.75, mode="mc", samples=2000, seed=2)
    exact = check_subadditivity(d, A, B, 0.75)
    assert abs(rep.lhs - exact.lhs) <= 4 * rep.details["stderr"] + 1e-9


# ------------------------------------------------------------- sweeps

def test_class_polynomials_match_scalar_F():
    for d, A, B in itertools.islice(
            ((d, A, B) for d, A, B in enumerable_instances(7, 5) if A and B), 0, None, 7):
        polys = class_polynomials(d, A, B)
        for t, (num, w) in polys.items():
            for p in (Fraction(1, 3), Fraction(3, 4)):
                got = sum(c * p**j for j, c in enumerate(num)) / w
                assert got == F_value(ConstrainedHybridParam(A, B, p), d, A, B, t)


def test_interpolation_sweep_small():
    for d, A, B in enumerable_instances(8):
        if A and B:
            sw = interpolation_sweep(d, A, B, (Fraction(1, 2), Fraction(3, 4), 1))
            assert not sw.failures, (d, A, sw.failures)


def test_sweep_jsonl():
    rows = [json.loads(line) for line in sweep_jsonl(enumerable_instances(3), increments=True)]
    assert rows and all({"degrees", "A", "B", "increments"} <= set(r) for r in rows)
    both = [r for r in rows if r["A"] and r["B"]]
    assert both and all(r["interpolation"]["failures"] == [] for r in both)


def test_report_json():
    rep = CheckReport.compare(1, 2)
    assert json.loads(rep.to_json()) == {"passed": True, "lhs": 1.0, "rhs": 2.0, "slack": 1.0, "witness": ""}
    bad = CheckReport.compare(3, 2, witness="here")
    assert not bad.passed and bad.witness == "here"
