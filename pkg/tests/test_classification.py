from collections import Counter

import pytest

from app.algebra.polys import INFINITY
from app.catalog.tables import EndomorphismRing, TableName, count_rows, find_rows, get_table
from app.schemas.schemas import CandidateStatus, ExponentTriple, RestrictionQuery
from app.services.classification import (
    admissible_degrees,
    below_triple,
    composition_label,
    critical_values,
    decompose_covering,
    enumerate_candidates,
    enumerate_parametric,
    hyperbolic_bounds,
    is_norm,
    moebius_equivalent,
    row_status,
)
from tests.conftest import ratfunc


KNOWN = CandidateStatus.COVERING_KNOWN
NO = CandidateStatus.NO_COVERING


@pytest.mark.parametrize(
    "denominators, expected",
    [((2,), [2]), ((), [1]), ((2, 3), [3, 4, 6])],
)
def test_admissible_degrees(denominators, expected):
    assert admissible_degrees(RestrictionQuery(denominators=denominators, degree_bound=6)) == expected


def test_query_normalizes_denominators():
    q = RestrictionQuery(denominators=(3, 2))
    assert q.denominators == (2, 3)
    assert str(below_triple(q)) == "(1/2,1/3,p)"
    with pytest.raises(ValueError):
        RestrictionQuery(denominators=(2, 2, 2, 2))


def test_candidates_with_one_free_parameter():
    candidates = enumerate_candidates(RestrictionQuery(denominators=(2, 3), degree_bound=6))
    counts = Counter((c.degree, c.status) for c in candidates)
    assert counts == Counter({(3, KNOWN): 1, (4, KNOWN): 1, (4, NO): 1, (6, KNOWN): 2, (6, NO): 1})

    cubic = [c for c in candidates if c.degree == 3][0]
    assert cubic.above.sorted_key() == ExponentTriple.parse("(1/2,p,2p)").sorted_key()
    assert str(cubic.patterns[0]) == "2+1=3=2+1"
    assert cubic.source == TableName.ONE_PARAMETER.value


def test_hyperbolic_bounds():
    bounds = hyperbolic_bounds()
    for entry in [(2, 3, 7, 8), (2, 3, 7, 9), (2, 3, 7, 10), (2, 4, 5, 6)]:
        assert entry in bounds
    assert all(k3 <= 10 and d <= 24 for _, _, k3, d in bounds)


def test_parametric_rows_instantiate():
    candidates = enumerate_parametric()
    assert len(candidates) == 3 * count_rows(TableName.ELLIPTIC) == 45
    gaussian = [c for c in candidates if c.source == "elliptic:4n"]
    assert [c.degree for c in gaussian] == [4, 8, 12]
    assert [c.status for c in gaussian] == [KNOWN, KNOWN, NO]


@pytest.mark.parametrize(
    "m, ring, expected",
    [
        (5, EndomorphismRing.GAUSSIAN, True),
        (3, EndomorphismRing.GAUSSIAN, False),
        (3, EndomorphismRing.EISENSTEIN, True),
        (7, EndomorphismRing.EISENSTEIN, True),
        (2, EndomorphismRing.EISENSTEIN, False),
        (0, EndomorphismRing.GAUSSIAN, False),
    ],
)
def test_is_norm(m, ring, expected):
    assert is_norm(m, ring) is expected


def test_quotient_row_status():
    row = [r for r in get_table(TableName.ELLIPTIC) if r.quadratic_factor == 2][0]
    assert row_status(row, 6) == KNOWN
    assert row_status(row, 8) == KNOWN
    assert row_status(row, 10) == NO


def test_table_sizes():
    assert count_rows(TableName.ONE_PARAMETER) == 8
    assert count_rows(TableName.ELLIPTIC) == 15
    assert count_rows(TableName.HYPERBOLIC) == 13
    assert count_rows(TableName.RECORDED) == 1


def test_find_rows_by_pattern():
    below = ExponentTriple.parse("(1/2,1/3,p)")
    above = ExponentTriple.parse("(1/3,2p,2p)")
    rows = find_rows(below, above, 4)
    assert len(rows) == 1
    assert rows[0].status == NO


def test_critical_values_of_quadratic(Q):
    assert critical_values(ratfunc(Q, (0, 4, -4))) == [Q.one, INFINITY]


def test_decompose_composite_quadratic(Q):
    g = ratfunc(Q, (0, 4, -4))
    f = g.compose(g)
    chains = decompose_covering(f, [g])
    assert len(chains) == 1
    chain = chains[0]
    assert composition_label(chain) == "2x2"
    assert chain[1].compose(chain[0]) == f
    assert composition_label([g]) == "indecomposable"


def test_moebius_equivalence(Q):
    g = ratfunc(Q, (0, 4, -4))
    assert moebius_equivalent(ratfunc(Q, (0, -4), (1, -2, 1)), g)
    assert not moebius_equivalent(g, ratfunc(Q, (0, 0, 1)))
