from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from app.catalog.loader import load_catalog
from app.core.errors import InvalidParameterError
from app.schemas.schemas import AffineForm, CheckVerdict
from app.services.ramification import analyze_covering, parse_pattern
from app.services.verification import (
    VerificationEngine,
    exponent_multiset,
    mutate,
    mutation_sites,
    sample_mutants,
    select_entries,
)


@pytest.fixture
def small_catalog(catalog_file):
    return load_catalog(catalog_file)


def test_small_catalog_passes(small_catalog):
    engine = VerificationEngine(small_catalog, order=12, samples=[Fraction(1, 5)])
    summary = engine.verify_all()
    assert summary.failed == []
    assert summary.passed == 2
    assert [c.entry_id for c in summary.certificates] == ["cyclic-3", "quad-symmetric"]


def test_identity_certificate_records_samples(small_catalog):
    engine = VerificationEngine(small_catalog, order=10)
    quad = select_entries(small_catalog, ids=["quad-symmetric"])[0]
    cert = engine.verify_identity(quad)
    assert cert.verdict == CheckVerdict.PASS
    assert cert.samples == ["b=1/3", "b=2/5"]


def test_ramification_certificate(small_catalog):
    engine = VerificationEngine(small_catalog, order=10)
    quad = select_entries(small_catalog, ids=["quad-symmetric"])[0]
    cert = engine.verify_ramification(quad)
    assert [c.name for c in cert.checks] == ["pattern", "hurwitz", "exponents"]
    assert cert.verdict == CheckVerdict.PASS
    assert str(cert.report.pattern) == "1+1=2=2"


def test_mutants_are_rejected(small_catalog):
    engine = VerificationEngine(small_catalog, order=10)
    summary = engine.verify_all([mutate(entry) for entry in small_catalog])
    assert sorted(summary.failed) == ["cyclic-3", "quad-symmetric"]


def test_mutation_sites(small_catalog):
    quad = select_entries(small_catalog, ids=["quad-symmetric"])[0]
    assert mutation_sites(quad, 10) == [
        ("phi-numerator", 0),
        ("phi-numerator", 1),
        ("phi-numerator", 2),
        ("phi-denominator", 0),
        ("params", 0),
        ("params", 1),
        ("params", 2),
        ("theta", 0),
    ]
    assert mutation_sites(quad, 1) == [
        ("phi-numerator", 0),
        ("phi-numerator", 1),
        ("phi-denominator", 0),
        ("params", 0),
        ("params", 1),
        ("params", 2),
        ("theta", 0),
    ]


def test_mutated_records(small_catalog):
    quad, cyclic = small_catalog
    assert mutate(quad, ("params", 1)).record.params == "a/2, (b/2)+1, (a+b+1)/2"
    assert mutate(cyclic, ("theta", 0)).record.theta == "((1-(1-x)^3)/(3*x))*(1+x)"
    assert mutate(quad, ("theta", 0)).record.theta == "1+x"
    assert mutate(quad, ("phi-denominator", 0)).phi == quad.phi / 2
    with pytest.raises(InvalidParameterError):
        mutate(quad, ("params", 3))


def test_every_mutation_site_is_rejected(small_catalog):
    engine = VerificationEngine(small_catalog, order=8)
    mutants = [mutate(entry, site) for entry in small_catalog for site in mutation_sites(entry, 8)]
    summary = engine.verify_all(mutants)
    assert len(summary.certificates) == 17
    assert summary.passed == 0


def test_sampled_mutants_are_reproducible(small_catalog):
    first = sample_mutants(small_catalog, 2, 8, seed=7)
    second = sample_mutants(small_catalog, 2, 8, seed=7)
    assert [m.record for m in first] == [m.record for m in second]
    assert sorted(m.id for m in first) == ["cyclic-3", "quad-symmetric"]


@pytest.mark.slow
@settings(max_examples=3, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_shipped_catalog_mutants_are_rejected(seed):
    catalog = load_catalog()
    mutants = sample_mutants(catalog, 10, 12, seed=seed)
    summary = VerificationEngine(catalog, order=12).verify_all(mutants)
    assert len(summary.certificates) == 10
    assert summary.passed == 0


def test_degree_nine_fermat_entry():
    fermat = select_entries(load_catalog(), ids=["elliptic-fermat-9"])[0]
    report = analyze_covering(fermat.phi)
    assert report.pattern.fibers == parse_pattern("3+3+1+1+1=3+3+3=3+3+3").fibers
    assert report.hurwitz_defect == 0
    assert report.is_belyi
    cert = VerificationEngine([fermat], order=12).verify_entry(fermat)
    assert cert.verdict == CheckVerdict.PASS


def test_threaded_run_matches_serial(small_catalog):
    engine = VerificationEngine(small_catalog, order=8)
    serial = engine.verify_all(jobs=1)
    threaded = engine.verify_all(jobs=2)
    assert [c.verdict for c in serial.certificates] == [c.verdict for c in threaded.certificates]


def test_select_entries(small_catalog):
    assert [e.id for e in select_entries(small_catalog, classes=["cyclic"])] == ["cyclic-3"]
    assert select_entries(small_catalog, classes=["cyclic"], ids=["quad-symmetric"]) == []


def test_exponent_differences_compare_up_to_sign():
    p = AffineForm(v=Fraction(1))
    assert exponent_multiset([p, p.scale(-1)]) == exponent_multiset([p, p])


@pytest.mark.slow
def test_shipped_catalog_certifies():
    catalog = load_catalog()
    summary = VerificationEngine(catalog, order=16).verify_all(jobs=2)
    assert summary.failed == []
