from fractions import Fraction

import pytest

from app.catalog.loader import ENTRY_CLASSES, CatalogLoader, load_catalog, number_field
from app.core.config import parse_samples, settings
from app.core.errors import CatalogSchemaError
from tests.conftest import SMALL_CATALOG


def test_load_small_catalog(catalog_file):
    entries = load_catalog(catalog_file)
    assert [e.id for e in entries] == ["quad-symmetric", "cyclic-3"]

    quad, cyclic = entries
    assert quad.line == 2 and cyclic.line == 13
    assert quad.entry_class == "quadratic"
    assert quad.phi.degree == 2
    assert str(quad.pattern) == "1+1=2=2"
    assert quad.parameters == ("a", "b")
    assert quad.formal_parameter == "a"
    assert quad.sampled_parameters == ["b"]
    assert quad.sample_plan([Fraction(1, 5)]) == [{"b": Fraction(1, 3)}, {"b": Fraction(2, 5)}]
    assert quad.working_field().is_parameter

    assert cyclic.sampled_parameters == []
    assert cyclic.sample_plan([Fraction(1, 5)]) == [{}]
    assert cyclic.theta_text() == ("(1-(1-x)^3)/(3*x)", False)


def _broken(old: str, new: str) -> str:
    assert old in SMALL_CATALOG
    return SMALL_CATALOG.replace(old, new, 1)


@pytest.mark.parametrize(
    "old, new, line",
    [
        ("class: quadratic", "class: septic", 2),
        ("samples: b=1/3,2/5", "sample: b=1/3,2/5", 11),
        ("id: cyclic-3", "id: quad-symmetric", 13),
        ("phi: 4*x*(1-x)", "phi: 4*x*(1-x)+1", 2),
        ("degree: 2", "degree: 3", 2),
        ("pattern: 1+1+1=3=3", "pattern: 1+1=2=2", 13),
    ],
)
def test_schema_violations(old, new, line):
    with pytest.raises(CatalogSchemaError) as info:
        CatalogLoader().loads(_broken(old, new), "broken.txt")
    assert info.value.exit_status == 2
    assert info.value.line == line
    assert info.value.location == f"broken.txt:{line}"


def test_phi_may_not_carry_parameters():
    with pytest.raises(CatalogSchemaError):
        CatalogLoader().loads(_broken("phi: 4*x*(1-x)", "phi: 4*b*x*(1-x)"))


def test_number_fields():
    assert number_field("Q").is_rational
    field = number_field("w", "w^2+w+1")
    assert field.degree == 2
    with pytest.raises(CatalogSchemaError):
        number_field("w")
    with pytest.raises(CatalogSchemaError):
        number_field("Q", "w^2+1")


def test_shipped_catalog():
    entries = load_catalog()
    assert len(entries) == 68
    ids = {e.id for e in entries}
    assert {"quad-symmetric", "cyclic-3"} <= ids
    assert {e.entry_class for e in entries} <= ENTRY_CLASSES


def test_sample_settings():
    assert parse_samples("1/5, 3/7,-2/9") == [Fraction(1, 5), Fraction(3, 7), Fraction(-2, 9)]
    assert parse_samples("a=1/2") == [Fraction(1, 2)]
    assert settings.sample_values() == parse_samples(settings.HPG_SAMPLES)
