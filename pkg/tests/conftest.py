"""
Shared fixtures: the three kinds of coefficient fields and a small catalog.
"""
from fractions import Fraction

import pytest
from hypothesis import settings as hypothesis_settings

from app.algebra.fields import ExactField
from app.algebra.polys import Poly, RatFunc
from app.schemas.schemas import NumberFieldSpec


hypothesis_settings.register_profile("algebra", max_examples=40, deadline=None)
hypothesis_settings.load_profile("algebra")


@pytest.fixture
def Q() -> ExactField:
    return ExactField.rational()


@pytest.fixture
def Qw() -> ExactField:
    """Q(w) with w^2 + w + 1 = 0."""
    return ExactField.from_spec(NumberFieldSpec(generator="w", minpoly=(Fraction(1), Fraction(1), Fraction(1))))


@pytest.fixture
def Qi() -> ExactField:
    return ExactField.from_spec(NumberFieldSpec(generator="i", minpoly=(Fraction(1), Fraction(0), Fraction(1))))


@pytest.fixture
def Qa() -> ExactField:
    return ExactField.parameter_field("a")


def poly(field: ExactField, *values) -> Poly:
    """Polynomial from low-first coefficients."""
    return Poly.from_values(field, values)


def ratfunc(field: ExactField, num, den=(1,)) -> RatFunc:
    return RatFunc(Poly.from_values(field, num), Poly.from_values(field, den))


SMALL_CATALOG = """\
# two entries for the loader and verification tests
id: quad-symmetric
class: quadratic
below: (p,1/2,q)
above: (p,p,2q)
degree: 2
pattern: 1+1=2=2
phi: 4*x*(1-x)
tilde: a, b, (a+b+1)/2
params: a/2, b/2, (a+b+1)/2
samples: b=1/3,2/5

id: cyclic-3
class: cyclic
below: (1,p,p)
above: (1,3p,3p)
degree: 3
pattern: 1+1+1=3=3
phi: 1-(1-x)^3
tilde: 1+3*a, 1, 2
params: 1+a, 1, 2
theta: (1-(1-x)^3)/(3*x)
"""


@pytest.fixture
def catalog_file(tmp_path):
    path = tmp_path / "catalog.txt"
    path.write_text(SMALL_CATALOG)
    return path
