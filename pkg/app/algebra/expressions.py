"""
Plain-text formula parsing and exact evaluation.

Formulas use ``^`` or ``**`` for powers, ``sqrt``, the variable ``x``, the
field generator, the formal parameter and named radicals declared per
catalog entry. Parsing is done by sympy; evaluation walks the expression
tree and produces raw field constants, :class:`RatFunc` values or
:class:`LocalExpansion` values.
"""
import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Optional

from sympy import Add, Float, Integer, Mul, Pow, Rational, Symbol
from sympy.core.expr import Expr
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from app.algebra.fields import ExactField
from app.algebra.polys import RatFunc
from app.algebra.series import LocalExpansion, RadicalFactor, exact_power
from app.core.errors import PatternParseError, SeriesError


logger = logging.getLogger(__name__)

TRANSFORMATIONS = standard_transformations + (convert_xor,)
VARIABLE = "x"


def split_top_level(text: str, sep: str = ",") -> List[str]:
    """Split on ``sep`` outside parentheses and brackets."""
    parts, depth, chunk = [], 0, ""
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append(chunk.strip())
            chunk = ""
        else:
            chunk += ch
    if chunk.strip():
        parts.append(chunk.strip())
    return parts


def parse_formula(text: str, names: Iterable[str] = ()) -> Expr:
    """
    Parse a formula over the symbols ``x`` and ``names``.

    Raises:
        PatternParseError: syntax errors, floats or unknown symbols
    """
    allowed = {VARIABLE, *names}
    local_dict = {name: Symbol(name) for name in allowed}
    try:
        expr = parse_expr(text, local_dict=local_dict, transformations=TRANSFORMATIONS, evaluate=True)
    except (SyntaxError, TypeError, ValueError) as exc:
        position = getattr(exc, "offset", None) or 0
        raise PatternParseError(f"cannot parse formula {text!r}: {exc}", position, text) from exc
    except Exception as exc:  # tokenizer errors surface under several names
        raise PatternParseError(f"cannot parse formula {text!r}: {exc}", 0, text) from exc

    if not isinstance(expr, Expr):
        raise PatternParseError(f"{text!r} is not an algebraic expression", 0, text)
    if expr.atoms(Float):
        raise PatternParseError(f"floating point literal in {text!r}", 0, text)
    unknown = {s.name for s in expr.free_symbols} - allowed
    if unknown:
        name = sorted(unknown)[0]
        raise PatternParseError(f"unknown symbol {name!r}", max(text.find(name), 0), text)
    return expr


class FormulaEvaluator:
    """
    Evaluates parsed formulas exactly over one field.

    Args:
        field: coefficient field
        constants: symbol name -> raw field element (generator, parameter,
            sampled second parameter)
        precision: absolute x-precision of produced expansions
        radicals: symbol name -> LocalExpansion for declared radicals
    """

    def __init__(
        self,
        field: ExactField,
        constants: Optional[Dict[str, object]] = None,
        precision: int = 25,
        radicals: Optional[Dict[str, LocalExpansion]] = None,
    ):
        self.field = field
        self.constants = dict(constants or {})
        self.precision = precision
        self.radicals = dict(radicals or {})

    @classmethod
    def for_field(cls, field: ExactField, precision: int = 25, **extra) -> "FormulaEvaluator":
        """Evaluator with the field generator or parameter bound to its name."""
        constants = {}
        if field.is_algebraic:
            constants[field.spec.generator] = field.generator()
        if field.is_parameter:
            constants[field.parameter] = field.generator()
        constants.update({k: field.convert(v) for k, v in extra.items()})
        return cls(field, constants, precision)

    @property
    def names(self) -> List[str]:
        return sorted(set(self.constants) | set(self.radicals))

    def parse(self, text: str) -> Expr:
        return parse_formula(text, self.names)

    def bind_radical(self, name: str, text: str) -> LocalExpansion:
        """Declare ``name = text`` for later formulas."""
        value = self.expansion(self.parse(text))
        self.radicals[name] = value
        return value

    # Constants
    def constant(self, expr) -> object:
        field = self.field
        if isinstance(expr, str):
            expr = self.parse(expr)
        if isinstance(expr, (Integer, Rational)) or expr.is_Rational:
            return field.convert(Fraction(int(expr.p), int(expr.q)))
        if isinstance(expr, Symbol):
            if expr.name not in self.constants:
                raise PatternParseError(f"{expr.name!r} is not a constant here", 0, str(expr))
            return self.constants[expr.name]
        if isinstance(expr, Add):
            total = field.zero
            for arg in expr.args:
                total = total + self.constant(arg)
            return total
        if isinstance(expr, Mul):
            total = field.one
            for arg in expr.args:
                total = total * self.constant(arg)
            return total
        if isinstance(expr, Pow):
            base, exp = expr.args
            if not exp.is_Integer:
                raise PatternParseError(f"non-integer power of a constant in {expr}", 0, str(expr))
            value = self.constant(base)
            k = int(exp)
            if k < 0:
                return (field.one / value) ** (-k) if k != -1 else field.one / value
            return value ** k if k else field.one
        raise PatternParseError(f"unsupported construct {expr.func.__name__} in {expr}", 0, str(expr))

    def constants_list(self, text: str) -> List[object]:
        return [self.constant(part) for part in split_top_level(text)]

    # Rational functions
    def ratfunc(self, expr) -> RatFunc:
        field = self.field
        if isinstance(expr, str):
            expr = self.parse(expr)
        if VARIABLE not in {s.name for s in expr.free_symbols}:
            return RatFunc.constant(field, self.constant(expr))
        if isinstance(expr, Symbol):
            return RatFunc.x(field)
        if isinstance(expr, Add):
            total = RatFunc.constant(field, 0)
            for arg in expr.args:
                total = total + self.ratfunc(arg)
            return total
        if isinstance(expr, Mul):
            total = RatFunc.constant(field, 1)
            for arg in expr.args:
                total = total * self.ratfunc(arg)
            return total
        if isinstance(expr, Pow):
            base, exp = expr.args
            if not exp.is_Integer:
                raise PatternParseError(f"{expr} is not a rational function", 0, str(expr))
            return self.ratfunc(base) ** int(exp)
        raise PatternParseError(f"unsupported construct {expr.func.__name__} in {expr}", 0, str(expr))

    def is_rational(self, expr) -> bool:
        """True when ``expr`` is a rational function of x with no radicals."""
        names = {s.name for s in expr.free_symbols}
        if names & set(self.radicals):
            return False
        return all(p.args[1].is_Integer for p in expr.atoms(Pow))

    # Local expansions
    def expansion(self, expr) -> LocalExpansion:
        field = self.field
        if isinstance(expr, str):
            expr = self.parse(expr)
        names = {s.name for s in expr.free_symbols}
        if VARIABLE not in names and not (names & set(self.radicals)):
            return LocalExpansion.constant(field, self.constant(expr), self.precision)
        if self.is_rational(expr):
            return LocalExpansion.from_ratfunc(self.ratfunc(expr), self.precision)
        if isinstance(expr, Symbol):
            return self.radicals[expr.name]
        if isinstance(expr, Add):
            total = None
            for arg in expr.args:
                term = self.expansion(arg)
                total = term if total is None else total + term
            return total
        if isinstance(expr, Mul):
            total = None
            for arg in expr.args:
                term = self.expansion(arg)
                total = term if total is None else total * term
            return total
        if isinstance(expr, Pow):
            base, exp = expr.args
            return self.expansion(base).pow(self.constant(exp))
        raise PatternParseError(f"unsupported construct {expr.func.__name__} in {expr}", 0, str(expr))

    # Radical products
    def radical_factor(self, expr, normalized: bool = False) -> RadicalFactor:
        """
        A product of constants and powers of rational functions as a
        :class:`RadicalFactor` whose bases are 1 at x = 0.

        With ``normalized`` the constant is fixed to 1 instead of being
        computed from the values of the bases at 0.

        Raises:
            PatternParseError: a factor is not a power of a rational function
            SeriesError: a base vanishes at 0 or the constant has no exact power
        """
        field = self.field
        if isinstance(expr, str):
            expr = self.parse(expr)
        if VARIABLE not in {s.name for s in expr.free_symbols}:
            return RadicalFactor(field, (), self.constant(expr))
        if self.is_rational(expr):
            return self._radical_base(self.ratfunc(expr), field.one, normalized)
        if isinstance(expr, Mul):
            # rational arguments are multiplied out first so that x^-1 * (x + ...) cancels
            rational = RatFunc.constant(field, 1)
            parts = []
            for arg in expr.args:
                if self.is_rational(arg):
                    rational = rational * self.ratfunc(arg)
                else:
                    parts.append(self.radical_factor(arg, normalized))
            parts.append(self._radical_base(rational, field.one, normalized))
            factors, constant = (), field.one
            for part in parts:
                factors += part.factors
                constant = constant * part.constant
            return RadicalFactor(field, factors, field.one if normalized else constant)
        if isinstance(expr, Pow) and not expr.args[1].is_Integer:
            base, exp = expr.args
            return self._radical_base(self.ratfunc(base), self.constant(exp), normalized)
        raise PatternParseError(f"{expr} is not a product of radicals", 0, str(expr))

    def _radical_base(self, f: RatFunc, e, normalized: bool = False) -> RadicalFactor:
        field = self.field
        factors, constant = [], field.one
        for poly, power in ((f.num, e), (f.den, -e)):
            c0 = poly(0)
            if not c0:
                raise SeriesError(f"radical base {poly.show()} vanishes at x = 0", location="non-unit-leading-term")
            if not normalized:
                constant = constant * exact_power(field, c0, power)
            if not poly.is_constant:
                factors.append((poly * (field.one / c0), power))
        return RadicalFactor(field, tuple(factors), constant)
