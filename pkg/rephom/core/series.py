"""
Truncated Series Module

``PoincareSeries`` holds a multivariate series with exact rational
coefficients in a sympy sparse polynomial ring. The first variable is always
``z`` (homological degree); any further variables (``q``, ``t``) track model
weights. Each variable may carry an exclusive truncation bound, and every
arithmetic result is truncated with ``rs_trunc``.
"""

from typing import Any, Dict, Iterable, Mapping, Optional, Sequence, Tuple

from sympy.polys.domains import QQ
from sympy.polys.ring_series import rs_series_inversion, rs_trunc
from sympy.polys.rings import PolyRing, ring

from rephom.core.errors import InputError
from rephom.core.linalg import format_rational, to_rational

Exponents = Tuple[int, ...]

WEIGHT_VARIABLES = ("q", "t")


def series_variables(weight_rank: int) -> Tuple[str, ...]:
    """Variables for a series with ``weight_rank`` weight components."""
    if weight_rank > len(WEIGHT_VARIABLES):
        raise InputError(f"at most {len(WEIGHT_VARIABLES)} weight components are supported")
    return ("z",) + WEIGHT_VARIABLES[:weight_rank]


def series_ring(variables: Sequence[str]) -> PolyRing:
    # sympy caches rings, so equal variable tuples share one ring object.
    return ring(",".join(variables), QQ)[0]


class PoincareSeries:
    """
    Truncated multivariate series over QQ.

    Attributes:
        variables (Tuple[str, ...]): variable names, ``z`` first
        bounds (Dict[str, int]): exclusive exponent bound per truncated variable
        poly (PolyElement): the truncated series
    """

    __hash__ = None

    def __init__(
        self,
        variables: Sequence[str] = ("z",),
        poly: Any = None,
        bounds: Optional[Mapping[str, Optional[int]]] = None,
    ):
        self.variables = tuple(variables)
        if not self.variables or self.variables[0] != "z":
            raise InputError(f"series variables must start with 'z', got {self.variables}")
        self.ring = series_ring(self.variables)
        self.bounds = {v: int(b) for v, b in (bounds or {}).items() if b is not None}
        unknown = set(self.bounds) - set(self.variables)
        if unknown:
            raise InputError(f"bounds given for unknown variables {sorted(unknown)}")
        self.poly = self._truncate(self.ring.zero if poly is None else poly)

    def _truncate(self, poly):
        for name, bound in self.bounds.items():
            poly = rs_trunc(poly, self.ring.gens[self.variables.index(name)], bound)
        return poly

    def _like(self, poly, bounds: Optional[Mapping[str, int]] = None) -> "PoincareSeries":
        return PoincareSeries(self.variables, poly, self.bounds if bounds is None else bounds)

    @classmethod
    def from_terms(
        cls,
        variables: Sequence[str],
        terms: Mapping[Exponents, Any],
        bounds: Optional[Mapping[str, Optional[int]]] = None,
    ) -> "PoincareSeries":
        """Build from a map exponent tuple -> coefficient."""
        R = series_ring(variables)
        poly = R.from_dict({tuple(e): to_rational(c) for e, c in terms.items() if c}) if terms else R.zero
        return cls(variables, poly, bounds)

    @classmethod
    def one(cls, variables: Sequence[str] = ("z",), bounds=None) -> "PoincareSeries":
        return cls(variables, series_ring(variables).one, bounds)

    @classmethod
    def geometric(cls, variables: Sequence[str], exponents: Exponents, bounds) -> "PoincareSeries":
        """
        The truncated expansion of ``1 / (1 - m)`` for a monomial ``m``.

        Raises:
            InputError: if no truncated variable occurs in ``m``, so the
                expansion would be infinite
        """
        R = series_ring(variables)
        bounds = {v: b for v, b in (bounds or {}).items() if b is not None}
        pivot = next((v for v, e in zip(variables, exponents) if e > 0 and v in bounds), None)
        if pivot is None:
            raise InputError(f"1/(1 - m) for m with exponents {exponents} needs a truncated variable")
        monomial = R.from_dict({tuple(exponents): QQ(1)})
        inverse = rs_series_inversion(R.one - monomial, R.gens[variables.index(pivot)], bounds[pivot])
        return cls(variables, inverse, bounds)

    def _merged_bounds(self, other: "PoincareSeries") -> Dict[str, int]:
        if self.variables != other.variables:
            raise InputError(f"series in {self.variables} and {other.variables} cannot be combined")
        merged = dict(self.bounds)
        for name, bound in other.bounds.items():
            merged[name] = min(bound, merged.get(name, bound))
        return merged

    def __add__(self, other: "PoincareSeries") -> "PoincareSeries":
        return self._like(self.poly + other.poly, self._merged_bounds(other))

    def __sub__(self, other: "PoincareSeries") -> "PoincareSeries":
        return self._like(self.poly - other.poly, self._merged_bounds(other))

    def __neg__(self) -> "PoincareSeries":
        return self._like(-self.poly)

    def __mul__(self, other: "PoincareSeries") -> "PoincareSeries":
        bounds = self._merged_bounds(other)
        left, right = self._like(self.poly, bounds).poly, self._like(other.poly, bounds).poly
        return self._like(left * right, bounds)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PoincareSeries):
            return NotImplemented
        if self.variables != other.variables:
            return False
        bounds = self._merged_bounds(other)
        return self._like(self.poly, bounds).poly == other._like(other.poly, bounds).poly

    def truncated(self, bounds: Mapping[str, int]) -> "PoincareSeries":
        merged = dict(self.bounds)
        for name, bound in bounds.items():
            merged[name] = min(bound, merged.get(name, bound))
        return self._like(self.poly, merged)

    def coefficient(self, exponents: Exponents) -> Any:
        return self.poly.get(tuple(exponents), QQ(0))

    def coefficients(self) -> Dict[Exponents, Any]:
        """Nonzero coefficients in ascending exponent order."""
        return {e: self.poly[e] for e in sorted(self.poly.keys())}

    def degree_coefficients(self) -> Dict[int, Any]:
        """Coefficients of ``z^n`` with every weight variable set to 1."""
        totals: Dict[int, Any] = {}
        for exps, coeff in self.poly.items():
            totals[exps[0]] = totals.get(exps[0], QQ(0)) + coeff
        return {n: c for n, c in sorted(totals.items()) if c}

    def forget_weights(self) -> "PoincareSeries":
        """Specialize every weight variable to 1."""
        bound = {"z": self.bounds["z"]} if "z" in self.bounds else {}
        return PoincareSeries.from_terms(("z",), {(n,): c for n, c in self.degree_coefficients().items()}, bound)

    def first_mismatch(self, other: "PoincareSeries") -> Optional[Tuple[Exponents, Any, Any]]:
        """Lowest monomial where two series differ, with both coefficients."""
        bounds = self._merged_bounds(other)
        mine, theirs = self._like(self.poly, bounds).poly, other._like(other.poly, bounds).poly
        for exps in sorted(set(mine.keys()) | set(theirs.keys())):
            a, b = mine.get(exps, QQ(0)), theirs.get(exps, QQ(0))
            if a != b:
                return exps, a, b
        return None

    def monomial_string(self, exponents: Exponents) -> str:
        order = list(range(1, len(self.variables))) + [0]
        parts = []
        for i in order:
            e = exponents[i]
            if e == 1:
                parts.append(self.variables[i])
            elif e:
                parts.append(f"{self.variables[i]}^{e}")
        return "*".join(parts)

    def __str__(self) -> str:
        if not self.poly:
            return "0"
        pieces = []
        for exps, coeff in self.coefficients().items():
            monomial = self.monomial_string(exps)
            text = format_rational(abs(coeff))
            if not monomial:
                body = text
            elif text == "1":
                body = monomial
            else:
                body = f"{text}*{monomial}"
            sign = "-" if coeff < 0 else "+"
            pieces.append((sign, body))
        first_sign, first_body = pieces[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"PoincareSeries({self}; bounds={self.bounds})"


def free_graded_series(
    variables: Sequence[str],
    generators: Iterable[Exponents],
    bounds: Mapping[str, Optional[int]],
) -> PoincareSeries:
    """
    Series of the free graded-commutative algebra on the given generators.

    A generator whose ``z`` exponent is odd contributes ``1 + m``; an even one
    contributes ``1 / (1 - m)``.
    """
    result = PoincareSeries.one(variables, bounds)
    R = result.ring
    for exps in generators:
        exps = tuple(exps)
        if exps[0] % 2:
            factor = PoincareSeries(variables, R.one + R.from_dict({exps: QQ(1)}), bounds)
        else:
            factor = PoincareSeries.geometric(variables, exps, bounds)
        result = result * factor
    return result
