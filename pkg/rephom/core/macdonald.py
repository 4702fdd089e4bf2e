"""
Constant Term Module

Root systems built from Cartan matrices, truncated series on the group ring
of the root lattice, and the two constant-term identities that fall out of
comparing Euler characteristics of invariant representation homology:

- the q-identity, as the equality chi_ct_q == chi_product_q, where
  chi_ct_q = (1/|W|) prod_j (1 - q^j)^l CT{prod_{j=0..r} prod_alpha (1 - q^j e^alpha)};
- the (q,t)-identity, truncated mod (q^Nq, t^Nt).

Coefficients in q and t are kept in ``PoincareSeries`` objects whose ``z``
exponent is always 0.
"""

import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel
from sympy.polys.domains import QQ
from sympy.polys.ring_series import rs_trunc

from rephom.core.errors import InputError
from rephom.core.lie import LieAlgebraData
from rephom.core.models import QuillenModel
from rephom.core.rep_complex import build_rep_complex, euler_series, vanishing_bound
from rephom.core.series import PoincareSeries, series_ring

logger = logging.getLogger(__name__)

Root = Tuple[int, ...]

NORMALIZATION_NOTE = (
    "CT{prod_{j=0..r} prod_alpha (1 - q^j e^alpha)} equals |W| prod_i prod_{j=1..r} "
    "(1 - q^{j+m_i(r+1)})/(1 - q^j); the q-identity as usually displayed omits this |W| factor. "
    "The verified statement is chi_ct_q == chi_product_q, with 1/|W| kept in chi_ct_q and in the "
    "(q,t) left-hand side."
)


@dataclass(frozen=True)
class RootSystem:
    """
    A root system in the basis of simple roots.

    Attributes:
        type_name (str): e.g. ``A2``, ``G2``, ``A1xA1``
        cartan (Tuple[Tuple[int, ...], ...]): a_ij = <alpha_j, alpha_i^vee>
        positive (Tuple[Root, ...]): positive roots ordered by height
        exponents (Tuple[int, ...]): ascending exponents
        weyl_order (int): prod (m_i + 1)
    """

    type_name: str
    cartan: Tuple[Tuple[int, ...], ...]
    positive: Tuple[Root, ...]
    exponents: Tuple[int, ...]
    weyl_order: int

    @property
    def rank(self) -> int:
        return len(self.cartan)

    @property
    def roots(self) -> Tuple[Root, ...]:
        return self.positive + tuple(tuple(-x for x in r) for r in self.positive)

    def pairing(self, beta: Root, i: int) -> int:
        """<beta, alpha_i^vee>."""
        return sum(b * a for b, a in zip(beta, self.cartan[i]))

    def reflect(self, i: int, beta: Root) -> Root:
        shift = self.pairing(beta, i)
        return tuple(b - shift if k == i else b for k, b in enumerate(beta))


def _positive_roots(cartan: Sequence[Sequence[int]]) -> List[Root]:
    # Root strings: beta + alpha_i is a root iff p - <beta, alpha_i^vee> > 0.
    rank = len(cartan)
    simple = [tuple(1 if k == i else 0 for k in range(rank)) for i in range(rank)]
    found = set(simple)
    layer = list(simple)
    while layer:
        following = []
        for beta in layer:
            for i in range(rank):
                p = 0
                lowered = list(beta)
                while True:
                    lowered[i] -= 1
                    if tuple(lowered) not in found:
                        break
                    p += 1
                q = p - sum(b * a for b, a in zip(beta, cartan[i]))
                if q > 0:
                    raised = tuple(b + 1 if k == i else b for k, b in enumerate(beta))
                    if raised not in found:
                        found.add(raised)
                        following.append(raised)
        layer = following
    return sorted(found, key=lambda r: (sum(r), tuple(-x for x in r)))


def _exponents(positive: Sequence[Root], rank: int) -> Tuple[int, ...]:
    # The height counts form the partition dual to the exponents.
    counts: Dict[int, int] = {}
    for r in positive:
        counts[sum(r)] = counts.get(sum(r), 0) + 1
    return tuple(sorted(sum(1 for c in counts.values() if c >= i) for i in range(1, rank + 1)))


def _cartan_simple(kind: str, n: int) -> List[List[int]]:
    if kind == "A" and n >= 1:
        return [[2 if i == j else -1 if abs(i - j) == 1 else 0 for j in range(n)] for i in range(n)]
    if kind == "B" and n >= 2:
        cartan = _cartan_simple("A", n)
        cartan[n - 1][n - 2] = -2
        return cartan
    if kind == "G" and n == 2:
        return [[2, -3], [-1, 2]]
    raise InputError(f"unsupported root system type {kind}{n}")


def _block_diagonal(blocks: Sequence[List[List[int]]]) -> List[List[int]]:
    size = sum(len(b) for b in blocks)
    out = [[0] * size for _ in range(size)]
    offset = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                out[offset + i][offset + j] = v
        offset += len(b)
    return out


def from_cartan(type_name: str, cartan: Sequence[Sequence[int]]) -> RootSystem:
    """
    Build a root system from a Cartan matrix.

    Raises:
        InputError: if the matrix is not square with 2 on the diagonal
    """
    rank = len(cartan)
    if any(len(row) != rank for row in cartan) or any(cartan[i][i] != 2 for i in range(rank)):
        raise InputError(f"{type_name}: not a Cartan matrix")
    positive = _positive_roots(cartan)
    exponents = _exponents(positive, rank)
    weyl = 1
    for m in exponents:
        weyl *= m + 1
    return RootSystem(type_name, tuple(tuple(r) for r in cartan), tuple(positive), exponents, weyl)


_TYPE_RE = re.compile(r"([ABG])(\d+)")


@lru_cache(maxsize=None)
def root_system(type_name: str) -> RootSystem:
    """
    Root system for a type such as ``A2``, ``B3``, ``G2`` or a product ``A1xA1``.

    Raises:
        InputError: for an unknown type
    """
    parts = type_name.strip().upper().split("X")
    blocks = []
    for part in parts:
        match = _TYPE_RE.fullmatch(part)
        if not match:
            raise InputError(f"unsupported root system type {type_name!r}")
        blocks.append(_cartan_simple(match.group(1), int(match.group(2))))
    rs = from_cartan(type_name.strip().upper().replace("X", "x"), _block_diagonal(blocks))
    logger.info(
        "root system %s: %d roots, exponents %s, |W| = %d",
        rs.type_name,
        len(rs.roots),
        list(rs.exponents),
        rs.weyl_order,
    )
    return rs


def root_system_of(g: LieAlgebraData) -> RootSystem:
    if not g.root_system_id:
        raise InputError(f"{g.name} has no root system")
    return root_system(g.root_system_id)


class LatticeSeries:
    """
    Finite sums of e^beta over the root lattice with truncated series coefficients.

    Attributes:
        rank (int): lattice rank
        variables (Tuple[str, ...]): coefficient variables, ``z`` first
        bounds (Dict[str, int]): exclusive exponent bounds
        terms (Dict[Root, PolyElement]): nonzero coefficients
    """

    def __init__(self, rank: int, variables: Sequence[str], terms=None, bounds=None):
        self.rank = rank
        self.variables = tuple(variables)
        self.ring = series_ring(self.variables)
        self.bounds = {v: b for v, b in (bounds or {}).items() if b is not None}
        self.terms = {}
        for beta, poly in (terms or {}).items():
            poly = self._truncate(poly)
            if poly:
                self.terms[tuple(beta)] = poly

    def _truncate(self, poly):
        for name, bound in self.bounds.items():
            poly = rs_trunc(poly, self.ring.gens[self.variables.index(name)], bound)
        return poly

    def _monomial(self, exponents: Sequence[int], coeff=1):
        return self.ring.from_dict({tuple(exponents): QQ(coeff)})

    def _like(self, terms) -> "LatticeSeries":
        return LatticeSeries(self.rank, self.variables, terms, self.bounds)

    @classmethod
    def one(cls, rank: int, variables: Sequence[str], bounds=None) -> "LatticeSeries":
        return cls(rank, variables, {(0,) * rank: series_ring(variables).one}, bounds)

    def _within(self, exponents: Sequence[int]) -> bool:
        return all(exponents[self.variables.index(v)] < b for v, b in self.bounds.items())

    def __mul__(self, other: "LatticeSeries") -> "LatticeSeries":
        out: Dict[Root, object] = {}
        for beta, p in self.terms.items():
            for gamma, f in other.terms.items():
                key = tuple(a + b for a, b in zip(beta, gamma))
                out[key] = out.get(key, self.ring.zero) + self._truncate(p * f)
        return self._like(out)

    def __add__(self, other: "LatticeSeries") -> "LatticeSeries":
        out = dict(self.terms)
        for beta, p in other.terms.items():
            out[beta] = out.get(beta, self.ring.zero) + p
        return self._like(out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LatticeSeries):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    __hash__ = None

    def constant_term(self) -> PoincareSeries:
        """Coefficient of e^0."""
        poly = self.terms.get((0,) * self.rank, self.ring.zero)
        return PoincareSeries(self.variables, poly, self.bounds)

    def reflect(self, rs: RootSystem, i: int) -> "LatticeSeries":
        return self._like({rs.reflect(i, beta): p for beta, p in self.terms.items()})

    def binomial(self, root: Root, exponents: Sequence[int]) -> "LatticeSeries":
        """The factor 1 - x e^root, with x the monomial of ``exponents``."""
        zero = (0,) * self.rank
        return self._like({zero: self.ring.one, tuple(root): -self._monomial(exponents)})

    def qt_factor(self, root: Root, j: int) -> "LatticeSeries":
        """
        Truncated expansion of (1 - q^{j-1} e^root) / (1 - q^{j-1} t e^root).

        Equals 1 + sum_{k >= 1} q^{k(j-1)} (t^k - t^{k-1}) e^{k root}.
        """
        iq, it = self.variables.index("q"), self.variables.index("t")
        terms = {(0,) * self.rank: self.ring.one}
        k = 1
        while True:
            base = [0] * len(self.variables)
            base[iq] = k * (j - 1)
            lower = list(base)
            lower[it] = k - 1
            if not self._within(lower):
                break
            upper = list(base)
            upper[it] = k
            terms[tuple(k * x for x in root)] = self._monomial(upper) - self._monomial(lower)
            k += 1
        return self._like(terms)


def constant_term(s: LatticeSeries) -> PoincareSeries:
    return s.constant_term()


def _q_poly(terms: Dict[int, int]) -> PoincareSeries:
    return PoincareSeries.from_terms(("z", "q"), {(0, e): c for e, c in terms.items()})


def chi_product_q(rs: RootSystem, r: int, exponents: Optional[Sequence[int]] = None) -> PoincareSeries:
    """prod_i prod_{j=1..r} (1 - q^{j + m_i (r+1)}), over the exponents of ``rs`` unless others are given."""
    if r < 0:
        raise InputError(f"r must be nonnegative, got {r}")
    result = PoincareSeries.one(("z", "q"))
    for m in rs.exponents if exponents is None else exponents:
        for j in range(1, r + 1):
            result = result * _q_poly({0: 1, j + m * (r + 1): -1})
    return result


def raw_constant_term_q(rs: RootSystem, r: int) -> PoincareSeries:
    """CT{prod_{j=0..r} prod_alpha (1 - q^j e^alpha)}, without normalization."""
    product = LatticeSeries.one(rs.rank, ("z", "q"))
    for j in range(r + 1):
        for alpha in rs.roots:
            product = product * product.binomial(alpha, (0, j))
    return product.constant_term()


def chi_ct_q(rs: RootSystem, r: int) -> PoincareSeries:
    """(1/|W|) prod_{j=1..r} (1 - q^j)^l CT{prod_{j=0..r} prod_alpha (1 - q^j e^alpha)}."""
    if r < 0:
        raise InputError(f"r must be nonnegative, got {r}")
    result = raw_constant_term_q(rs, r)
    for j in range(1, r + 1):
        for _ in range(rs.rank):
            result = result * _q_poly({0: 1, j: -1})
    return result * _q_poly({0: QQ(1, rs.weyl_order)})


class MacdonaldQReport(BaseModel):
    type: str
    r: int
    lhs: str
    rhs: str
    raw_constant_term: str
    weyl_order: int
    verdict: str
    normalization_note: str = NORMALIZATION_NOTE


class MacdonaldQTReport(BaseModel):
    """
    Outcome of the truncated (q,t)-identity.

    Attributes:
        type (str): root system type
        r (Optional[int]): unset, t takes the place of q^r
        nq (int): q truncation order
        nt (int): t truncation order
        lhs (str): (1/|W|) CT side
        rhs (str): product side
        verdict (str): PASS or FAIL
        mismatch (Optional[str]): first differing monomial
    """

    type: str
    r: Optional[int] = None
    nq: int
    nt: int
    lhs: str
    rhs: str
    verdict: str
    mismatch: Optional[str] = None
    normalization_note: str = NORMALIZATION_NOTE


def verify_q_identity(rs: RootSystem, r: int) -> MacdonaldQReport:
    lhs, rhs = chi_ct_q(rs, r), chi_product_q(rs, r)
    verdict = "PASS" if lhs == rhs else "FAIL"
    if verdict == "FAIL":
        logger.warning("q-identity fails for %s, r=%d: %s vs %s", rs.type_name, r, lhs, rhs)
    return MacdonaldQReport(
        type=rs.type_name,
        r=r,
        lhs=str(lhs),
        rhs=str(rhs),
        raw_constant_term=str(raw_constant_term_q(rs, r)),
        weyl_order=rs.weyl_order,
        verdict=verdict,
    )


def qt_lhs(rs: RootSystem, nq: int, nt: int) -> PoincareSeries:
    """(1/|W|) CT{prod_{j>=1} prod_alpha (1 - q^{j-1} e^alpha)/(1 - q^{j-1} t e^alpha)} mod (q^nq, t^nt)."""
    variables, bounds = ("z", "q", "t"), {"q": nq, "t": nt}
    product = LatticeSeries.one(rs.rank, variables, bounds)
    # Factors with j - 1 >= nq are 1 after truncation.
    for j in range(1, nq + 1):
        for alpha in rs.roots:
            product = product * product.qt_factor(alpha, j)
    return product.constant_term() * PoincareSeries.from_terms(variables, {(0, 0, 0): QQ(1, rs.weyl_order)}, bounds)


def qt_rhs(rs: RootSystem, nq: int, nt: int) -> PoincareSeries:
    """prod_i prod_{j>=1} (1 - q^{j-1} t)(1 - q^j t^m_i) / ((1 - q^j)(1 - q^{j-1} t^{m_i+1})) mod (q^nq, t^nt)."""
    variables, bounds = ("z", "q", "t"), {"q": nq, "t": nt}
    result = PoincareSeries.one(variables, bounds)

    def binomial(a: int, b: int) -> PoincareSeries:
        return PoincareSeries.from_terms(variables, {(0, 0, 0): 1, (0, a, b): -1}, bounds)

    for m in rs.exponents:
        for j in range(1, nq + 1):
            result = result * binomial(j - 1, 1) * binomial(j, m)
            result = result * PoincareSeries.geometric(variables, (0, j, 0), bounds)
            result = result * PoincareSeries.geometric(variables, (0, j - 1, m + 1), bounds)
    return result


def verify_qt_identity(rs: RootSystem, nq: int, nt: int) -> MacdonaldQTReport:
    """
    Compare both sides of the (q,t)-identity modulo (q^nq, t^nt).

    Raises:
        InputError: if a truncation order is below 2
    """
    if nq < 2 or nt < 2:
        raise InputError(f"truncation orders must be at least 2, got ({nq}, {nt})")
    lhs, rhs = qt_lhs(rs, nq, nt), qt_rhs(rs, nq, nt)
    mismatch = lhs.first_mismatch(rhs)
    detail = None
    if mismatch is not None:
        exps, a, b = mismatch
        detail = f"{lhs.monomial_string(exps) or '1'}: lhs {a}, rhs {b}"
        logger.warning("(q,t)-identity fails for %s at %s", rs.type_name, detail)
    return MacdonaldQTReport(
        type=rs.type_name,
        nq=nq,
        nt=nt,
        lhs=str(lhs),
        rhs=str(rhs),
        verdict="PASS" if mismatch is None else "FAIL",
        mismatch=detail,
    )


class EulerChainReport(BaseModel):
    model: str
    group: str
    r: int
    product: str
    euler: str
    verdict: str


def verify_euler_chain(model: QuillenModel, g: LieAlgebraData, r: int, d: int = 2) -> EulerChainReport:
    """
    Compare chi_product_q with the weight-graded Euler characteristic of the
    invariant representation complex of a truncated projective space.

    Args:
        model (QuillenModel): weighted Quillen model of the space
        g (LieAlgebraData): a reductive Lie algebra with a root system
        r (int): truncation height
        d (int): degree of the polynomial generator
    """
    rs = root_system_of(g)
    c = build_rep_complex(model, g, vanishing_bound(d, r, g))
    euler = euler_series(c, invariant=True)
    product = chi_product_q(rs, r, g.exponents)
    verdict = "PASS" if euler == product else "FAIL"
    return EulerChainReport(
        model=model.name, group=g.name, r=r, product=str(product), euler=str(euler), verdict=verdict
    )


def positive_root_heights(rs: RootSystem) -> Dict[int, int]:
    heights: Dict[int, int] = {}
    for root in rs.positive:
        heights[sum(root)] = heights.get(sum(root), 0) + 1
    return dict(sorted(heights.items()))


__all__ = [
    "LatticeSeries",
    "NORMALIZATION_NOTE",
    "RootSystem",
    "chi_ct_q",
    "chi_product_q",
    "constant_term",
    "from_cartan",
    "root_system",
    "root_system_of",
    "verify_euler_chain",
    "verify_q_identity",
    "verify_qt_identity",
]
