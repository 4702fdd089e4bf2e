"""
Current Algebra Cochains Module

Chevalley-Eilenberg cochains of the current Lie algebra g (x) A-bar for a
Sullivan model A, graded homologically. The dual of x_k (x) c is a free
generator y(k, c) of homological degree |c| - 1 and weight w(c). Its
differential is read off the Maurer-Cartan equation of the universal element
sum y(k, c) (x) x_k (x) c:

    dy(k, c) = sum (-1)^{|c'|} delta(c' -> c) y(k, c')
               - 1/2 sum (-1)^{|a|(1+|b|)} mu(a, b -> c) c^k_ij y(i, a) y(j, b)

where d_A c' = sum delta(c' -> c) c and ab = sum mu(a, b -> c) c. The
relative complex for (g (x) A, g) is the coadjoint-invariant subcomplex.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple, Union

from sympy.polys.domains import QQ

from rephom.core.errors import InputError, InsufficientCutoffError
from rephom.core.gca import (
    BlockKey,
    FreeGradedCommAlgebra,
    Generator,
    GradedCommComplex,
    InvariantSubcomplex,
    Monomial,
    Poly,
    dims_to_series,
)
from rephom.core.lie import LieAlgebraData, coadjoint_derivations
from rephom.core.linalg import add_into
from rephom.core.models import SullivanModel
from rephom.core.series import PoincareSeries

logger = logging.getLogger(__name__)

Cutoff = Union[int, Tuple[int, ...]]


@dataclass(frozen=True, eq=False)
class CurrentLie:
    """
    The current Lie algebra g (x) A-bar, restricted to monomials of A up to a degree.

    Attributes:
        lie (LieAlgebraData): the Lie algebra g
        sullivan (SullivanModel): the commutative algebra A
        max_degree (int): largest cohomological degree of a monomial kept
    """

    lie: LieAlgebraData
    sullivan: SullivanModel
    max_degree: int

    def monomials(self) -> List[Monomial]:
        """Nonconstant monomials of A up to ``max_degree``, by (degree, monomial)."""
        blocks = self.sullivan.algebra.monomials(self.max_degree)
        found = [m for ms in blocks.values() for m in ms if m]
        return sorted(found, key=lambda m: (self.sullivan.algebra.degree(m), m))

    def basis(self) -> List[Tuple[int, Monomial]]:
        return [(k, c) for c in self.monomials() for k in range(self.lie.dim)]

    def bracket(self, x: Tuple[int, Monomial], y: Tuple[int, Monomial]) -> Dict[Tuple[int, Monomial], Any]:
        """[x_i (x) a, x_j (x) b] = [x_i, x_j] (x) ab."""
        (i, a), (j, b) = x, y
        sign, mono = self.sullivan.algebra.multiply(a, b)
        if not sign:
            return {}
        return {(k, mono): c * sign for k, c in self.lie.bracket_basis(i, j).items()}

    def differential(self, x: Tuple[int, Monomial]) -> Dict[Tuple[int, Monomial], Any]:
        k, c = x
        return {(k, m): v for m, v in self.sullivan.apply({c: QQ(1)}).items()}


def _check_positive_weights(A: SullivanModel) -> None:
    for gen in A.generators:
        if not gen.weight or sum(gen.weight) < 1 or min(gen.weight) < 0:
            raise InputError(
                f"generator {gen.label} of {A.name} has weight {gen.weight}; weight blocks would be infinite"
            )


def _knapsack(items: List[Tuple[int, int, bool]], copies: int, budget: int) -> int:
    """
    Largest total value of a multiset of items of total degree <= budget.

    Odd items are used at most ``copies`` times.
    """
    best = [0] * (budget + 1)
    for degree, value, odd in items:
        if degree > budget or value <= 0:
            continue
        if odd:
            for _ in range(copies):
                for b in range(budget, degree - 1, -1):
                    best[b] = max(best[b], best[b - degree] + value)
        else:
            for b in range(degree, budget + 1):
                best[b] = max(best[b], best[b - degree] + value)
    return best[budget]


def required_cutoff(g: LieAlgebraData, A: SullivanModel, max_degree: int) -> Tuple[int, Tuple[int, ...]]:
    """
    Smallest weight cutoff under which no cochain of degree <= max_degree + 1 is lost.

    Returns:
        Tuple[int, Tuple[int, ...]]: bound on total weight, and componentwise bounds
    """
    _check_positive_weights(A)
    current = CurrentLie(g, A, max_degree + 2)
    algebra = A.algebra
    generators = [(algebra.degree(c) - 1, algebra.weight(c)) for c in current.monomials()]
    budget = max_degree + 1
    total = _knapsack([(d, sum(w), d % 2 == 1) for d, w in generators], g.dim, budget)
    components = tuple(
        _knapsack([(d, w[k], d % 2 == 1) for d, w in generators], g.dim, budget) for k in range(A.weight_rank)
    )
    return total, components


class CEComplex(GradedCommComplex):
    """
    Cochains of a current Lie algebra, graded homologically.

    Attributes:
        lie (LieAlgebraData): the Lie algebra
        sullivan (SullivanModel): the model A
        relative (bool): whether homology is taken on coadjoint invariants
        weight_cutoff (Cutoff): enforced weight bound
    """

    def __init__(
        self, lie: LieAlgebraData, sullivan: SullivanModel, degree_cap: int, weight_cutoff: Cutoff, relative: bool
    ):
        current = CurrentLie(lie, sullivan, degree_cap + 2)
        A = sullivan.algebra
        tags = [c for c in current.monomials() if self._within(A.weight(c), weight_cutoff)]
        generators = []
        for c in tags:
            for k, label in enumerate(lie.basis_labels):
                generators.append(Generator(f"{label}#{A.format_monomial(c)}", A.degree(c) - 1, A.weight(c), k, c))
        algebra = FreeGradedCommAlgebra(generators)
        differential: Dict[int, Poly] = {}
        for c in tags:
            for c_prime, coeff in self._internal_sources(sullivan, tags, c):
                sign = -1 if A.degree(c_prime) % 2 else 1
                for k in range(lie.dim):
                    target = differential.setdefault(algebra.index(k, c), {})
                    add_into(target, {(algebra.index(k, c_prime),): coeff * sign})
        half = QQ(1, 2)
        for a in tags:
            for b in tags:
                sign, c = A.multiply(a, b)
                if not sign or not algebra.has(0, c):
                    continue
                koszul = -1 if (A.degree(a) * (1 + A.degree(b))) % 2 else 1
                for i in range(lie.dim):
                    for j in range(lie.dim):
                        for k, s in lie.bracket_basis(i, j).items():
                            s_ab, mono = algebra.multiply((algebra.index(i, a),), (algebra.index(j, b),))
                            if not s_ab:
                                continue
                            term = -half * koszul * sign * s * s_ab
                            add_into(differential.setdefault(algebra.index(k, c), {}), {mono: term})
        blocks = {
            key: ms
            for key, ms in algebra.monomials(degree_cap + 1).items()
            if self._within(key[1], weight_cutoff)
        }
        self.lie = lie
        self.sullivan = sullivan
        self.relative = relative
        self.weight_cutoff = weight_cutoff
        self._invariant: Optional[InvariantSubcomplex] = None
        label = f"CE({lie.name}, {sullivan.name}{', rel' if relative else ''})"
        super().__init__(algebra, differential, degree_cap, name=label, blocks=blocks)

    @staticmethod
    def _within(weight: Tuple[int, ...], cutoff: Cutoff) -> bool:
        if isinstance(cutoff, int):
            return sum(weight) <= cutoff
        return all(w <= b for w, b in zip(weight, cutoff))

    @staticmethod
    def _internal_sources(sullivan: SullivanModel, tags: List[Monomial], c: Monomial) -> List[Tuple[Monomial, Any]]:
        # Pairs (c', delta) with d_A c' containing delta * c.
        A = sullivan.algebra
        sources = []
        for c_prime in tags:
            if A.degree(c_prime) != A.degree(c) - 1 or A.weight(c_prime) != A.weight(c):
                continue
            coeff = sullivan.apply({c_prime: QQ(1)}).get(c)
            if coeff:
                sources.append((c_prime, coeff))
        return sources

    def invariant_subcomplex(self) -> InvariantSubcomplex:
        if self._invariant is None:
            self._invariant = InvariantSubcomplex(self, coadjoint_derivations(self.lie, self.algebra))
        return self._invariant

    def homology_blocks(self, max_degree: Optional[int] = None) -> Dict[BlockKey, int]:
        if self.relative:
            return self.invariant_subcomplex().homology(max_degree)
        return self.homology(max_degree)


def build_ce(
    g: LieAlgebraData,
    A: SullivanModel,
    weight_cutoff: Optional[Cutoff] = None,
    degree_window: int = 12,
    relative: bool = False,
) -> CEComplex:
    """
    Build the (relative) cochain complex of g (x) A-bar in homological degrees up to ``degree_window``.

    Args:
        g (LieAlgebraData): the Lie algebra
        A (SullivanModel): a Sullivan model with positive weights on generators
        weight_cutoff (Optional[Cutoff]): total weight bound (int) or componentwise
            bounds (tuple); defaults to the required bound
        degree_window (int): highest homological degree reported
        relative (bool): restrict to coadjoint invariants

    Returns:
        CEComplex: the complex

    Raises:
        InputError: on nonpositive weights or a non-reductive g for the relative complex
        InsufficientCutoffError: when ``weight_cutoff`` would lose cochains in the window
    """
    if degree_window < 1:
        raise InputError(f"degree window must be at least 1, got {degree_window}")
    if relative and not g.reductive:
        raise InputError(f"{g.name} is not reductive; the relative complex is not available")
    total, components = required_cutoff(g, A, degree_window)
    if weight_cutoff is None:
        weight_cutoff = total
    elif isinstance(weight_cutoff, int):
        if weight_cutoff < total:
            raise InsufficientCutoffError(f"weight cutoff {weight_cutoff} is below the required {total}", total)
    else:
        weight_cutoff = tuple(int(b) for b in weight_cutoff)
        if len(weight_cutoff) != A.weight_rank:
            raise InputError(
                f"cutoff {weight_cutoff} has {len(weight_cutoff)} components, weights have {A.weight_rank}"
            )
        if any(b < r for b, r in zip(weight_cutoff, components)):
            raise InsufficientCutoffError(
                f"weight cutoff {weight_cutoff} is below the required {components}", components
            )
    logger.info(
        "CE route for %s on %s: degree window %d, weight cutoff %s", g.name, A.name, degree_window, weight_cutoff
    )
    return CEComplex(g, A, degree_window, weight_cutoff, relative)


def ce_series(c: CEComplex, max_homological_degree: int) -> PoincareSeries:
    """Poincare series of the (relative) cochain cohomology, graded by homological degree and weight."""
    return dims_to_series(c.homology_blocks(max_homological_degree), c.weight_rank, max_homological_degree)
