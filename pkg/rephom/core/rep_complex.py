"""
Representation Complex Module

For a Quillen model (L(V), d) and a Lie algebra g, the representation
complex is the free graded-commutative algebra on g* (x) V with the
differential determined by the universal representation

    rho(v) = sum_i (x^i v) (x) x_i,    rho([a, b]) = [rho(a), rho(b)],

where [a (x) X, b (x) Y] = ab (x) [X, Y]. On generators the differential is
the x_k-component of rho(dv). Its homology is representation homology; the
coadjoint-invariant subcomplex computes the invariant part.
"""

import logging
from typing import Any, Dict, List, Mapping, Optional, Tuple

from pydantic import BaseModel
from sympy.polys.domains import QQ

from rephom.core.errors import InputError
from rephom.core.gca import (
    FreeGradedCommAlgebra,
    Generator,
    GradedCommComplex,
    InvariantSubcomplex,
    Monomial,
    Poly,
    Weight,
    dims_to_series,
)
from rephom.core.lie import LieAlgebraData, coadjoint_derivations
from rephom.core.linalg import add_into, floor_rational
from rephom.core.models import LieExpr, QuillenModel, Tree
from rephom.core.series import PoincareSeries, free_graded_series

logger = logging.getLogger(__name__)

CurrentElement = Dict[Tuple[Monomial, int], Any]


def rep_algebra(m: QuillenModel, g: LieAlgebraData) -> FreeGradedCommAlgebra:
    """The free algebra on x^i (x) v, ordered by (degree, Lie index, label)."""
    generators = []
    for v in m.generators:
        weight = (v.weight,) if m.weighted else ()
        for i, label in enumerate(g.basis_labels):
            generators.append(Generator(f"{label}*{v.label}", v.degree, weight, i, v.label))
    generators.sort(key=lambda gen: (gen.degree, gen.g_index, gen.label))
    return FreeGradedCommAlgebra(generators)


def universal_rep(
    m: QuillenModel, g: LieAlgebraData, x: LieExpr, algebra: Optional[FreeGradedCommAlgebra] = None
) -> CurrentElement:
    """
    Image of a Lie element under the universal representation.

    Args:
        m (QuillenModel): model whose generators span V
        g (LieAlgebraData): target Lie algebra
        x (LieExpr): element of L(V)
        algebra (Optional[FreeGradedCommAlgebra]): the free algebra on g* (x) V

    Returns:
        CurrentElement: coefficient of (monomial, Lie basis index) pairs

    Raises:
        InputError: if ``x`` involves a generator outside the model
    """
    algebra = algebra or rep_algebra(m, g)
    cache: Dict[Tree, CurrentElement] = {}

    def rho(tree: Tree) -> CurrentElement:
        if tree in cache:
            return cache[tree]
        if isinstance(tree, str):
            m.generator(tree)
            result = {((algebra.index(i, tree),), i): QQ(1) for i in range(g.dim)}
        else:
            result = {}
            for (ma, i), ca in rho(tree[1]).items():
                for (mb, j), cb in rho(tree[2]).items():
                    bracket = g.bracket_basis(i, j)
                    if not bracket:
                        continue
                    sign, mono = algebra.multiply(ma, mb)
                    if not sign:
                        continue
                    for k, c in bracket.items():
                        add_into(result, {(mono, k): ca * cb * c * sign})
        cache[tree] = result
        return result

    total: CurrentElement = {}
    for tree, coeff in x.terms.items():
        add_into(total, rho(tree), coeff)
    return total


def current_component(element: CurrentElement, k: int) -> Poly:
    """The coefficient of x_k in a current element."""
    return {mono: c for (mono, j), c in element.items() if j == k}


class RepresentationComplex(GradedCommComplex):
    """
    The representation complex of a Quillen model and a Lie algebra.

    Attributes:
        model (QuillenModel): the model
        lie (LieAlgebraData): the Lie algebra
    """

    def __init__(self, model: QuillenModel, lie: LieAlgebraData, degree_cap: int):
        algebra = rep_algebra(model, lie)
        differential: Dict[int, Poly] = {}
        for v_label, dv in model.diff.items():
            if dv.is_zero():
                continue
            image = universal_rep(model, lie, dv, algebra)
            for k in range(lie.dim):
                component = current_component(image, k)
                if component:
                    differential[algebra.index(k, v_label)] = component
        self.model = model
        self.lie = lie
        self._invariant: Optional[InvariantSubcomplex] = None
        super().__init__(algebra, differential, degree_cap, name=f"{model.name}/{lie.name}")

    def invariant_subcomplex(self) -> InvariantSubcomplex:
        if self._invariant is None:
            self._invariant = InvariantSubcomplex(self, coadjoint_derivations(self.lie, self.algebra))
        return self._invariant


def build_rep_complex(m: QuillenModel, g: LieAlgebraData, degree_cap: int) -> RepresentationComplex:
    """
    Build the representation complex up to ``degree_cap``.

    Raises:
        InputError: if ``degree_cap`` < 1
        ConventionError: if the differential fails to square to zero
    """
    if degree_cap < 1:
        raise InputError(f"degree cap must be at least 1, got {degree_cap}")
    if m.validity_bound is not None and degree_cap > m.validity_bound:
        logger.warning("degree cap %d exceeds the validity bound %d of %s", degree_cap, m.validity_bound, m.name)
    return RepresentationComplex(m, g, degree_cap)


def homology_series(c: GradedCommComplex, max_degree: int) -> PoincareSeries:
    """Poincare series of the homology, weighted when the model is."""
    return dims_to_series(c.homology(max_degree), c.weight_rank, max_degree)


def invariant_homology_series(c: RepresentationComplex, g: LieAlgebraData, max_degree: int) -> PoincareSeries:
    """
    Poincare series of the coadjoint-invariant homology.

    Raises:
        InputError: if ``g`` is not reductive or is not the algebra of ``c``
    """
    if not g.reductive:
        raise InputError(f"{g.name} is not reductive; invariants do not commute with homology")
    if g is not c.lie:
        raise InputError(f"complex was built for {c.lie.name}, not {g.name}")
    return dims_to_series(c.invariant_subcomplex().homology(max_degree), c.weight_rank, max_degree)


def complete_weight_bound(c: GradedCommComplex) -> int:
    """Largest total weight whose blocks lie entirely within the enumerated degrees."""
    ratios = [QQ(gen.degree, sum(gen.weight)) for gen in c.algebra.generators if gen.weight and sum(gen.weight) > 0]
    if not ratios or any(sum(gen.weight) <= 0 for gen in c.algebra.generators):
        raise InputError("Euler series need a positive weight grading")
    generators = c.algebra.generators
    if all(gen.degree % 2 for gen in generators) and sum(gen.degree for gen in generators) <= c.degree_cap + 1:
        # Finite exterior algebra, enumerated in full.
        return sum(sum(gen.weight) for gen in generators)
    return floor_rational((c.degree_cap + 1) / max(ratios))


def euler_series(c: RepresentationComplex, invariant: bool = False) -> PoincareSeries:
    """
    Weight-graded Euler characteristic sum_w sum_n (-1)^n dim C_{n,w} q^w.

    Only weights whose blocks are complete are kept; the series is truncated
    just above the largest such weight.
    """
    bound = complete_weight_bound(c)
    source = c.invariant_subcomplex() if invariant else c
    terms = {}
    for w, chi in source.euler_by_weight(c.degree_cap + 1).items():
        if sum(w) <= bound:
            terms[(0,) + tuple(w)] = chi
    variables = ("z", "q") if c.weight_rank == 1 else ("z", "q", "t")[: c.weight_rank + 1]
    return PoincareSeries.from_terms(variables, terms, {variables[1]: bound + 1})


def vanishing_bound(d: int, r: int, g: LieAlgebraData) -> int:
    """Top degree r (d (r + 1) - 2) dim g / 2 of representation homology of a truncated projective space."""
    numerator = r * (d * (r + 1) - 2) * g.dim
    if numerator % 2:
        raise InputError(f"vanishing bound is not integral for d={d}, r={r}")
    return numerator // 2


class DegreeCheck(BaseModel):
    degree: int
    expected: int
    computed: int
    ok: bool


class LowDegreeReport(BaseModel):
    """
    Comparison of low-degree homology with the homology of the space.

    Attributes:
        model (str): model name
        group (str): Lie algebra name
        connectivity (int): the space is n-connected
        rows (List[DegreeCheck]): one row per degree 0..2n-1
        ok (bool): every row agrees
    """

    model: str
    group: str
    connectivity: int
    rows: List[DegreeCheck]
    ok: bool


def low_degree_check(
    m: QuillenModel, g: LieAlgebraData, n_connectivity: int, homology: Mapping[int, int]
) -> LowDegreeReport:
    """
    Check HR_0 = Q, HR_i = 0 for 0 < i < n and HR_i = H_{i+1}(X) (x) g* for n <= i <= 2n - 1.

    Args:
        m (QuillenModel): model of X
        g (LieAlgebraData): the Lie algebra
        n_connectivity (int): X is n-connected
        homology (Mapping[int, int]): dimensions of the reduced rational homology of X by degree,
            taken from the space and not from the model under test
    """
    if n_connectivity < 1:
        raise InputError(f"connectivity must be at least 1, got {n_connectivity}")
    top = 2 * n_connectivity - 1
    c = build_rep_complex(m, g, top)
    computed: Dict[int, int] = {}
    for (n, _), h in c.homology(top).items():
        computed[n] = computed.get(n, 0) + h
    rows = []
    for i in range(top + 1):
        if i == 0:
            expected = 1
        elif i < n_connectivity:
            expected = 0
        else:
            expected = int(homology.get(i + 1, 0)) * g.dim
        got = computed.get(i, 0)
        rows.append(DegreeCheck(degree=i, expected=expected, computed=got, ok=expected == got))
    ok = all(row.ok for row in rows)
    report = LowDegreeReport(model=m.name, group=g.name, connectivity=n_connectivity, rows=rows, ok=ok)
    if not report.ok:
        logger.warning("low-degree check failed for %s/%s", m.name, g.name)
    return report


def torus_series(m: QuillenModel, rank: int, max_degree: int) -> PoincareSeries:
    """Series of the free graded-commutative algebra on ``rank`` copies of V."""
    variables = ("z", "q") if m.weighted else ("z",)
    generators = []
    for v in m.generators:
        exps = (v.degree, v.weight) if m.weighted else (v.degree,)
        generators += [exps] * rank
    return free_graded_series(variables, generators, {"z": max_degree + 1})
