"""
Drinfeld Trace Module

Trace maps from cyclic words to invariant representation homology, on both
sides of the Quillen/Sullivan duality:

- ``quillen_trace`` evaluates an invariant polynomial on the g-legs of the
  universal representation of each letter of a symmetric word and multiplies
  the remaining legs in the representation complex;
- ``sullivan_psi`` sends a wedge of current-algebra elements to the
  antisymmetrized form a_0 da_1 ... da_m times P, reduced modulo exact forms;
  ``psi_chain_map_failures`` checks it against the Chevalley-Eilenberg
  boundary ``ce_chain_boundary``.

``drinfeld_freeness_check`` compares the invariant homology series with the
free graded-commutative series on the loop-space Hodge classes and looks for
trace images realizing each expected generator.
"""

import itertools
import logging
from dataclasses import dataclass
from math import factorial
from typing import Any, Dict, List, Mapping, Optional, Protocol, Sequence, Tuple

from pydantic import BaseModel
from sympy.polys.domains import QQ

from rephom.core.ce_current import build_ce, ce_series
from rephom.core.cyclic import FormComplex, LoopClass, loop_hodge_classes
from rephom.core.errors import InputError
from rephom.core.gca import FreeGradedCommAlgebra, GradedCommComplex, Monomial, Poly
from rephom.core.lie import InvariantPolynomial, LieAlgebraData, invariant_generators
from rephom.core.linalg import SparseMatrix, add_into, format_rational, matrix_columns, rank, sparse_kernel, to_rational
from rephom.core.models import LieExpr, QuillenModel, SullivanModel, tensor_normal_form
from rephom.core.rep_complex import (
    RepresentationComplex,
    build_rep_complex,
    invariant_homology_series,
    rep_algebra,
    universal_rep,
)
from rephom.core.series import free_graded_series, series_variables

logger = logging.getLogger(__name__)

CEChain = Sequence[Tuple[Mapping[int, Any], Mapping[Monomial, Any]]]


@dataclass(frozen=True)
class SymWord:
    """
    A product of Lie elements, read as a symmetric word.

    Attributes:
        factors (Tuple[LieExpr, ...]): the letters
    """

    factors: Tuple[LieExpr, ...]

    def __len__(self) -> int:
        return len(self.factors)

    @property
    def degree(self) -> int:
        return sum(x.degree or 0 for x in self.factors)

    def __str__(self) -> str:
        return " . ".join(f"({x})" if len(x.terms) > 1 else str(x) for x in self.factors)


def quillen_trace(
    P: InvariantPolynomial,
    m: QuillenModel,
    g: LieAlgebraData,
    w: SymWord,
    algebra: Optional[FreeGradedCommAlgebra] = None,
) -> Poly:
    """
    Trace of a symmetric word in the representation complex.

    Args:
        P (InvariantPolynomial): invariant polynomial of degree len(w)
        m (QuillenModel): the model the letters live in
        g (LieAlgebraData): the Lie algebra
        w (SymWord): the word
        algebra (Optional[FreeGradedCommAlgebra]): algebra of the representation complex

    Returns:
        Poly: sum P(x_i1, .., x_id) a_1,i1 ... a_d,id where rho(x_k) = sum_i a_k,i (x) x_i

    Raises:
        InputError: if the arity of P differs from the word length
    """
    if P.degree != len(w):
        raise InputError(f"{P.name} has degree {P.degree} but the word has {len(w)} letters")
    algebra = algebra or rep_algebra(m, g)
    legs: List[Dict[int, Poly]] = []
    for x in w.factors:
        by_index: Dict[int, Poly] = {}
        for (mono, i), c in universal_rep(m, g, x, algebra).items():
            add_into(by_index.setdefault(i, {}), {mono: c})
        legs.append(by_index)
    result: Poly = {}
    for indices in itertools.product(*(sorted(leg) for leg in legs)):
        value = P.value(indices)
        if not value:
            continue
        product: Poly = {(): QQ(1)}
        for leg, i in zip(legs, indices):
            product = algebra.multiply_poly(product, leg[i])
            if not product:
                break
        add_into(result, product, value)
    return result


def is_nonzero_class(c: GradedCommComplex, poly: Poly) -> bool:
    """Whether ``poly`` is a cycle whose homology class is nonzero."""
    if not poly or c.apply(poly):
        return False
    (n, w), vector = c.to_block_vector(poly)
    upper = c.matrix(n + 1, w)
    return rank(SparseMatrix.from_columns(upper.rows, matrix_columns(upper) + [vector])) > rank(upper)


def classes_independent(c: GradedCommComplex, polys: Sequence[Poly]) -> bool:
    """Whether cycles in one block have linearly independent homology classes."""
    if not polys:
        return True
    vectors = [c.to_block_vector(p) for p in polys]
    keys = {key for key, _ in vectors}
    if len(keys) != 1:
        raise InputError("classes must share one (degree, weight) block")
    n, w = keys.pop()
    upper = c.matrix(n + 1, w)
    columns = matrix_columns(upper)
    extended = SparseMatrix.from_columns(upper.rows, columns + [v for _, v in vectors])
    return rank(extended) - rank(upper) == len(polys)


def _koszul_sign(order: Sequence[int], parities: Sequence[int]) -> int:
    sign = 1
    for k, l in itertools.combinations(range(len(order)), 2):
        if order[k] > order[l] and parities[order[k]] and parities[order[l]]:
            sign = -sign
    return sign


def _chain_parities(A: SullivanModel, chain: CEChain) -> List[int]:
    # x (x) a sits in homological degree 1 - |a| after the shift.
    parities = []
    for _, a in chain:
        degrees = {A.algebra.degree(mono) for mono, c in a.items() if c}
        if len(degrees) > 1:
            raise InputError("chain entries must be homogeneous")
        parities.append((degrees.pop() + 1) % 2 if degrees else 0)
    return parities


def sullivan_psi(
    P: InvariantPolynomial,
    g: LieAlgebraData,
    A: SullivanModel,
    chain: CEChain,
    forms: Optional[FormComplex] = None,
) -> Poly:
    """
    Image of a wedge of current-algebra elements in Omega^m(A) / d Omega^{m-1}(A).

    The chain x_0 (x) a_0 ^ .. ^ x_m (x) a_m goes to
    P(x_0, .., x_m) / (m+1)! * sum_sigma eps(sigma) a_sigma(0) da_sigma(1) .. da_sigma(m),
    with eps the Koszul sign for elements of parity |a_i| + 1. Constants are
    dropped and the form is reduced modulo exact forms, so chains with the same
    class have equal images.

    Args:
        P (InvariantPolynomial): invariant polynomial of degree m + 1
        g (LieAlgebraData): the Lie algebra
        A (SullivanModel): the model
        chain (CEChain): (coordinate vector in g, homogeneous element of A) pairs
        forms (Optional[FormComplex]): forms complex to reduce in, rebuilt when its
            weight cutoff is below the weight of the chain

    Raises:
        InputError: on arity mismatch or inhomogeneous entries
    """
    if P.degree != len(chain):
        raise InputError(f"{P.name} has degree {P.degree} but the chain has {len(chain)} factors")
    parities = _chain_parities(A, chain)
    entries = [{mono: to_rational(c) for mono, c in a.items() if c} for _, a in chain]
    if not all(entries):
        return {}
    value = P.evaluate([{i: to_rational(c) for i, c in x.items()} for x, _ in chain])
    if not value:
        return {}
    weight = sum(max(sum(A.algebra.weight(mono)) for mono in a) for a in entries)
    if forms is None or forms.weight_cutoff < weight:
        forms = FormComplex(A, weight)
    # Sullivan generator i is form generator i, so monomials carry over unchanged.
    differentials = [forms.d(a) for a in entries]
    total: Poly = {}
    for order in itertools.permutations(range(len(chain))):
        term = dict(entries[order[0]])
        for k in order[1:]:
            term = forms.algebra.multiply_poly(term, differentials[k])
            if not term:
                break
        add_into(total, term, _koszul_sign(order, parities))
    scale = value / factorial(len(chain))
    return forms.reduce_exact({mono: c * scale for mono, c in total.items() if mono and c})


def ce_chain_boundary(g: LieAlgebraData, A: SullivanModel, chain: CEChain) -> List[Tuple[Any, CEChain]]:
    """
    Chevalley-Eilenberg boundary of a chain of g (x) A-bar, as signed chains.

    The bracket part contracts each pair i < j to [x_i, x_j] (x) a_i a_j, placed
    first, with the Koszul sign of moving both factors to the front and a
    further (-1)^{|a_i|}. The internal part applies d_A to one factor at a time,
    with sign -(-1) raised to the parity passed over.
    """
    parities = _chain_parities(A, chain)
    entries = [(dict(x), {mono: to_rational(c) for mono, c in a.items() if c}) for x, a in chain]
    terms: List[Tuple[Any, CEChain]] = []
    for i, j in itertools.combinations(range(len(entries)), 2):
        x = g.bracket(entries[i][0], entries[j][0])
        a = A.algebra.multiply_poly(entries[i][1], entries[j][1])
        if not x or not a:
            continue
        passed = parities[i] * sum(parities[:i]) + parities[j] * (sum(parities[:j]) - parities[i])
        rest = [e for l, e in enumerate(entries) if l not in (i, j)]
        terms.append((QQ((-1) ** ((passed + 1 - parities[i]) % 2)), [(x, a)] + rest))
    for i, (x, a) in enumerate(entries):
        image = A.apply(a)
        if image:
            sign = -((-1) ** (sum(parities[:i]) % 2))
            terms.append((QQ(sign), entries[:i] + [(x, image)] + entries[i + 1 :]))
    return terms


def _chain_label(g: LieAlgebraData, A: SullivanModel, chain: CEChain) -> str:
    parts = []
    for x, a in chain:
        (i,) = x
        (mono,) = a
        parts.append(f"{g.basis_labels[i]}(x){A.algebra.format_monomial(mono)}")
    return " ^ ".join(parts)


def psi_chain_map_failures(
    P: InvariantPolynomial, g: LieAlgebraData, A: SullivanModel, weight_cutoff: int
) -> List[str]:
    """
    Basis chains on which the trace to forms fails to commute with the differentials.

    For chains of basis vectors tensored with monomials of total weight up to
    ``weight_cutoff``, Psi(d_CE c) + del Psi(c) must be exact. Psi only sees
    chains of length deg P, so the bracket part is tested on chains one longer.

    Returns:
        List[str]: one line per failing chain, empty when Psi is a chain map
    """
    forms = FormComplex(A, weight_cutoff)
    monomials = [mono for monos in A.algebra.monomials_by_weight(weight_cutoff).values() for mono in monos if mono]
    letters = [(i, mono) for i in range(g.dim) for mono in sorted(monomials)]
    weight = {mono: sum(A.algebra.weight(mono)) for mono in monomials}
    failures = []
    for length in (P.degree, P.degree + 1):
        for combo in itertools.combinations_with_replacement(range(len(letters)), length):
            if sum(weight[letters[n][1]] for n in combo) > weight_cutoff:
                continue
            chain = [({letters[n][0]: QQ(1)}, {letters[n][1]: QQ(1)}) for n in combo]
            defect: Poly = {}
            if length == P.degree:
                add_into(defect, forms.delta(sullivan_psi(P, g, A, chain, forms)))
            for coeff, term in ce_chain_boundary(g, A, chain):
                if len(term) == P.degree:
                    add_into(defect, sullivan_psi(P, g, A, term, forms), coeff)
            residue = forms.reduce_exact(defect)
            if residue:
                failures.append(f"{_chain_label(g, A, chain)}: {forms.algebra.format_poly(residue)}")
    if failures:
        logger.warning("Psi fails to be a chain map on %d chains of %s/%s", len(failures), A.name, g.name)
    return failures


def trace_subalgebra_independent(m: QuillenModel, g: LieAlgebraData, letter: str, max_degree: int) -> bool:
    """
    Whether the products of the traces P(u, .., u), one per invariant generator,
    have independent classes in every degree up to ``max_degree``.

    Args:
        m (QuillenModel): a model whose traces are cycles, e.g. an odd sphere
        g (LieAlgebraData): the Lie algebra
        letter (str): the generator u
        max_degree (int): top degree of the representation complex
    """
    c = build_rep_complex(m, g, max_degree)
    u = m.gen(letter)
    traces = []
    for P in invariant_generators(g):
        image = quillen_trace(P, m, g, SymWord((u,) * P.degree), c.algebra)
        if not image:
            return False
        (degree, _), _ = c.to_block_vector(image)
        if degree < 1:
            raise InputError(f"trace of {letter} under {P.name} has degree {degree}")
        traces.append((degree, image))
    products: Dict[Any, List[Poly]] = {}
    for length in range(1, max_degree // min(d for d, _ in traces) + 1):
        for combo in itertools.combinations_with_replacement(range(len(traces)), length):
            if sum(traces[i][0] for i in combo) > max_degree:
                continue
            poly: Poly = {(): QQ(1)}
            for i in combo:
                poly = c.algebra.multiply_poly(poly, traces[i][1])
            if not poly:
                return False
            key, _ = c.to_block_vector(poly)
            products.setdefault(key, []).append(poly)
    return all(classes_independent(c, polys) for polys in products.values())


class SpaceModels(Protocol):
    name: str
    quillen: Optional[QuillenModel]
    sullivan: SullivanModel


class TraceCheck(BaseModel):
    polynomial: str
    degree: int
    weight: List[int]
    word: Optional[str]
    nonzero: bool


class DrinfeldReport(BaseModel):
    """
    Result of the freeness check.

    Attributes:
        space (str): catalog name
        group (str): Lie algebra name
        generators (List[int]): loop-space Hodge degrees feeding the free series
        free_series (str): the free graded-commutative series
        invariant_series (str): invariant representation homology
        traces (List[TraceCheck]): one row per expected generator (Quillen route only)
        verdict (str): PASS or FAIL
        mismatch (Optional[str]): first differing monomial
    """

    space: str
    group: str
    route: str
    max_degree: int
    generators: List[int]
    free_series: str
    invariant_series: str
    traces: List[TraceCheck] = []
    verdict: str
    mismatch: Optional[str] = None


def _letters(m: QuillenModel) -> List[Tuple[LieExpr, int, Optional[int]]]:
    """Generators and nonzero brackets of two generators, with degree and weight."""
    letters = []
    gens = list(m.generators)
    for v in gens:
        letters.append((m.gen(v.label), v.degree, v.weight))
    for a, b in itertools.combinations_with_replacement(range(len(gens)), 2):
        x = m.gen(gens[a].label).bracket(m.gen(gens[b].label))
        if tensor_normal_form(x):
            weight = None if not m.weighted else gens[a].weight + gens[b].weight
            letters.append((x, gens[a].degree + gens[b].degree, weight))
    return letters


def canonical_words(m: QuillenModel, length: int, degree: int, weight: Optional[int]) -> List[SymWord]:
    """Words of ``length`` letters (generators or brackets of two) with the given degree and weight."""
    letters = _letters(m)
    words = []
    for combo in itertools.combinations_with_replacement(range(len(letters)), length):
        if sum(letters[i][1] for i in combo) != degree:
            continue
        if weight is not None and m.weighted and sum(letters[i][2] for i in combo) != weight:
            continue
        words.append(SymWord(tuple(letters[i][0] for i in combo)))
    return words


def find_trace_generator(
    P: InvariantPolynomial, c: RepresentationComplex, degree: int, weight: Optional[int]
) -> Optional[Tuple[str, Poly]]:
    """
    A combination of canonical words whose trace is a nonzero class in the given degree and weight.

    Single words are tried first; otherwise the cycles among combinations of
    all candidate traces are searched.

    Returns:
        Optional[Tuple[str, Poly]]: printable combination and its trace, or None
    """
    words, images = [], []
    for word in canonical_words(c.model, P.degree, degree, weight):
        image = quillen_trace(P, c.model, c.lie, word, c.algebra)
        if not image:
            continue
        if is_nonzero_class(c, image):
            return str(word), image
        words.append(word)
        images.append(image)
    if not images:
        return None
    (n, w), _ = c.to_block_vector(images[0])
    lower = c.matrix(n, w)
    boundaries = [lower.apply(c.to_block_vector(image)[1]) for image in images]
    kernel, _ = sparse_kernel(SparseMatrix.from_columns(lower.rows, boundaries))
    for combination in kernel:
        poly: Poly = {}
        for k, coeff in combination.items():
            add_into(poly, images[k], coeff)
        if is_nonzero_class(c, poly):
            label = " + ".join(f"{format_rational(coeff)}*[{words[k]}]" for k, coeff in sorted(combination.items()))
            return label, poly
    return None


def expected_generators(A: SullivanModel, g: LieAlgebraData, max_degree: int) -> List[Tuple[int, LoopClass]]:
    """Loop-space Hodge classes of piece m_i for every exponent m_i, tagged by exponent index."""
    found = []
    for i, exponent in enumerate(g.exponents):
        found += [(i, cls) for cls in loop_hodge_classes(A, exponent, max_degree)]
    return found


def drinfeld_freeness_check(entry: SpaceModels, g: LieAlgebraData, max_degree: int) -> DrinfeldReport:
    """
    Compare invariant representation homology with the free algebra on Hodge classes.

    Spaces with a Quillen model use the representation complex, and every
    expected generator must be realized by a trace image that is a nonzero
    class; spaces with only a Sullivan model use the relative cochain route.

    Raises:
        InputError: for a non-reductive g or max_degree < 1
    """
    if max_degree < 1:
        raise InputError(f"max degree must be at least 1, got {max_degree}")
    if not g.reductive:
        raise InputError(f"{g.name} is not reductive")
    A = entry.sullivan
    generators = expected_generators(A, g, max_degree)
    traces: List[TraceCheck] = []
    if entry.quillen is not None:
        route = "rep"
        c = build_rep_complex(entry.quillen, g, max_degree)
        invariant = invariant_homology_series(c, g, max_degree)
        polynomials = invariant_generators(g)
        for i, cls in generators:
            weight = sum(cls.weight) if entry.quillen.weighted else None
            hit = find_trace_generator(polynomials[i], c, cls.degree, weight)
            traces.append(
                TraceCheck(
                    polynomial=polynomials[i].name,
                    degree=cls.degree,
                    weight=list(cls.weight),
                    word=hit[0] if hit else None,
                    nonzero=hit is not None,
                )
            )
    else:
        route = "ce"
        invariant = ce_series(build_ce(g, A, degree_window=max_degree, relative=True), max_degree)
    variables = invariant.variables
    weighted = len(variables) == len(A.generators[0].weight) + 1 if A.generators else False
    if weighted:
        exps = [(cls.degree,) + tuple(cls.weight) for _, cls in generators]
    else:
        variables = series_variables(0)
        invariant = invariant.forget_weights()
        exps = [(cls.degree,) for _, cls in generators]
    free = free_graded_series(variables, exps, {"z": max_degree + 1})
    mismatch = free.first_mismatch(invariant)
    ok = mismatch is None and all(t.nonzero for t in traces)
    if mismatch is not None:
        exps, a, b = mismatch
        detail = f"{free.monomial_string(exps) or '1'}: free {a}, invariant {b}"
        logger.warning("Drinfeld check %s/%s fails at %s", entry.name, g.name, detail)
    else:
        detail = None
    return DrinfeldReport(
        space=entry.name,
        group=g.name,
        route=route,
        max_degree=max_degree,
        generators=sorted(cls.degree for _, cls in generators),
        free_series=str(free),
        invariant_series=str(invariant),
        traces=traces,
        verdict="PASS" if ok else "FAIL",
        mismatch=detail,
    )
