"""
Graded-Commutative Algebra Module

Free graded-commutative algebras on finitely many generators, derivations on
them, and the chain complexes they carry. A monomial is a sorted tuple of
generator indices; even generators may repeat, odd ones may not. The sign of
a product is the Koszul sign of the odd-odd transpositions needed to sort it.

``GradedCommComplex`` enumerates the monomial basis per (degree, weight)
block up to a degree cap and builds the sparse differential matrices.
``InvariantSubcomplex`` cuts out the joint kernel of a family of degree-zero
derivations (a Lie algebra action) block by block.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Callable, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

from sympy.polys.domains import QQ

from rephom.core.errors import ConventionError, InputError
from rephom.core.linalg import (
    BoundedChainComplex,
    SparseMatrix,
    SparseVector,
    add_into,
    format_rational,
    homology_dims,
    parallel_map,
    sparse_kernel,
)
from rephom.core.series import PoincareSeries, series_variables

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]
Poly = Dict[Monomial, Any]
Weight = Tuple[int, ...]
BlockKey = Tuple[int, Weight]


@dataclass(frozen=True)
class Generator:
    """
    A free generator.

    Attributes:
        label (str): printable name
        degree (int): homological degree; parity decides commutativity
        weight (Tuple[int, ...]): auxiliary grading preserved by differentials
        g_index (Optional[int]): Lie algebra basis index carried by the generator
        tag (Hashable): what the generator stands for (model generator, monomial ...)
    """

    label: str
    degree: int
    weight: Weight = ()
    g_index: Optional[int] = None
    tag: Hashable = None

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1


class FreeGradedCommAlgebra:
    """Free graded-commutative algebra over QQ on a fixed generator list."""

    def __init__(self, generators: Sequence[Generator]):
        self.generators: Tuple[Generator, ...] = tuple(generators)
        ranks = {len(g.weight) for g in self.generators}
        if len(ranks) > 1:
            raise InputError(f"generators carry weights of different lengths: {sorted(ranks)}")
        self.weight_rank = ranks.pop() if ranks else 0
        self._odd = [g.odd for g in self.generators]
        self._degree = [g.degree for g in self.generators]
        self._weight = [g.weight for g in self.generators]
        self._lookup: Dict[Tuple[Optional[int], Hashable], int] = {}
        for i, g in enumerate(self.generators):
            key = (g.g_index, g.tag)
            if key in self._lookup:
                raise InputError(f"duplicate generator {g.label}")
            self._lookup[key] = i

    def __len__(self) -> int:
        return len(self.generators)

    def index(self, g_index: Optional[int], tag: Hashable) -> int:
        try:
            return self._lookup[(g_index, tag)]
        except KeyError as exc:
            raise InputError(f"no generator for ({g_index}, {tag!r})") from exc

    def has(self, g_index: Optional[int], tag: Hashable) -> bool:
        return (g_index, tag) in self._lookup

    def is_odd(self, i: int) -> bool:
        return self._odd[i]

    def degree(self, mono: Monomial) -> int:
        return sum(self._degree[i] for i in mono)

    def weight(self, mono: Monomial) -> Weight:
        total = [0] * self.weight_rank
        for i in mono:
            for k, w in enumerate(self._weight[i]):
                total[k] += w
        return tuple(total)

    def multiply(self, a: Monomial, b: Monomial) -> Tuple[int, Monomial]:
        """
        Product of two monomials.

        Returns:
            Tuple[int, Monomial]: sign (0 when the product vanishes) and the
            sorted product monomial
        """
        if not a:
            return 1, b
        if not b:
            return 1, a
        odd = self._odd
        sign = 1
        odd_a = [x for x in a if odd[x]]
        for y in b:
            if not odd[y]:
                continue
            for x in odd_a:
                if x == y:
                    return 0, ()
                if x > y:
                    sign = -sign
        return sign, tuple(sorted(a + b))

    def multiply_poly(self, p: Mapping[Monomial, Any], q: Mapping[Monomial, Any]) -> Poly:
        result: Poly = {}
        for ma, ca in p.items():
            for mb, cb in q.items():
                sign, mono = self.multiply(ma, mb)
                if sign:
                    add_into(result, {mono: ca * cb * sign})
        return result

    def derive(
        self, poly: Mapping[Monomial, Any], images: Mapping[int, Mapping[Monomial, Any]], odd: bool = True
    ) -> Poly:
        """
        Apply the derivation determined by its values on generators.

        Args:
            poly (Mapping[Monomial, Any]): element to differentiate
            images (Mapping[int, Poly]): value on each generator (missing = 0)
            odd (bool): whether the derivation has odd degree (Koszul sign
                past every preceding generator) or even degree

        Returns:
            Poly: the image
        """
        result: Poly = {}
        for mono, coeff in poly.items():
            prefix_parity = 0
            for p, x in enumerate(mono):
                image = images.get(x)
                if image:
                    sign = -1 if (odd and prefix_parity) else 1
                    left, right = mono[:p], mono[p + 1 :]
                    for m, c in image.items():
                        s1, lm = self.multiply(left, m)
                        if not s1:
                            continue
                        s2, full = self.multiply(lm, right)
                        if not s2:
                            continue
                        add_into(result, {full: coeff * c * sign * s1 * s2})
                prefix_parity ^= self._odd[x]
        return result

    def _enumerate(self, admissible: Callable[[int, int, Weight], bool]) -> Dict[BlockKey, List[Monomial]]:
        blocks: Dict[BlockKey, List[Monomial]] = defaultdict(list)
        n = len(self.generators)

        def extend(start: int, mono: Monomial, degree: int, weight: Weight) -> None:
            blocks[(degree, weight)].append(mono)
            for i in range(start, n):
                d = degree + self._degree[i]
                w = tuple(a + b for a, b in zip(weight, self._weight[i]))
                if not admissible(i, d, w):
                    continue
                extend(i + 1 if self._odd[i] else i, mono + (i,), d, w)

        extend(0, (), 0, (0,) * self.weight_rank)
        return dict(blocks)

    def monomials(self, max_degree: int) -> Dict[BlockKey, List[Monomial]]:
        """
        All monomials of degree at most ``max_degree``, grouped by block.

        Raises:
            InputError: if a generator has degree < 1 (the enumeration would
                not terminate)
        """
        if any(d < 1 for d in self._degree):
            raise InputError("degree-bounded enumeration needs generators of positive degree")
        return self._enumerate(lambda i, d, w: d <= max_degree)

    def monomials_by_weight(self, max_weight: int) -> Dict[BlockKey, List[Monomial]]:
        """All monomials of total weight at most ``max_weight``, grouped by block."""
        if any(sum(w) < 1 or min(w, default=0) < 0 for w in self._weight):
            raise InputError("weight-bounded enumeration needs generators of positive weight")
        return self._enumerate(lambda i, d, w: sum(w) <= max_weight)

    def format_monomial(self, mono: Monomial) -> str:
        if not mono:
            return "1"
        parts = []
        for i in sorted(set(mono)):
            label = self.generators[i].label
            label = f"({label})" if any(ch in label for ch in "*+- ") else label
            power = mono.count(i)
            parts.append(label if power == 1 else f"{label}^{power}")
        return "".join(parts)

    def format_poly(self, poly: Mapping[Monomial, Any]) -> str:
        if not poly:
            return "0"
        terms = []
        for mono in sorted(poly):
            coeff = poly[mono]
            text = format_rational(coeff)
            body = self.format_monomial(mono)
            terms.append(body if text == "1" else (f"-{body}" if text == "-1" else f"{text}*{body}"))
        return " + ".join(terms).replace("+ -", "- ")


class GradedCommComplex:
    """
    A free graded-commutative DG algebra truncated at a degree cap.

    The differential is a degree -1, weight 0 derivation given on generators.
    Monomials are enumerated up to ``degree_cap + 1`` so that homology is
    exact in every degree up to ``degree_cap``.

    Attributes:
        algebra (FreeGradedCommAlgebra): underlying algebra
        differential (Dict[int, Poly]): image of each generator
        degree_cap (int): highest degree where homology is reported
        blocks (Dict[BlockKey, List[Monomial]]): basis per (degree, weight)
    """

    def __init__(
        self,
        algebra: FreeGradedCommAlgebra,
        differential: Mapping[int, Poly],
        degree_cap: int,
        name: str = "",
        blocks: Optional[Dict[BlockKey, List[Monomial]]] = None,
    ):
        if degree_cap < 0:
            raise InputError(f"degree cap must be nonnegative, got {degree_cap}")
        self.algebra = algebra
        self.differential = {i: dict(p) for i, p in differential.items() if p}
        self.degree_cap = degree_cap
        self.name = name
        self._check_generators()
        self.blocks = blocks if blocks is not None else algebra.monomials(degree_cap + 1)
        self._positions = {key: {m: i for i, m in enumerate(ms)} for key, ms in self.blocks.items()}
        self._matrices: Dict[BlockKey, SparseMatrix] = {}
        logger.info(
            "complex %s: %d generators, %d blocks, %d basis monomials up to degree %d",
            name or "<anonymous>",
            len(algebra),
            len(self.blocks),
            sum(len(ms) for ms in self.blocks.values()),
            degree_cap + 1,
        )

    def _check_generators(self) -> None:
        for i, image in self.differential.items():
            gen = self.algebra.generators[i]
            for mono in image:
                if self.algebra.degree(mono) != gen.degree - 1 or self.algebra.weight(mono) != gen.weight:
                    raise ConventionError(f"d({gen.label}) is not homogeneous of degree -1 and weight 0")
            square = self.algebra.derive(image, self.differential)
            if square:
                raise ConventionError(f"d^2 != 0 on {gen.label}: {self.algebra.format_poly(square)}")

    @property
    def weight_rank(self) -> int:
        return self.algebra.weight_rank

    def weights(self) -> List[Weight]:
        return sorted({w for (_, w) in self.blocks})

    def basis(self, degree: int, weight: Weight) -> List[Monomial]:
        return self.blocks.get((degree, tuple(weight)), [])

    def dim(self, degree: int, weight: Weight) -> int:
        return len(self.basis(degree, weight))

    def position(self, degree: int, weight: Weight, mono: Monomial) -> int:
        return self._positions[(degree, tuple(weight))][mono]

    def apply(self, poly: Mapping[Monomial, Any]) -> Poly:
        return self.algebra.derive(poly, self.differential)

    def to_block_vector(self, poly: Mapping[Monomial, Any]) -> Tuple[BlockKey, SparseVector]:
        """Coordinates of a homogeneous element in its block basis."""
        if not poly:
            raise InputError("the zero element has no block")
        keys = {(self.algebra.degree(m), self.algebra.weight(m)) for m in poly}
        if len(keys) != 1:
            raise InputError("element is not homogeneous")
        key = keys.pop()
        if key not in self._positions:
            raise InputError(f"block {key} lies beyond the truncation")
        positions = self._positions[key]
        return key, {positions[m]: c for m, c in poly.items()}

    def matrix(self, degree: int, weight: Weight) -> SparseMatrix:
        """The differential from block (degree, weight) to (degree - 1, weight)."""
        key = (degree, tuple(weight))
        if key in self._matrices:
            return self._matrices[key]
        source = self.basis(degree, weight)
        target_positions = self._positions.get((degree - 1, tuple(weight)), {})
        columns = []
        for mono in source:
            image = self.apply({mono: QQ(1)})
            column = {}
            for m, c in image.items():
                if m not in target_positions:
                    raise ConventionError(f"image of {self.algebra.format_monomial(mono)} leaves the truncation")
                column[target_positions[m]] = c
            columns.append(column)
        matrix = SparseMatrix.from_columns(len(target_positions), columns)
        self._matrices[key] = matrix
        return matrix

    def chain_complex(self, weight: Weight, top: Optional[int] = None) -> BoundedChainComplex:
        top = self.degree_cap + 1 if top is None else top
        bottom = min((n for (n, w) in self.blocks if w == tuple(weight)), default=0)
        dims = {n: self.dim(n, weight) for n in range(bottom, top + 1)}
        differentials = {n: self.matrix(n, weight) for n in range(bottom + 1, top + 1)}
        return BoundedChainComplex(bottom, top, dims, differentials)

    def homology(self, max_degree: Optional[int] = None, threads: Optional[int] = None) -> Dict[BlockKey, int]:
        """
        Homology dimensions per (degree, weight) up to ``max_degree``.

        Raises:
            InputError: if ``max_degree`` exceeds the degree cap
        """
        max_degree = self.degree_cap if max_degree is None else max_degree
        if max_degree > self.degree_cap:
            raise InputError(f"max degree {max_degree} exceeds the degree cap {self.degree_cap}")
        weights = self.weights()
        per_weight = parallel_map(lambda w: homology_dims(self.chain_complex(w, max_degree + 1)), weights, threads)
        result = {}
        for w, dims in zip(weights, per_weight):
            for n, h in dims.items():
                if n <= max_degree and h:
                    result[(n, w)] = h
        return dict(sorted(result.items()))

    def euler_by_weight(self, max_degree: int) -> Dict[Weight, int]:
        """Sum of (-1)^n dim C_{n,w} over n <= max_degree, per weight."""
        totals: Dict[Weight, int] = defaultdict(int)
        for (n, w), ms in self.blocks.items():
            if n <= max_degree:
                totals[w] += (-1) ** (n % 2) * len(ms)
        return {w: c for w, c in sorted(totals.items()) if c}


def action_is_diagonal(images: Mapping[int, Poly]) -> bool:
    """Whether a degree-zero derivation scales every generator."""
    return all(set(image) <= {(i,)} for i, image in images.items())


class InvariantSubcomplex:
    """
    Joint kernel of a family of degree-zero derivations on a complex.

    The derivations must commute with the differential. Diagonal members of
    the family first restrict each block to zero-eigenvalue monomials; the
    kernel of the stacked remaining actions is taken on that subspace.

    Attributes:
        complex (GradedCommComplex): ambient complex
        actions (List[Dict[int, Poly]]): generator images of each derivation
    """

    def __init__(self, complex: GradedCommComplex, actions: Sequence[Mapping[int, Poly]]):
        self.complex = complex
        self.actions = [dict(a) for a in actions]
        diagonal = [a for a in self.actions if action_is_diagonal(a)]
        self._others = [a for a in self.actions if not action_is_diagonal(a)]
        self._eigen = [
            {i: image.get((i,), QQ(0)) for i, image in a.items() if image.get((i,))} for a in diagonal
        ]
        self._invariants: Dict[BlockKey, Tuple[List[SparseVector], List[int]]] = {}
        self._matrices: Dict[BlockKey, SparseMatrix] = {}

    def act(self, poly: Mapping[Monomial, Any], action: Mapping[int, Poly]) -> Poly:
        return self.complex.algebra.derive(poly, action, odd=False)

    def is_invariant(self, poly: Mapping[Monomial, Any]) -> bool:
        return all(not self.act(poly, a) for a in self.actions)

    def _zero_eigen(self, mono: Monomial) -> bool:
        return all(sum((eigen.get(x, 0) for x in mono), QQ(0)) == 0 for eigen in self._eigen)

    def invariants(self, degree: int, weight: Weight) -> Tuple[List[SparseVector], List[int]]:
        """
        Basis of the invariant subspace of a block.

        Returns:
            Tuple[List[SparseVector], List[int]]: vectors in block coordinates,
            and the positions at which they read as unit vectors
        """
        key = (degree, tuple(weight))
        if key in self._invariants:
            return self._invariants[key]
        basis = self.complex.basis(degree, weight)
        zero_cols = [p for p, mono in enumerate(basis) if self._zero_eigen(mono)]
        if not self._others or not zero_cols:
            result = ([{p: QQ(1)} for p in zero_cols], list(zero_cols))
        else:
            size = len(basis)
            columns = []
            for p in zero_cols:
                column: SparseVector = {}
                for k, action in enumerate(self._others):
                    for m, c in self.act({basis[p]: QQ(1)}, action).items():
                        column[k * size + self.complex.position(degree, weight, m)] = c
                columns.append(column)
            stacked = SparseMatrix.from_columns(size * len(self._others), columns)
            kernel, free = sparse_kernel(stacked)
            vectors = [{zero_cols[c]: v for c, v in vector.items()} for vector in kernel]
            result = (vectors, [zero_cols[c] for c in free])
        self._invariants[key] = result
        logger.debug("block %s: %d of %d monomials invariant", key, len(result[0]), len(basis))
        return result

    def dim(self, degree: int, weight: Weight) -> int:
        return len(self.invariants(degree, weight)[0])

    def matrix(self, degree: int, weight: Weight) -> SparseMatrix:
        """The restricted differential in invariant coordinates."""
        key = (degree, tuple(weight))
        if key in self._matrices:
            return self._matrices[key]
        vectors, _ = self.invariants(degree, weight)
        _, target_free = self.invariants(degree - 1, weight)
        full = self.complex.matrix(degree, weight)
        columns = []
        for vector in vectors:
            image = full.apply(vector)
            columns.append({k: image[p] for k, p in enumerate(target_free) if p in image})
        matrix = SparseMatrix.from_columns(len(target_free), columns)
        self._matrices[key] = matrix
        return matrix

    def chain_complex(self, weight: Weight, top: Optional[int] = None) -> BoundedChainComplex:
        top = self.complex.degree_cap + 1 if top is None else top
        bottom = min((n for (n, w) in self.complex.blocks if w == tuple(weight)), default=0)
        dims = {n: self.dim(n, weight) for n in range(bottom, top + 1)}
        differentials = {n: self.matrix(n, weight) for n in range(bottom + 1, top + 1)}
        return BoundedChainComplex(bottom, top, dims, differentials)

    def homology(self, max_degree: Optional[int] = None, threads: Optional[int] = None) -> Dict[BlockKey, int]:
        max_degree = self.complex.degree_cap if max_degree is None else max_degree
        if max_degree > self.complex.degree_cap:
            raise InputError(f"max degree {max_degree} exceeds the degree cap {self.complex.degree_cap}")
        weights = self.complex.weights()
        per_weight = parallel_map(lambda w: homology_dims(self.chain_complex(w, max_degree + 1)), weights, threads)
        result = {}
        for w, dims in zip(weights, per_weight):
            for n, h in dims.items():
                if n <= max_degree and h:
                    result[(n, w)] = h
        return dict(sorted(result.items()))

    def euler_by_weight(self, max_degree: int) -> Dict[Weight, int]:
        totals: Dict[Weight, int] = defaultdict(int)
        for (n, w) in self.complex.blocks:
            if n <= max_degree:
                totals[w] += (-1) ** (n % 2) * self.dim(n, w)
        return {w: c for w, c in sorted(totals.items()) if c}


def dims_to_series(dims: Mapping[BlockKey, int], weight_rank: int, max_degree: int):
    """Turn per-block dimensions into a weighted Poincare series truncated above ``max_degree``."""
    variables = series_variables(weight_rank)
    terms: Dict[Tuple[int, ...], int] = defaultdict(int)
    for (n, w), h in dims.items():
        terms[(n,) + tuple(w)] += h
    return PoincareSeries.from_terms(variables, terms, {"z": max_degree + 1})
