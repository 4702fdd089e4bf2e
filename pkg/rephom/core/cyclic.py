"""
Cyclic Homology Module

Hodge pieces of reduced cyclic homology for free Sullivan models, computed
on Kahler forms. For A = (Lambda(g_1..g_k), d_A) the forms algebra is free on
g_i (homological degree -|g_i|) and dg_i (degree -|g_i| + 1), both carrying the
weight of g_i. The de Rham differential d sends g_i to dg_i; the internal
differential extends d_A with the rule del(dg) = -d(del g), so d del + del d = 0.

The m-th Hodge piece is the homology of Omega^m / d Omega^{m-1} under del.
The degree of dg already contains the shift by m, and the S^1-equivariant
loop homology class dual to a cyclic class of degree n sits in degree -n - 1.

``connes_cyclic_dims`` is an independent brute-force route through the Connes
complex A-bar^{(x) n+1} / (1 - t), used to cross-check the Hodge pieces.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ

from rephom.core.errors import ConventionError, InputError
from rephom.core.gca import BlockKey, FreeGradedCommAlgebra, Generator, Monomial, Poly, Weight
from rephom.core.linalg import (
    BoundedChainComplex,
    SparseMatrix,
    SparseVector,
    add_into,
    floor_rational,
    homology_dims,
    in_span,
    rank,
    reduce_modulo,
    sparse_kernel,
)
from rephom.core.models import SullivanModel

logger = logging.getLogger(__name__)

FormKey = Tuple[int, int, Weight]


class FormComplex:
    """
    Kahler forms on a Sullivan model, truncated by total weight.

    Attributes:
        sullivan (SullivanModel): the model A
        weight_cutoff (int): largest total weight enumerated
        algebra (FreeGradedCommAlgebra): forms algebra; g_i at index i, dg_i at index k + i
        blocks (Dict[FormKey, List[Monomial]]): basis per (form degree, degree, weight)
    """

    def __init__(self, sullivan: SullivanModel, weight_cutoff: int):
        if weight_cutoff < 0:
            raise InputError(f"weight cutoff must be nonnegative, got {weight_cutoff}")
        for gen in sullivan.generators:
            if sum(gen.weight) < 1 or min(gen.weight, default=0) < 0:
                raise InputError(f"generator {gen.label} of {sullivan.name} needs a positive weight")
        self.sullivan = sullivan
        self.weight_cutoff = weight_cutoff
        k = len(sullivan.generators)
        self.rank = k
        forms = [Generator(g.label, -g.degree, g.weight, None, ("g", g.label)) for g in sullivan.generators]
        forms += [Generator(f"d{g.label}", 1 - g.degree, g.weight, None, ("d", g.label)) for g in sullivan.generators]
        self.algebra = FreeGradedCommAlgebra(forms)
        self.de_rham = {i: {(k + i,): QQ(1)} for i in range(k)}
        self.internal: Dict[int, Poly] = {}
        for i, image in sullivan.differential_images().items():
            self.internal[i] = dict(image)
            self.internal[k + i] = {m: -c for m, c in self.algebra.derive(image, self.de_rham).items()}
        self._check()
        self.blocks: Dict[FormKey, List[Monomial]] = defaultdict(list)
        for (n, w), monos in self.algebra.monomials_by_weight(weight_cutoff).items():
            if not any(w):
                continue
            for mono in monos:
                self.blocks[(self.form_degree(mono), n, w)].append(mono)
        self.blocks = dict(self.blocks)
        self._positions = {key: {m: i for i, m in enumerate(ms)} for key, ms in self.blocks.items()}
        self._exact: Dict[FormKey, List[SparseVector]] = {}
        logger.info("forms on %s up to weight %d: %d blocks", sullivan.name, weight_cutoff, len(self.blocks))

    def _check(self) -> None:
        for i in range(2 * self.rank):
            gen = {(i,): QQ(1)}
            d_del = self.d(self.delta(gen))
            del_d = self.delta(self.d(gen))
            total: Poly = {}
            add_into(total, d_del)
            add_into(total, del_d)
            if total or self.delta(self.delta(gen)) or self.d(self.d(gen)):
                raise ConventionError(f"forms differentials fail to anticommute on {self.algebra.generators[i].label}")

    def form_degree(self, mono: Monomial) -> int:
        return sum(1 for x in mono if x >= self.rank)

    def d(self, poly: Poly) -> Poly:
        return self.algebra.derive(poly, self.de_rham)

    def delta(self, poly: Poly) -> Poly:
        return self.algebra.derive(poly, self.internal)

    def basis(self, m: int, degree: int, weight: Weight) -> List[Monomial]:
        return self.blocks.get((m, degree, tuple(weight)), [])

    def degrees(self, m: int, weight: Weight) -> List[int]:
        return sorted(n for (mm, n, w) in self.blocks if mm == m and w == tuple(weight))

    def weights(self, m: int) -> List[Weight]:
        return sorted({w for (mm, _, w) in self.blocks if mm == m})

    def _vector(self, key: FormKey, poly: Poly) -> SparseVector:
        positions = self._positions.get(key, {})
        vector = {}
        for mono, c in poly.items():
            if mono not in positions:
                raise ConventionError(f"{self.algebra.format_monomial(mono)} lies outside block {key}")
            vector[positions[mono]] = c
        return vector

    def exact_columns(self, m: int, degree: int, weight: Weight) -> List[SparseVector]:
        """Images under d of the basis of Omega^{m-1} landing in (m, degree, weight)."""
        if m == 0:
            return []
        target = (m, degree, tuple(weight))
        if target not in self._exact:
            basis = self.basis(m - 1, degree - 1, weight)
            self._exact[target] = [self._vector(target, self.d({mono: QQ(1)})) for mono in basis]
        return self._exact[target]

    def boundary_columns(self, m: int, degree: int, weight: Weight) -> List[SparseVector]:
        """Images under del of the basis of (m, degree, weight), in (m, degree - 1, weight)."""
        target = (m, degree - 1, tuple(weight))
        return [self._vector(target, self.delta({mono: QQ(1)})) for mono in self.basis(m, degree, weight)]

    def _key_of(self, poly: Poly) -> FormKey:
        keys = {(self.form_degree(mono), self.algebra.degree(mono), self.algebra.weight(mono)) for mono in poly}
        if len(keys) != 1:
            raise InputError("form is not homogeneous")
        return keys.pop()

    def is_exact(self, poly: Poly) -> bool:
        """Whether a homogeneous form lies in d Omega."""
        if not poly:
            return True
        m, n, w = self._key_of(poly)
        rows = len(self.basis(m, n, w))
        return in_span(self.exact_columns(m, n, w), self._vector((m, n, w), poly), rows)

    def is_boundary_mod_exact(self, poly: Poly) -> bool:
        """Whether a homogeneous form lies in del Omega + d Omega."""
        if not poly:
            return True
        m, n, w = self._key_of(poly)
        rows = len(self.basis(m, n, w))
        columns = self.boundary_columns(m, n + 1, w) + self.exact_columns(m, n, w)
        return in_span(columns, self._vector((m, n, w), poly), rows)

    def reduce_exact(self, poly: Poly) -> Poly:
        """
        Canonical representative of a form modulo d Omega, reduced block by block.

        Two forms with exact difference reduce to the same polynomial, so a form is
        exact iff it reduces to zero.
        """
        parts: Dict[FormKey, Poly] = defaultdict(dict)
        for mono, c in poly.items():
            if c:
                key = (self.form_degree(mono), self.algebra.degree(mono), self.algebra.weight(mono))
                parts[key][mono] = c
        reduced: Poly = {}
        for (m, n, w), part in parts.items():
            basis = self.basis(m, n, w)
            if not basis:
                raise InputError(f"form of weight {w} exceeds the cutoff {self.weight_cutoff}")
            vector = reduce_modulo(self.exact_columns(m, n, w), self._vector((m, n, w), part), len(basis))
            reduced.update({basis[j]: c for j, c in vector.items() if c})
        return reduced

    def product(self, factors: Sequence[int]) -> Poly:
        """Product of form generators, by index, in the written order."""
        poly: Poly = {(): QQ(1)}
        for i in factors:
            poly = self.algebra.multiply_poly(poly, {(i,): QQ(1)})
        return poly

    def _rank(self, rows: int, columns: Sequence[SparseVector]) -> int:
        if not columns or not rows:
            return 0
        return rank(SparseMatrix.from_columns(rows, list(columns)))

    def quotient_homology(self, m: int, weight: Weight) -> Dict[int, int]:
        """Homology of (Omega^m / d Omega^{m-1})_weight under del, by degree."""
        degrees = self.degrees(m, weight)
        if not degrees:
            return {}
        lo, hi = degrees[0], degrees[-1]
        size = {n: len(self.basis(m, n, weight)) for n in range(lo - 1, hi + 2)}
        exact_rank = {n: self._rank(size[n], self.exact_columns(m, n, weight)) for n in range(lo - 1, hi + 2)}
        boundary_rank = {}
        for n in range(lo, hi + 2):
            columns = self.boundary_columns(m, n, weight) + self.exact_columns(m, n - 1, weight)
            boundary_rank[n] = self._rank(size[n - 1], columns) - exact_rank[n - 1]
        result = {}
        for n in range(lo, hi + 1):
            h = size[n] - exact_rank[n] - boundary_rank[n] - boundary_rank.get(n + 1, 0)
            if h < 0:
                raise ConventionError(f"negative homology dimension in block {(m, n, weight)}")
            if h:
                result[n] = h
        return result

    def representatives(self, m: int, degree: int, weight: Weight) -> List[Poly]:
        """Forms whose classes span the homology of the quotient complex in one block."""
        basis = self.basis(m, degree, weight)
        rows = len(basis)
        if not rows:
            return []
        target = len(self.basis(m, degree - 1, weight))
        boundary = self.boundary_columns(m, degree, weight)
        exact_below = self.exact_columns(m, degree - 1, weight)
        # x is a relative cycle iff (x, e) lies in the kernel of [del | d] for some e.
        stacked = SparseMatrix.from_columns(max(target, 0), boundary + exact_below)
        kernel, _ = sparse_kernel(stacked) if target else ([{j: QQ(1)} for j in range(rows)], [])
        cycles = [{j: c for j, c in v.items() if j < rows} for v in kernel]
        span = self.boundary_columns(m, degree + 1, weight) + self.exact_columns(m, degree, weight)
        reps: List[Poly] = []
        for z in cycles:
            if z and not in_span(span, z, rows):
                span.append(z)
                reps.append({basis[j]: c for j, c in z.items()})
        return reps


@dataclass
class HodgeCyclic:
    """
    One Hodge piece of reduced cyclic homology.

    Attributes:
        m (int): form degree
        dims (Dict[BlockKey, int]): dimension per (degree, weight)
        classes (Dict[BlockKey, List[Poly]]): representatives per block
        forms (FormComplex): the ambient forms complex
    """

    m: int
    dims: Dict[BlockKey, int]
    classes: Dict[BlockKey, List[Poly]] = field(default_factory=dict)
    forms: Optional[FormComplex] = None

    def format_class(self, poly: Poly) -> str:
        return self.forms.algebra.format_poly(poly) if self.forms else str(poly)


def hodge_cyclic(A: SullivanModel, m: int, weight_cutoff: int, with_classes: bool = True) -> HodgeCyclic:
    """
    The m-th Hodge piece of reduced cyclic homology in weights up to ``weight_cutoff``.

    Raises:
        InputError: for negative m or nonpositive weights
    """
    if m < 0:
        raise InputError(f"form degree must be nonnegative, got {m}")
    forms = FormComplex(A, weight_cutoff)
    dims: Dict[BlockKey, int] = {}
    classes: Dict[BlockKey, List[Poly]] = {}
    for w in forms.weights(m):
        for n, h in forms.quotient_homology(m, w).items():
            dims[(n, w)] = h
            if with_classes:
                classes[(n, w)] = forms.representatives(m, n, w)
    return HodgeCyclic(m, dict(sorted(dims.items())), classes, forms)


def loop_weight_cutoff(A: SullivanModel, max_degree: int) -> int:
    """Weight beyond which no class reaches loop degree ``max_degree``."""
    ratios = []
    for g in A.generators:
        total = sum(g.weight)
        if total < 1:
            raise InputError(f"generator {g.label} of {A.name} needs a positive weight")
        ratios += [QQ(g.degree, total), QQ(g.degree - 1, total)]
    rho = min(ratios)
    if rho <= 0:
        raise InputError(f"{A.name} has a generator of degree below 2")
    return floor_rational((max_degree + 1) / rho)


@dataclass(frozen=True)
class LoopClass:
    degree: int
    weight: Weight
    representative: str


def loop_hodge_classes(A: SullivanModel, m: int, max_degree: int) -> List[LoopClass]:
    """Basis of the m-th Hodge piece of reduced S^1-equivariant loop homology up to ``max_degree``."""
    piece = hodge_cyclic(A, m, loop_weight_cutoff(A, max_degree))
    found = []
    for (n, w), reps in piece.classes.items():
        if -n - 1 <= max_degree:
            found += [LoopClass(-n - 1, w, piece.format_class(r)) for r in reps]
    return sorted(found, key=lambda c: (c.degree, c.weight, c.representative))


def loop_hodge_dims(A: SullivanModel, m: int, max_degree: int) -> Dict[int, int]:
    """Dimensions of the m-th Hodge piece of loop homology by degree, up to ``max_degree``."""
    piece = hodge_cyclic(A, m, loop_weight_cutoff(A, max_degree), with_classes=False)
    dims: Dict[int, int] = defaultdict(int)
    for (n, _), h in piece.dims.items():
        if -n - 1 <= max_degree:
            dims[-n - 1] += h
    return dict(sorted(dims.items()))


def reduction_coefficient_holds(A: SullivanModel, r: int, m: int, k: int) -> bool:
    """
    del[z^k s (ds)^m] + (k + (m+1)(r+1)) [z^{k+r} dz s (ds)^{m-1}] is exact.

    Args:
        A (SullivanModel): a model with generators z, s and d s = z^{r+1}
        r (int): the exponent in the model
        m (int): form degree, at least 1
        k (int): power of z in the source form
    """
    if m < 1:
        raise InputError(f"form degree must be at least 1, got {m}")
    z, s = A.index("z"), A.index("s")
    forms = FormComplex(A, k + r + (m + 1) * (r + 1))
    dz, ds = forms.rank + z, forms.rank + s
    source = forms.product([z] * k + [s] + [ds] * m)
    target = forms.product([z] * (k + r) + [dz, s] + [ds] * (m - 1))
    residue = dict(forms.delta(source))
    add_into(residue, target, QQ(k + (m + 1) * (r + 1)))
    return forms.is_exact({mono: c for mono, c in residue.items() if c})


def total_hodge_dims(A: SullivanModel, weight_cutoff: int) -> Dict[BlockKey, int]:
    """Sum over m of the Hodge pieces, per (degree, weight)."""
    totals: Dict[BlockKey, int] = defaultdict(int)
    for m in range(weight_cutoff + 1):
        for key, h in hodge_cyclic(A, m, weight_cutoff, with_classes=False).dims.items():
            totals[key] += h
    return dict(sorted(totals.items()))


class ConnesComplex:
    """
    Reduced Connes complex of a weight-truncated Sullivan model.

    Chains are tuples (a_0, .., a_n) of nonconstant monomials modulo the
    signed cyclic operator t(a_0..a_n) = (-1)^{n + |a_n|(|a_0| + .. + |a_{n-1}|)} (a_n, a_0, ..).
    """

    def __init__(self, sullivan: SullivanModel, weight_cutoff: int):
        self.sullivan = sullivan
        self.A = sullivan.algebra
        self.weight_cutoff = weight_cutoff
        monos = [m for ms in self.A.monomials_by_weight(weight_cutoff).values() for m in ms if m]
        self.monomials = sorted(monos)
        self._parity = {m: self.A.degree(m) % 2 for m in self.monomials}
        self.blocks: Dict[BlockKey, List[Tuple[Monomial, ...]]] = defaultdict(list)
        for chain in self._chains():
            sign, rep = self.normalize(chain)
            if sign and rep == chain:
                self.blocks[self._key(chain)].append(chain)
        self.blocks = {k: sorted(v) for k, v in self.blocks.items()}
        self._positions = {k: {c: i for i, c in enumerate(v)} for k, v in self.blocks.items()}

    def _chains(self):
        def extend(prefix: Tuple[Monomial, ...], weight: int):
            if prefix:
                yield prefix
            for m in self.monomials:
                w = weight + sum(self.A.weight(m))
                if w <= self.weight_cutoff:
                    yield from extend(prefix + (m,), w)

        yield from extend((), 0)

    def _key(self, chain: Tuple[Monomial, ...]) -> BlockKey:
        degree = len(chain) - 1 - sum(self.A.degree(a) for a in chain)
        weight = [0] * self.A.weight_rank
        for a in chain:
            for k, w in enumerate(self.A.weight(a)):
                weight[k] += w
        return degree, tuple(weight)

    def rotate(self, chain: Tuple[Monomial, ...]) -> Tuple[int, Tuple[Monomial, ...]]:
        n = len(chain) - 1
        last = self._parity[chain[-1]]
        before = sum(self._parity[a] for a in chain[:-1])
        return (-1) ** ((n + last * before) % 2), (chain[-1],) + chain[:-1]

    def normalize(self, chain: Tuple[Monomial, ...]) -> Tuple[int, Optional[Tuple[Monomial, ...]]]:
        """Sign and orbit representative with chain = sign * representative, or (0, None) for a zero orbit."""
        current, sign = chain, 1
        best, best_sign = chain, 1
        for _ in range(len(chain)):
            s, current = self.rotate(current)
            sign *= s
            if current == chain and sign == -1:
                return 0, None
            if current < best:
                best, best_sign = current, sign
        return best_sign, best

    def _add(self, out: Dict[Tuple[Monomial, ...], Any], chain: Tuple[Monomial, ...], coeff: Any) -> None:
        sign, rep = self.normalize(chain)
        if sign:
            add_into(out, {rep: coeff * sign})

    def differential(self, chain: Tuple[Monomial, ...]) -> Dict[Tuple[Monomial, ...], Any]:
        """Hochschild b plus the internal differential, on orbit representatives."""
        out: Dict[Tuple[Monomial, ...], Any] = {}
        n = len(chain) - 1
        if n >= 1:
            for i in range(n):
                s, prod = self.A.multiply(chain[i], chain[i + 1])
                if s:
                    self._add(out, chain[:i] + (prod,) + chain[i + 2 :], QQ((-1) ** i * s))
            last = self._parity[chain[-1]]
            before = sum(self._parity[a] for a in chain[:-1])
            s, prod = self.A.multiply(chain[-1], chain[0])
            if s:
                self._add(out, (prod,) + chain[1:-1], QQ((-1) ** ((n + last * before) % 2) * s))
        passed = 0
        for i, a in enumerate(chain):
            for c, coeff in self.sullivan.apply({a: QQ(1)}).items():
                self._add(out, chain[:i] + (c,) + chain[i + 1 :], coeff * (-1) ** ((n + passed) % 2))
            passed += self._parity[a]
        return out

    def homology(self) -> Dict[BlockKey, int]:
        result: Dict[BlockKey, int] = {}
        for w in sorted({w for (_, w) in self.blocks}):
            degrees = sorted(n for (n, ww) in self.blocks if ww == w)
            lo, hi = degrees[0], degrees[-1]
            dims = {n: len(self.blocks.get((n, w), [])) for n in range(lo, hi + 1)}
            differentials = {}
            for n in range(lo + 1, hi + 1):
                target = self._positions.get((n - 1, w), {})
                columns = []
                for chain in self.blocks.get((n, w), []):
                    columns.append({target[c]: v for c, v in self.differential(chain).items()})
                differentials[n] = SparseMatrix.from_columns(dims[n - 1], columns)
            for n, h in homology_dims(BoundedChainComplex(lo, hi, dims, differentials)).items():
                if h:
                    result[(n, w)] = h
        return dict(sorted(result.items()))


def connes_cyclic_dims(A: SullivanModel, weight_cutoff: int) -> Dict[BlockKey, int]:
    """Reduced cyclic homology of A per (degree, weight) up to ``weight_cutoff``, from the Connes complex."""
    return ConnesComplex(A, weight_cutoff).homology()
