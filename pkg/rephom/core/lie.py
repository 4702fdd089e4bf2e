"""
Lie Algebra Module

Finite-dimensional Lie algebras over QQ given by structure constants, the
built-in reductive examples (constructed from their defining matrices), the
cobracket on the dual, the coadjoint action on free algebras built from g*,
and invariant polynomials stored as fully polarized symmetric tensors.
"""

import itertools
import logging
import re
from dataclasses import dataclass, field
from functools import reduce
from math import factorial
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from sympy import Matrix, zeros
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from rephom.core.errors import InputError
from rephom.core.gca import FreeGradedCommAlgebra, Generator, GradedCommComplex, Poly, Weight
from rephom.core.linalg import SparseMatrix, SparseVector, add_into, format_rational, solve, to_rational

logger = logging.getLogger(__name__)

Bracket = Dict[int, Any]


@dataclass(frozen=True, eq=False)
class LieAlgebraData:
    """
    A Lie algebra over QQ by structure constants.

    Attributes:
        name (str): identifier (``sl2``, ``torus(2)`` or a file stem)
        basis_labels (Tuple[str, ...]): names of the basis vectors
        brackets (Dict[Tuple[int, int], Bracket]): coordinates of [x_i, x_j] for i < j
        exponents (Tuple[int, ...]): exponents m_1..m_l, one per invariant generator
        defining_rep (Optional[Tuple[Matrix, ...]]): images of the basis in gl_n
        root_system_id (Optional[str]): matching root system type, e.g. ``A2``
        reductive (bool): whether invariants may be taken blockwise
        invariant_spec (Tuple[Tuple[str, int], ...]): how invariant generators are built
    """

    name: str
    basis_labels: Tuple[str, ...]
    brackets: Dict[Tuple[int, int], Bracket]
    exponents: Tuple[int, ...]
    defining_rep: Optional[Tuple[Matrix, ...]] = None
    root_system_id: Optional[str] = None
    reductive: bool = True
    invariant_spec: Tuple[Tuple[str, int], ...] = ()
    _domain_rep: List[DomainMatrix] = field(default_factory=list, repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis_labels)

    @property
    def rank(self) -> int:
        return len(self.exponents)

    @property
    def structure_constants(self) -> Dict[Tuple[int, int], Bracket]:
        """Coordinates of [x_i, x_j] for every ordered pair with a nonzero bracket."""
        full = {}
        for (i, j), coords in self.brackets.items():
            full[(i, j)] = dict(coords)
            full[(j, i)] = {k: -c for k, c in coords.items()}
        return full

    def bracket_basis(self, i: int, j: int) -> Bracket:
        if i == j:
            return {}
        if i < j:
            return self.brackets.get((i, j), {})
        return {k: -c for k, c in self.brackets.get((j, i), {}).items()}

    def structure_constant(self, k: int, i: int, j: int) -> Any:
        """The x_k coordinate c^k_ij of [x_i, x_j]."""
        return self.bracket_basis(i, j).get(k, QQ(0))

    def bracket(self, x: Mapping[int, Any], y: Mapping[int, Any]) -> Bracket:
        result: Bracket = {}
        for i, a in x.items():
            for j, b in y.items():
                add_into(result, self.bracket_basis(i, j), a * b)
        return result

    def domain_rep(self) -> List[DomainMatrix]:
        if self.defining_rep is None:
            raise InputError(f"{self.name} has no defining representation")
        if not self._domain_rep:
            self._domain_rep.extend(DomainMatrix.from_Matrix(m).convert_to(QQ) for m in self.defining_rep)
        return self._domain_rep

    def index_of(self, label: str) -> int:
        try:
            return self.basis_labels.index(label)
        except ValueError as exc:
            raise InputError(f"{self.name} has no basis vector {label!r}") from exc


def jacobi_failures(g: LieAlgebraData) -> List[Tuple[int, int, int]]:
    """Triples i < j < k where the cyclic Jacobi sum does not vanish."""
    failures = []
    for i, j, k in itertools.combinations(range(g.dim), 3):
        total: Bracket = {}
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            add_into(total, g.bracket(g.bracket_basis(a, b), {c: QQ(1)}))
        if total:
            failures.append((i, j, k))
    return failures


def defining_rep_failures(g: LieAlgebraData) -> List[Tuple[int, int]]:
    """Pairs where the matrix commutator disagrees with the structure constants."""
    if g.defining_rep is None:
        return []
    mats = g.defining_rep
    failures = []
    for i, j in itertools.combinations(range(g.dim), 2):
        expected = zeros(*mats[0].shape)
        for k, c in g.bracket_basis(i, j).items():
            expected += mats[k] * QQ.to_sympy(c)
        if mats[i] * mats[j] - mats[j] * mats[i] != expected:
            failures.append((i, j))
    return failures


def validate_lie_algebra(g: LieAlgebraData) -> LieAlgebraData:
    """
    Check antisymmetric storage, the Jacobi identity and the defining representation.

    Raises:
        InputError: naming the first violated identity
    """
    for (i, j), coords in g.brackets.items():
        if not (0 <= i < j < g.dim) or any(not (0 <= k < g.dim) for k in coords):
            raise InputError(f"{g.name}: bracket index out of range at ({i}, {j})")
    failures = jacobi_failures(g)
    if failures:
        i, j, k = (g.basis_labels[x] for x in failures[0])
        raise InputError(f"{g.name}: Jacobi identity fails on ({i}, {j}, {k})")
    rep_failures = defining_rep_failures(g)
    if rep_failures:
        i, j = (g.basis_labels[x] for x in rep_failures[0])
        raise InputError(f"{g.name}: defining representation is not a homomorphism on ({i}, {j})")
    if g.defining_rep is not None and len(g.defining_rep) != g.dim:
        raise InputError(f"{g.name}: {len(g.defining_rep)} representation matrices for dimension {g.dim}")
    return g


def from_matrices(
    name: str,
    labels: Sequence[str],
    matrices: Sequence[Matrix],
    exponents: Sequence[int],
    root_system_id: Optional[str] = None,
    invariant_spec: Sequence[Tuple[str, int]] = (),
) -> LieAlgebraData:
    """
    Build a Lie algebra from a basis of a matrix Lie algebra.

    Structure constants are found by solving for the coordinates of every
    commutator in the given basis.

    Raises:
        InputError: if a commutator leaves the span of the basis
    """
    size = matrices[0].shape[0] * matrices[0].shape[1]
    columns = [{p: to_rational(v) for p, v in enumerate(m) if v} for m in matrices]
    basis = SparseMatrix.from_columns(size, columns)
    brackets = {}
    for i, j in itertools.combinations(range(len(matrices)), 2):
        commutator = matrices[i] * matrices[j] - matrices[j] * matrices[i]
        target = {p: to_rational(v) for p, v in enumerate(commutator) if v}
        if not target:
            continue
        try:
            coords = solve(basis, target)
        except InputError as exc:
            raise InputError(f"{name}: [{labels[i]}, {labels[j]}] is not in the span of the basis") from exc
        brackets[(i, j)] = coords
    g = LieAlgebraData(
        name=name,
        basis_labels=tuple(labels),
        brackets=brackets,
        exponents=tuple(exponents),
        defining_rep=tuple(Matrix(m) for m in matrices),
        root_system_id=root_system_id,
        invariant_spec=tuple(invariant_spec),
    )
    return validate_lie_algebra(g)


def _unit(n: int, i: int, j: int) -> Matrix:
    m = zeros(n, n)
    m[i, j] = 1
    return m


def _sl(n: int) -> LieAlgebraData:
    labels, mats = [], []
    for i, j in itertools.combinations(range(n), 2):
        labels.append("e" if n == 2 else f"e{i + 1}{j + 1}")
        mats.append(_unit(n, i, j))
    for i in range(n - 1):
        labels.append("h" if n == 2 else f"h{i + 1}")
        mats.append(_unit(n, i, i) - _unit(n, i + 1, i + 1))
    for i, j in itertools.combinations(range(n), 2):
        labels.append("f" if n == 2 else f"e{j + 1}{i + 1}")
        mats.append(_unit(n, j, i))
    exponents = list(range(1, n))
    spec = [("trace", k) for k in range(2, n + 1)]
    return from_matrices(f"sl{n}", labels, mats, exponents, f"A{n - 1}", spec)


def _gl2() -> LieAlgebraData:
    labels = ["e11", "e12", "e21", "e22"]
    mats = [_unit(2, 0, 0), _unit(2, 0, 1), _unit(2, 1, 0), _unit(2, 1, 1)]
    return from_matrices("gl2", labels, mats, [0, 1], "A1", [("trace", 1), ("trace", 2)])


def _torus(n: int) -> LieAlgebraData:
    labels = ["x"] if n == 1 else [f"x{i + 1}" for i in range(n)]
    mats = [_unit(n, i, i) for i in range(n)]
    return from_matrices(f"torus({n})", labels, mats, [0] * n, None, [("coordinate", i) for i in range(n)])


def _block(a: Matrix, b: Matrix, c: Matrix) -> Matrix:
    # 4x4 matrix [[A, B], [C, -A^T]]
    m = zeros(4, 4)
    m[:2, :2] = a
    m[:2, 2:] = b
    m[2:, :2] = c
    m[2:, 2:] = -a.T
    return m


def _sp4() -> LieAlgebraData:
    z = zeros(2, 2)
    sym = [("11", _unit(2, 0, 0)), ("22", _unit(2, 1, 1)), ("12", _unit(2, 0, 1) + _unit(2, 1, 0))]
    labels, mats = [], []
    for tag, a in (("a11", _unit(2, 0, 0)), ("a12", _unit(2, 0, 1)), ("a21", _unit(2, 1, 0)), ("a22", _unit(2, 1, 1))):
        labels.append(tag)
        mats.append(_block(a, z, z))
    for tag, s in sym:
        labels.append(f"b{tag}")
        mats.append(_block(z, s, z))
    for tag, s in sym:
        labels.append(f"c{tag}")
        mats.append(_block(z, z, s))
    return from_matrices("sp4", labels, mats, [1, 3], "B2", [("trace", 2), ("trace", 4)])


def _so4() -> LieAlgebraData:
    z = zeros(2, 2)
    skew = _unit(2, 0, 1) - _unit(2, 1, 0)
    labels, mats = [], []
    for tag, a in (("a11", _unit(2, 0, 0)), ("a12", _unit(2, 0, 1)), ("a21", _unit(2, 1, 0)), ("a22", _unit(2, 1, 1))):
        labels.append(tag)
        mats.append(_block(a, z, z))
    labels += ["b", "c"]
    mats += [_block(z, skew, z), _block(z, z, skew)]
    return from_matrices("so4", labels, mats, [1, 1], "A1xA1", [("trace", 2), ("pfaffian", 2)])


_TORUS_RE = re.compile(r"torus\((\d+)\)")

_BUILTINS: Dict[str, Callable[[], LieAlgebraData]] = {
    "sl2": lambda: _sl(2),
    "sl3": lambda: _sl(3),
    "sl4": lambda: _sl(4),
    "gl2": _gl2,
    "so4": _so4,
    "sp4": _sp4,
}

_cache: Dict[str, LieAlgebraData] = {}


def builtin_names() -> List[str]:
    return sorted(_BUILTINS) + ["torus(n)"]


def builtin(name: str) -> LieAlgebraData:
    """
    One of the built-in reductive Lie algebras.

    Args:
        name (str): ``sl2``, ``sl3``, ``sl4``, ``so4``, ``sp4``, ``gl2`` or ``torus(n)``

    Returns:
        LieAlgebraData: validated algebra with exponents and defining representation

    Raises:
        InputError: for an unknown name
    """
    key = name.strip().lower()
    if key in _cache:
        return _cache[key]
    match = _TORUS_RE.fullmatch(key)
    if match and int(match.group(1)) >= 1:
        g = _torus(int(match.group(1)))
    elif key in _BUILTINS:
        g = _BUILTINS[key]()
    else:
        raise InputError(f"Unsupported Lie algebra: {name!r} (known: {', '.join(builtin_names())})")
    logger.info("built %s: dim %d, exponents %s", g.name, g.dim, list(g.exponents))
    _cache[key] = g
    return g


def cobracket(g: LieAlgebraData, dual_index: int) -> Dict[Tuple[int, int], Any]:
    """
    The cobracket of a dual basis vector.

    Returns:
        Dict[Tuple[int, int], Any]: coefficient of x^i ^ x^j (i < j) in delta(x^k)

    Raises:
        InputError: if the index is out of range
    """
    if not 0 <= dual_index < g.dim:
        raise InputError(f"dual index {dual_index} out of range for {g.name}")
    return {(i, j): c[dual_index] for (i, j), c in g.brackets.items() if c.get(dual_index)}


def cojacobi_failures(g: LieAlgebraData) -> List[int]:
    """Dual indices where the cobracket, extended to an odd derivation of Lambda(g*), squares to nonzero."""
    algebra = FreeGradedCommAlgebra([Generator(f"{label}*", 1, (), i) for i, label in enumerate(g.basis_labels)])
    images = {k: {(i, j): -c for (i, j), c in cobracket(g, k).items()} for k in range(g.dim)}
    return [k for k in range(g.dim) if algebra.derive(images[k], images)]


def coadjoint_action(g: LieAlgebraData, a: int) -> Dict[int, Dict[int, Any]]:
    """Coordinates of ad*_a x^i = -sum_j c^i_{aj} x^j."""
    action: Dict[int, Dict[int, Any]] = {}
    for j in range(g.dim):
        for i, c in g.bracket_basis(a, j).items():
            action.setdefault(i, {})[j] = -c
    return action


def coadjoint_derivations(g: LieAlgebraData, algebra: FreeGradedCommAlgebra) -> List[Dict[int, Poly]]:
    """
    The coadjoint action of each basis vector as a derivation of ``algebra``.

    A generator with ``g_index`` i and tag t is read as x^i (x) t; generators
    without a Lie index are acted on trivially.

    Raises:
        InputError: if the action would leave the generator set
    """
    actions = []
    for a in range(g.dim):
        dual = coadjoint_action(g, a)
        images: Dict[int, Poly] = {}
        for idx, gen in enumerate(algebra.generators):
            if gen.g_index is None or gen.g_index not in dual:
                continue
            image: Poly = {}
            for j, c in dual[gen.g_index].items():
                if not algebra.has(j, gen.tag):
                    raise InputError(f"inconsistent action: no generator {g.basis_labels[j]}* for {gen.tag!r}")
                image[(algebra.index(j, gen.tag),)] = c
            images[idx] = image
        actions.append(images)
    return actions


def ad_action_matrix(g: LieAlgebraData, complex: GradedCommComplex, degree: int, weight: Weight) -> List[SparseMatrix]:
    """Matrices of the coadjoint action of each basis vector on one block of ``complex``."""
    basis = complex.basis(degree, weight)
    matrices = []
    for images in coadjoint_derivations(g, complex.algebra):
        columns = []
        for mono in basis:
            image = complex.algebra.derive({mono: QQ(1)}, images, odd=False)
            columns.append({complex.position(degree, weight, m): c for m, c in image.items()})
        matrices.append(SparseMatrix.from_columns(len(basis), columns))
    return matrices


class InvariantPolynomial:
    """
    A symmetric multilinear form on g, evaluated lazily.

    Values on basis multisets come from ``evaluator`` and are cached; the
    full tensor is only materialized on request.

    Attributes:
        name (str): printable name, e.g. ``tr^2``
        degree (int): number of arguments
        dim (int): dimension of g
    """

    def __init__(self, name: str, degree: int, dim: int, evaluator: Callable[[Tuple[int, ...]], Any]):
        self.name = name
        self.degree = degree
        self.dim = dim
        self._evaluator = evaluator
        self._values: Dict[Tuple[int, ...], Any] = {}

    def value(self, indices: Sequence[int]) -> Any:
        key = tuple(sorted(indices))
        if len(key) != self.degree:
            raise InputError(f"{self.name} takes {self.degree} arguments, got {len(key)}")
        if key not in self._values:
            self._values[key] = self._evaluator(key)
        return self._values[key]

    @property
    def tensor(self) -> Dict[Tuple[int, ...], Any]:
        """Nonzero values on sorted index multisets."""
        entries = {}
        for key in itertools.combinations_with_replacement(range(self.dim), self.degree):
            v = self.value(key)
            if v:
                entries[key] = v
        return entries

    def evaluate(self, vectors: Sequence[Mapping[int, Any]]) -> Any:
        """Multilinear evaluation on coordinate vectors."""
        if len(vectors) != self.degree:
            raise InputError(f"{self.name} takes {self.degree} arguments, got {len(vectors)}")
        total = QQ(0)
        for combo in itertools.product(*(list(v.items()) for v in vectors)):
            coeff = reduce(lambda acc, item: acc * item[1], combo, QQ(1))
            total += coeff * self.value([i for i, _ in combo])
        return total

    def diagonal(self, vector: Mapping[int, Any]) -> Any:
        return self.evaluate([vector] * self.degree)

    def __repr__(self) -> str:
        return f"InvariantPolynomial({self.name}, degree={self.degree})"


def _polarize(func: Callable[[DomainMatrix], Any], mats: Sequence[DomainMatrix]) -> Any:
    # Full polarization of a homogeneous degree-d function.
    d = len(mats)
    total = QQ(0)
    for size in range(1, d + 1):
        for subset in itertools.combinations(range(d), size):
            argument = reduce(lambda a, b: a + b, (mats[s] for s in subset))
            total += (-1) ** (d - size) * func(argument)
    return total / factorial(d)


def _trace(m: DomainMatrix) -> Any:
    rows = m.to_list()
    return sum((rows[i][i] for i in range(len(rows))), QQ(0))


def _pfaffian_of_form(m: DomainMatrix) -> Any:
    # Pfaffian of J m for the split form J = [[0, I], [I, 0]] on QQ^4.
    x = m.to_list()
    a = [x[2], x[3], x[0], x[1]]
    return a[0][1] * a[2][3] - a[0][2] * a[1][3] + a[0][3] * a[1][2]


def power_trace_invariant(g: LieAlgebraData, k: int) -> InvariantPolynomial:
    """
    The symmetrized k-th power trace in the defining representation.

    Args:
        g (LieAlgebraData): algebra with a defining representation
        k (int): degree, at least 1

    Returns:
        InvariantPolynomial: T(x_1..x_k) = (1/k!) sum_s tr(x_s(1) ... x_s(k))

    Raises:
        InputError: if the defining representation is missing or k < 1
    """
    if k < 1:
        raise InputError(f"power trace degree must be positive, got {k}")
    mats = g.domain_rep()

    def power_trace(m: DomainMatrix) -> Any:
        return _trace(reduce(lambda a, b: a * b, [m] * k))

    return InvariantPolynomial(f"tr^{k}", k, g.dim, lambda key: _polarize(power_trace, [mats[i] for i in key]))


def pfaffian_invariant(g: LieAlgebraData) -> InvariantPolynomial:
    mats = g.domain_rep()
    if mats[0].shape != (4, 4):
        raise InputError(f"the Pfaffian invariant needs a 4x4 defining representation, {g.name} has {mats[0].shape}")
    return InvariantPolynomial("pf", 2, g.dim, lambda key: _polarize(_pfaffian_of_form, [mats[i] for i in key]))


def coordinate_invariant(g: LieAlgebraData, index: int) -> InvariantPolynomial:
    return InvariantPolynomial(
        f"{g.basis_labels[index]}*", 1, g.dim, lambda key: QQ(1) if key == (index,) else QQ(0)
    )


def invariant_generators(g: LieAlgebraData) -> List[InvariantPolynomial]:
    """
    Generators of the invariant polynomials, one per exponent, in exponent order.

    Raises:
        InputError: if the algebra carries no invariant specification
    """
    if not g.invariant_spec:
        raise InputError(f"{g.name} has no invariant polynomial specification")
    makers = {
        "trace": lambda k: power_trace_invariant(g, k),
        "pfaffian": lambda _: pfaffian_invariant(g),
        "coordinate": lambda i: coordinate_invariant(g, i),
    }
    generators = []
    for kind, arg in g.invariant_spec:
        if kind not in makers:
            raise InputError(f"unknown invariant kind {kind!r}")
        generators.append(makers[kind](arg))
    return generators


def ad_invariance_failures(
    P: InvariantPolynomial, g: LieAlgebraData, limit: int = 1
) -> List[Tuple[int, Tuple[int, ...]]]:
    """
    Basis tuples where sum_k P(x_1, .., [y, x_k], .., x_d) != 0.

    Returns:
        List[Tuple[int, Tuple[int, ...]]]: up to ``limit`` pairs (y, xs)
    """
    failures = []
    for y in range(g.dim):
        for xs in itertools.combinations_with_replacement(range(g.dim), P.degree):
            total = QQ(0)
            for pos, x in enumerate(xs):
                rest = xs[:pos] + xs[pos + 1 :]
                for k, c in g.bracket_basis(y, x).items():
                    total += c * P.value(rest + (k,))
            if total:
                failures.append((y, xs))
                if len(failures) >= limit:
                    return failures
    return failures


def format_lie_vector(g: LieAlgebraData, vector: Mapping[int, Any]) -> str:
    if not vector:
        return "0"
    return " + ".join(f"{format_rational(c)}*{g.basis_labels[i]}" for i, c in sorted(vector.items()))
