"""
Exact Linear Algebra Module

Sparse matrices over the rationals, rank and kernel computation, and homology
dimensions of bounded chain complexes. Elimination is delegated to sympy's
sparse domain matrices: each row is scaled to integer entries and reduced with
fraction-free Gauss-Jordan elimination over ZZ (``SDM.rref_den``), so no
rational number is ever rounded.
"""

import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import lcm
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple, TypeVar

from sympy import Basic
from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices.sdm import SDM

from rephom.core.errors import ChainComplexError, InputError
from rephom.utils.config import get_settings

logger = logging.getLogger(__name__)

Rational = QQ.dtype
SparseVector = Dict[int, Any]

_RATIONAL_RE = re.compile(r"[+-]?\d+(/[+-]?\d+)?")

T = TypeVar("T")
R = TypeVar("R")


def to_rational(value: Any) -> Rational:
    """
    Convert an integer, a ``"p/q"`` string or a rational number to QQ.

    Args:
        value (Any): int, QQ element, fractions.Fraction, sympy Rational or a
            decimal-free string such as ``"-3/4"``

    Returns:
        Rational: the value in lowest terms with positive denominator

    Raises:
        InputError: for floats, decimals, booleans and zero denominators
    """
    if isinstance(value, bool):
        raise InputError(f"not a rational number: {value!r}")
    if isinstance(value, Rational):
        return value
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, str):
        text = value.strip()
        if not _RATIONAL_RE.fullmatch(text):
            raise InputError(f"not a decimal-free rational string: {value!r}")
        num, _, den = text.partition("/")
        if den and int(den) == 0:
            raise InputError(f"zero denominator in {value!r}")
        return QQ(int(num), int(den or 1))
    if isinstance(value, Basic) and value.is_Rational:
        return QQ.from_sympy(value)
    if hasattr(value, "numerator") and hasattr(value, "denominator") and not isinstance(value, float):
        return QQ(int(value.numerator), int(value.denominator))
    raise InputError(f"not a rational number: {value!r}")


def format_rational(value: Rational) -> str:
    """Render a rational as ``"p"`` or ``"p/q"``."""
    value = to_rational(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def add_into(target: SparseVector, source: Mapping[int, Any], scale: Any = 1) -> SparseVector:
    """Accumulate ``scale * source`` into ``target`` in place, dropping zeros."""
    for key, coeff in source.items():
        total = target.get(key, QQ(0)) + coeff * scale
        if total:
            target[key] = total
        else:
            target.pop(key, None)
    return target


@dataclass(frozen=True)
class SparseMatrix:
    """
    Immutable sparse matrix over QQ.

    Entries are kept as ``(row, col, value)`` triples in row-major order; no
    position appears twice and no stored value is zero.
    """

    rows: int
    cols: int
    entries: Tuple[Tuple[int, int, Rational], ...] = ()

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise InputError(f"negative matrix shape {self.rows}x{self.cols}")
        canonical = []
        seen = set()
        for i, j, value in self.entries:
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise InputError(f"entry ({i}, {j}) outside a {self.rows}x{self.cols} matrix")
            if (i, j) in seen:
                raise InputError(f"duplicate entry at ({i}, {j})")
            value = to_rational(value)
            if not value:
                raise InputError(f"explicit zero stored at ({i}, {j})")
            seen.add((i, j))
            canonical.append((i, j, value))
        canonical.sort(key=lambda e: (e[0], e[1]))
        object.__setattr__(self, "entries", tuple(canonical))

    @classmethod
    def from_dod(cls, rows: int, cols: int, dod: Mapping[int, Mapping[int, Any]]) -> "SparseMatrix":
        """Build from a dict of row dicts, skipping zero values."""
        entries = [(i, j, v) for i, row in dod.items() for j, v in row.items() if v]
        return cls(rows, cols, tuple(entries))

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Mapping[int, Any]]) -> "SparseMatrix":
        """Build from a list of sparse column vectors (row index -> value)."""
        entries = [(i, j, v) for j, col in enumerate(columns) for i, v in col.items() if v]
        return cls(rows, len(columns), tuple(entries))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]]) -> "SparseMatrix":
        """Build from a dense list of rows."""
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise InputError("ragged rows")
        entries = [(i, j, to_rational(v)) for i, r in enumerate(rows) for j, v in enumerate(r) if v]
        return cls(len(rows), ncols, tuple(entries))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols, ())

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, tuple((i, i, QQ(1)) for i in range(n)))

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def to_dod(self) -> Dict[int, Dict[int, Rational]]:
        dod: Dict[int, Dict[int, Rational]] = {}
        for i, j, v in self.entries:
            dod.setdefault(i, {})[j] = v
        return dod

    def to_sdm(self) -> SDM:
        return SDM(self.to_dod(), self.shape, QQ)

    def to_dense(self) -> List[List[Rational]]:
        dense = [[QQ(0)] * self.cols for _ in range(self.rows)]
        for i, j, v in self.entries:
            dense[i][j] = v
        return dense

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows, tuple((j, i, v) for i, j, v in self.entries))

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        """Exact product ``self @ other``."""
        if self.cols != other.rows:
            raise InputError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        product = self.to_sdm().matmul(other.to_sdm())
        return SparseMatrix.from_dod(self.rows, other.cols, product)

    def apply(self, vector: Mapping[int, Any]) -> SparseVector:
        """Return ``self @ vector`` for a sparse column vector."""
        result: SparseVector = {}
        for i, j, v in self.entries:
            x = vector.get(j)
            if x:
                add_into(result, {i: v * x})
        return result

    def is_zero(self) -> bool:
        return not self.entries

    def __repr__(self) -> str:
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


def _integer_rows(m: SparseMatrix) -> Dict[int, Dict[int, Any]]:
    # Scaling a row by a nonzero constant changes neither rank nor kernel.
    rows: Dict[int, Dict[int, Any]] = {}
    for i, row in m.to_dod().items():
        scale = lcm(*(int(v.denominator) for v in row.values()))
        rows[i] = {j: ZZ(int(v.numerator) * (scale // int(v.denominator))) for j, v in row.items()}
    return rows


def _rref_den(m: SparseMatrix) -> Tuple[Dict[int, Dict[int, Any]], Any, List[int]]:
    integer_rows = _integer_rows(m)
    if not integer_rows:
        return {}, ZZ(1), []
    rref, den, pivots = SDM(integer_rows, m.shape, ZZ).rref_den()
    return dict(rref), den, list(pivots)


def rank(m: SparseMatrix) -> int:
    """
    Rank of a sparse matrix over QQ.

    Args:
        m (SparseMatrix): the matrix

    Returns:
        int: the exact rank
    """
    if m.is_zero():
        return 0
    return len(_rref_den(m)[2])


def sparse_kernel(m: SparseMatrix) -> Tuple[List[SparseVector], List[int]]:
    """
    Kernel of ``m`` as sparse vectors, one per non-pivot column.

    The vector attached to free column ``j`` has coordinate 1 at ``j`` and 0 at
    every other free column, so a kernel element is determined by its values
    on the free columns.

    Returns:
        Tuple[List[SparseVector], List[int]]: basis vectors and the free columns
    """
    rref, den, pivots = _rref_den(m)
    free = sorted(set(range(m.cols)) - set(pivots))
    column_rows: Dict[int, List[int]] = {}
    for i, row in rref.items():
        for j in row:
            column_rows.setdefault(j, []).append(i)
    basis = []
    for j in free:
        vector: SparseVector = {j: QQ(1)}
        for i in column_rows.get(j, ()):
            vector[pivots[i]] = -QQ(int(rref[i][j]), int(den))
        basis.append(vector)
    return basis, free


def kernel_basis(m: SparseMatrix) -> List[Tuple[Rational, ...]]:
    """
    Basis of the null space of ``m``.

    Returns:
        List[Tuple[Rational, ...]]: ``cols - rank(m)`` dense vectors v with m v = 0
    """
    basis, _ = sparse_kernel(m)
    return [tuple(v.get(j, QQ(0)) for j in range(m.cols)) for v in basis]


def solve(m: SparseMatrix, b: Mapping[int, Any]) -> SparseVector:
    """
    One solution x of ``m x = b``.

    Raises:
        InputError: if the system is inconsistent
    """
    augmented = SparseMatrix.from_columns(
        m.rows, [dict(col) for col in matrix_columns(m)] + [{i: to_rational(v) for i, v in b.items() if v}]
    )
    rref, den, pivots = _rref_den(augmented)
    if m.cols in pivots:
        raise InputError("inconsistent linear system")
    solution: SparseVector = {}
    for i, p in enumerate(pivots):
        value = rref.get(i, {}).get(m.cols)
        if value:
            solution[p] = QQ(int(value), int(den))
    return solution


def matrix_columns(m: SparseMatrix) -> List[Dict[int, Rational]]:
    columns: List[Dict[int, Rational]] = [{} for _ in range(m.cols)]
    for i, j, v in m.entries:
        columns[j][i] = v
    return columns


def in_span(columns: Sequence[Mapping[int, Any]], vector: Mapping[int, Any], rows: int) -> bool:
    """Decide whether ``vector`` is a linear combination of ``columns``."""
    if not vector:
        return True
    base = SparseMatrix.from_columns(rows, columns)
    extended = SparseMatrix.from_columns(rows, list(columns) + [vector])
    return rank(extended) == rank(base)


def reduce_modulo(columns: Sequence[Mapping[int, Any]], vector: Mapping[int, Any], rows: int) -> SparseVector:
    """
    Canonical representative of ``vector`` modulo the span of ``columns``.

    The result vanishes on the pivot coordinates of the reduced echelon form
    of the spanning set, so two vectors in the same coset reduce to the same
    representative.
    """
    result: SparseVector = {i: to_rational(v) for i, v in vector.items() if v}
    if not result or not columns:
        return result
    rref, _, pivots = _rref_den(SparseMatrix.from_columns(rows, list(columns)).transpose())
    for i, p in enumerate(pivots):
        c = result.get(p)
        if c:
            row = rref[i]
            add_into(result, {j: QQ(int(v)) for j, v in row.items()}, -c / QQ(int(row[p])))
    return result


def floor_rational(value: Any) -> int:
    """Largest integer not above a rational number."""
    value = to_rational(value)
    return int(value.numerator) // int(value.denominator)


def parallel_map(func: Callable[[T], R], items: Sequence[T], threads: Optional[int] = None) -> List[R]:
    """
    Map ``func`` over ``items`` with at most ``threads`` workers.

    Results come back in input order whatever the schedule.
    """
    if threads is None:
        threads = get_settings().threads
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


@dataclass(frozen=True)
class BoundedChainComplex:
    """
    A finite chain complex of QQ-vector spaces.

    Attributes:
        min_degree (int): lowest degree carried
        max_degree (int): highest degree carried
        dims (Dict[int, int]): dimension per degree (missing degrees are 0)
        differentials (Dict[int, SparseMatrix]): d_n from degree n to n-1
    """

    min_degree: int
    max_degree: int
    dims: Dict[int, int]
    differentials: Dict[int, SparseMatrix] = field(default_factory=dict)

    def __post_init__(self):
        for n, d in self.differentials.items():
            if not (self.min_degree < n <= self.max_degree):
                raise InputError(f"differential d_{n} outside degrees {self.min_degree}..{self.max_degree}")
            if d.shape != (self.dim(n - 1), self.dim(n)):
                raise InputError(f"d_{n} has shape {d.shape}, expected {(self.dim(n - 1), self.dim(n))}")

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    def differential(self, n: int) -> SparseMatrix:
        if n in self.differentials:
            return self.differentials[n]
        return SparseMatrix.zeros(self.dim(n - 1), self.dim(n))

    def first_square_failure(self) -> Optional[int]:
        """Smallest n with d_{n-1} o d_n != 0, or None."""
        for n in range(self.min_degree + 2, self.max_degree + 1):
            upper, lower = self.differentials.get(n), self.differentials.get(n - 1)
            if upper is None or lower is None or upper.is_zero() or lower.is_zero():
                continue
            if not lower.matmul(upper).is_zero():
                return n
        return None

    def euler_characteristic(self) -> int:
        return sum((-1) ** (n % 2) * self.dim(n) for n in range(self.min_degree, self.max_degree + 1))


def homology_dims(c: BoundedChainComplex, threads: Optional[int] = None) -> Dict[int, int]:
    """
    Betti numbers of a bounded chain complex.

    Args:
        c (BoundedChainComplex): complex with d o d = 0
        threads (Optional[int]): worker cap for the rank computations

    Returns:
        Dict[int, int]: dim H_n = dim ker d_n - rank d_{n+1} for every degree

    Raises:
        ChainComplexError: carrying the first degree where d o d != 0
    """
    failure = c.first_square_failure()
    if failure is not None:
        raise ChainComplexError(failure)
    degrees = list(range(c.min_degree, c.max_degree + 1))
    ranks = dict(zip(degrees, parallel_map(lambda n: rank(c.differential(n)), degrees, threads)))
    result = {}
    for n in degrees:
        result[n] = c.dim(n) - ranks[n] - ranks.get(n + 1, 0)
        logger.debug("degree %d: dim %d, rank d_n %d, H %d", n, c.dim(n), ranks[n], result[n])
    return result
