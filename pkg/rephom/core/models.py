"""
Algebraic Models Module

Quillen models (free graded Lie algebras with a differential given on
generators by bracket trees) and Sullivan models (free graded-commutative
cochain algebras with a weight grading).

Conventions (homological grading for Lie elements):
- [x, y] = -(-1)^{|x||y|} [y, x]
- d[x, y] = [dx, y] + (-1)^{|x|} [x, dy]

Free Lie elements are kept as bracket trees. Equality is decided in the free
associative algebra, where [x, y] = xy - (-1)^{|x||y|} yx.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from pydantic import BaseModel
from sympy.polys.domains import QQ

from rephom.core.errors import InputError, ModelValidationError
from rephom.core.gca import FreeGradedCommAlgebra, Generator, Poly
from rephom.core.linalg import add_into, format_rational, to_rational

logger = logging.getLogger(__name__)

Tree = Union[str, Tuple[str, Any, Any]]
Word = Tuple[str, ...]


def bracket_tree(left: Tree, right: Tree) -> Tree:
    return ("b", left, right)


def tree_leaves(tree: Tree) -> List[str]:
    if isinstance(tree, str):
        return [tree]
    return tree_leaves(tree[1]) + tree_leaves(tree[2])


def format_tree(tree: Tree) -> str:
    if isinstance(tree, str):
        return tree
    return f"[{format_tree(tree[1])},{format_tree(tree[2])}]"


class LieExpr:
    """
    A QQ-linear combination of bracket trees over named generators.

    Attributes:
        terms (Dict[Tree, Rational]): nonzero coefficient per tree
        degrees (Dict[str, int]): homological degree of every generator in scope
    """

    __hash__ = None

    def __init__(self, terms: Mapping[Tree, Any], degrees: Mapping[str, int]):
        self.degrees = dict(degrees)
        self.terms: Dict[Tree, Any] = {}
        for tree, coeff in terms.items():
            for leaf in tree_leaves(tree):
                if leaf not in self.degrees:
                    raise InputError(f"unknown generator {leaf!r}")
            add_into(self.terms, {tree: to_rational(coeff)})

    @classmethod
    def generator(cls, label: str, degrees: Mapping[str, int]) -> "LieExpr":
        return cls({label: QQ(1)}, degrees)

    @classmethod
    def zero(cls, degrees: Mapping[str, int]) -> "LieExpr":
        return cls({}, degrees)

    def tree_degree(self, tree: Tree) -> int:
        return sum(self.degrees[leaf] for leaf in tree_leaves(tree))

    def degrees_present(self) -> List[int]:
        return sorted({self.tree_degree(t) for t in self.terms})

    @property
    def degree(self) -> Optional[int]:
        """Homological degree, or None for zero; mixed degrees are rejected."""
        present = self.degrees_present()
        if len(present) > 1:
            raise InputError(f"expression {self} mixes degrees {present}")
        return present[0] if present else None

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "LieExpr") -> "LieExpr":
        terms = dict(self.terms)
        add_into(terms, other.terms)
        return LieExpr(terms, {**self.degrees, **other.degrees})

    def __neg__(self) -> "LieExpr":
        return self.scale(-1)

    def __sub__(self, other: "LieExpr") -> "LieExpr":
        return self + (-other)

    def scale(self, c: Any) -> "LieExpr":
        c = to_rational(c)
        return LieExpr({t: v * c for t, v in self.terms.items()}, self.degrees)

    def bracket(self, other: "LieExpr") -> "LieExpr":
        terms: Dict[Tree, Any] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                add_into(terms, {bracket_tree(a, b): ca * cb})
        return LieExpr(terms, {**self.degrees, **other.degrees})

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for tree, coeff in sorted(self.terms.items(), key=lambda kv: format_tree(kv[0])):
            text = format_rational(coeff)
            body = format_tree(tree)
            parts.append(body if text == "1" else f"{text}*{body}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"LieExpr({self})"


def _concat(p: Mapping[Word, Any], q: Mapping[Word, Any]) -> Dict[Word, Any]:
    out: Dict[Word, Any] = {}
    for a, ca in p.items():
        for b, cb in q.items():
            add_into(out, {a + b: ca * cb})
    return out


def tensor_normal_form(x: LieExpr) -> Dict[Word, Any]:
    """
    Expand brackets into signed tensor words.

    Args:
        x (LieExpr): Lie element

    Returns:
        Dict[Word, Rational]: coefficient of each word in the free associative algebra
    """
    cache: Dict[Tree, Tuple[Dict[Word, Any], int]] = {}

    def expand(tree: Tree) -> Tuple[Dict[Word, Any], int]:
        if tree in cache:
            return cache[tree]
        if isinstance(tree, str):
            result = ({(tree,): QQ(1)}, x.degrees[tree])
        else:
            (a, da), (b, db) = expand(tree[1]), expand(tree[2])
            words = _concat(a, b)
            add_into(words, _concat(b, a), -((-1) ** ((da * db) % 2)))
            result = (words, da + db)
        cache[tree] = result
        return result

    total: Dict[Word, Any] = {}
    for tree, coeff in x.terms.items():
        add_into(total, expand(tree)[0], coeff)
    return total


def lie_equal(x: LieExpr, y: LieExpr) -> bool:
    return tensor_normal_form(x - y) == {}


@dataclass(frozen=True)
class QuillenGenerator:
    label: str
    degree: int
    weight: Optional[int] = None


@dataclass(frozen=True, eq=False)
class QuillenModel:
    """
    A free graded Lie algebra L(V) with differential.

    Attributes:
        name (str): catalog name or file stem
        generators (Tuple[QuillenGenerator, ...]): sorted by (degree, label)
        diff (Dict[str, LieExpr]): d on generators; missing labels are closed
        validity_bound (Optional[int]): highest degree where a truncated model
            is still a model of the space
    """

    name: str
    generators: Tuple[QuillenGenerator, ...]
    diff: Dict[str, LieExpr] = field(default_factory=dict)
    validity_bound: Optional[int] = None

    @property
    def degrees(self) -> Dict[str, int]:
        return {g.label: g.degree for g in self.generators}

    @property
    def weighted(self) -> bool:
        return all(g.weight is not None for g in self.generators) and bool(self.generators)

    def generator(self, label: str) -> QuillenGenerator:
        for g in self.generators:
            if g.label == label:
                return g
        raise InputError(f"unknown generator {label!r} in model {self.name}")

    def gen(self, label: str) -> LieExpr:
        self.generator(label)
        return LieExpr.generator(label, self.degrees)

    def scaled(self, c: Any) -> "QuillenModel":
        """The same model with every generator differential multiplied by ``c``."""
        diff = {k: v.scale(c) for k, v in self.diff.items()}
        return QuillenModel(self.name, self.generators, diff, self.validity_bound)

    def tree_weight(self, tree: Tree) -> int:
        return sum(self.generator(leaf).weight or 0 for leaf in tree_leaves(tree))


def apply_diff(m: QuillenModel, x: LieExpr) -> LieExpr:
    """
    Extend the model differential to a Lie element.

    Uses d[a, b] = [da, b] + (-1)^{|a|} [a, db].

    Raises:
        InputError: if ``x`` involves a generator outside the model
    """
    degrees = m.degrees
    for tree in x.terms:
        for leaf in tree_leaves(tree):
            m.generator(leaf)

    def d_tree(tree: Tree) -> Dict[Tree, Any]:
        if isinstance(tree, str):
            image = m.diff.get(tree)
            return dict(image.terms) if image is not None else {}
        a, b = tree[1], tree[2]
        sign = -1 if x.tree_degree(a) % 2 else 1
        out: Dict[Tree, Any] = {}
        for t, c in d_tree(a).items():
            add_into(out, {bracket_tree(t, b): c})
        for t, c in d_tree(b).items():
            add_into(out, {bracket_tree(a, t): c * sign})
        return out

    total: Dict[Tree, Any] = {}
    for tree, coeff in x.terms.items():
        add_into(total, d_tree(tree), coeff)
    return LieExpr(total, degrees)


@dataclass(frozen=True)
class SullivanGenerator:
    label: str
    degree: int
    weight: Tuple[int, ...]


@dataclass(frozen=True, eq=False)
class SullivanModel:
    """
    A free graded-commutative cochain algebra with weight grading.

    Polynomials are stored over ``algebra``, whose generators carry the
    cohomological degrees (only their parity enters the sign rule).

    Attributes:
        name (str): catalog name or file stem
        generators (Tuple[SullivanGenerator, ...]): sorted by (degree, label)
        diff (Dict[str, Poly]): d on generators, degree +1
    """

    name: str
    generators: Tuple[SullivanGenerator, ...]
    diff: Dict[str, Poly] = field(default_factory=dict)

    @cached_property
    def algebra(self) -> FreeGradedCommAlgebra:
        return FreeGradedCommAlgebra([Generator(g.label, g.degree, g.weight, None, g.label) for g in self.generators])

    @property
    def weight_rank(self) -> int:
        return len(self.generators[0].weight) if self.generators else 0

    def index(self, label: str) -> int:
        for i, g in enumerate(self.generators):
            if g.label == label:
                return i
        raise InputError(f"unknown generator {label!r} in model {self.name}")

    def differential_images(self) -> Dict[int, Poly]:
        return {self.index(label): poly for label, poly in self.diff.items() if poly}

    def apply(self, poly: Mapping[Tuple[int, ...], Any]) -> Poly:
        return self.algebra.derive(poly, self.differential_images())


def sullivan_monomial(m: SullivanModel, exponents: Mapping[str, int]) -> Optional[Tuple[int, ...]]:
    """Sorted monomial for an exponent map, or None when an odd generator is squared."""
    mono: List[int] = []
    for label, e in exponents.items():
        if e < 0:
            raise InputError(f"negative exponent for {label!r}")
        idx = m.index(label)
        if m.generators[idx].degree % 2 and e > 1:
            return None
        mono += [idx] * e
    return tuple(sorted(mono))


class ValidationReport(BaseModel):
    """
    Outcome of model validation.

    Attributes:
        model (str): model name
        kind (str): ``quillen`` or ``sullivan``
        ok (bool): whether every check passed
        residues (List[Dict[str, str]]): one entry per violation
    """

    model: str
    kind: str
    ok: bool
    residues: List[Dict[str, str]] = []


def _residue(generator: str, check: str, residue: str) -> Dict[str, str]:
    return {"generator": generator, "check": check, "residue": residue}


def _validate_quillen(m: QuillenModel) -> List[Dict[str, str]]:
    residues = []
    labels = [g.label for g in m.generators]
    if len(set(labels)) != len(labels):
        residues.append(_residue("*", "labels", "duplicate generator labels"))
    for g in m.generators:
        if g.degree < 1:
            residues.append(_residue(g.label, "degree", f"degree {g.degree} < 1"))
    weighted = any(g.weight is not None for g in m.generators)
    if weighted and not m.weighted:
        residues.append(_residue("*", "weight", "weights given for some generators only"))
    for label, image in m.diff.items():
        if label not in labels:
            residues.append(_residue(label, "diff", "differential of an unknown generator"))
            continue
        g = m.generator(label)
        wrong = [t for t in image.terms if image.tree_degree(t) != g.degree - 1]
        if wrong:
            residues.append(_residue(label, "degree", f"term {format_tree(wrong[0])} has wrong degree"))
        if m.weighted:
            off = [t for t in image.terms if m.tree_weight(t) != g.weight]
            if off:
                residues.append(_residue(label, "weight", f"term {format_tree(off[0])} changes weight"))
        square = apply_diff(m, image)
        if tensor_normal_form(square):
            residues.append(_residue(label, "d^2", str(square)))
    return residues


def _validate_sullivan(m: SullivanModel) -> List[Dict[str, str]]:
    residues = []
    algebra = m.algebra
    for g in m.generators:
        if g.degree < 2:
            residues.append(_residue(g.label, "degree", f"degree {g.degree} < 2"))
    for label, image in m.diff.items():
        g = m.generators[m.index(label)]
        for mono in image:
            term = algebra.format_monomial(mono)
            if algebra.degree(mono) != g.degree + 1:
                residues.append(_residue(label, "degree", f"term {term} has wrong degree"))
            if algebra.weight(mono) != g.weight:
                residues.append(_residue(label, "weight", f"term {term} changes weight"))
            if not mono:
                residues.append(_residue(label, "augmentation", "constant term in differential"))
        square = m.apply(image)
        if square:
            residues.append(_residue(label, "d^2", algebra.format_poly(square)))
    return residues


def validate(m: Union[QuillenModel, SullivanModel]) -> ValidationReport:
    """
    Check d^2 = 0, degree bookkeeping and weight preservation.

    Returns:
        ValidationReport: ``ok`` plus every violated generator with its residue
    """
    if isinstance(m, QuillenModel):
        residues = _validate_quillen(m)
        return ValidationReport(model=m.name, kind="quillen", ok=not residues, residues=residues)
    if isinstance(m, SullivanModel):
        residues = _validate_sullivan(m)
        return ValidationReport(model=m.name, kind="sullivan", ok=not residues, residues=residues)
    raise InputError(f"cannot validate {type(m).__name__}")


def ensure_valid(m: Union[QuillenModel, SullivanModel]):
    """
    Validate and return the model.

    Raises:
        ModelValidationError: carrying the residues of every violation
    """
    report = validate(m)
    if not report.ok:
        raise ModelValidationError(f"model {m.name} failed validation", report.residues)
    return m


def quillen_model(
    name: str,
    generators: Iterable[Tuple[str, int, Optional[int]]],
    diff: Mapping[str, Iterable[Tuple[Any, Tree]]] = (),
    validity_bound: Optional[int] = None,
) -> QuillenModel:
    """
    Assemble a Quillen model from plain data.

    Args:
        name (str): model name
        generators: (label, degree, weight) triples
        diff: per label, (coefficient, bracket tree) pairs
        validity_bound (Optional[int]): truncation validity bound
    """
    gens = tuple(sorted((QuillenGenerator(*g) for g in generators), key=lambda g: (g.degree, g.label)))
    degrees = {g.label: g.degree for g in gens}
    images = {}
    for label, terms in dict(diff).items():
        acc: Dict[Tree, Any] = {}
        for coeff, tree in terms:
            add_into(acc, {tree: to_rational(coeff)})
        images[label] = LieExpr(acc, degrees)
    return QuillenModel(name, gens, images, validity_bound)


def sullivan_model(
    name: str,
    generators: Iterable[Tuple[str, int, Sequence[int]]],
    diff: Mapping[str, Iterable[Tuple[Any, Mapping[str, int]]]] = (),
) -> SullivanModel:
    """
    Assemble a Sullivan model from plain data.

    Args:
        name (str): model name
        generators: (label, cohomological degree, weight tuple) triples
        diff: per label, (coefficient, exponent map) pairs
    """
    gens = tuple(
        sorted((SullivanGenerator(l, d, tuple(w)) for l, d, w in generators), key=lambda g: (g.degree, g.label))
    )
    model = SullivanModel(name, gens, {})
    images = {}
    for label, terms in dict(diff).items():
        model.index(label)
        acc: Poly = {}
        for coeff, exponents in terms:
            mono = sullivan_monomial(model, exponents)
            if mono is not None:
                add_into(acc, {mono: to_rational(coeff)})
        images[label] = acc
    return SullivanModel(name, gens, images)
