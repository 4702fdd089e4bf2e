"""
Lie algebra tests.

This module covers the built-in algebras (dimensions, exponents, structure
constants, Jacobi and co-Jacobi identities, the dimension formula in terms of
exponents), the cobracket, coadjoint
actions, power-trace and Pfaffian invariants with their ad-invariance, and
construction from matrices.
"""

import pytest
from sympy import Matrix
from sympy.polys.domains import QQ

from rephom.core.errors import InputError
from rephom.core.gca import GradedCommComplex
from rephom.core.lie import (
    ad_action_matrix,
    ad_invariance_failures,
    builtin,
    cobracket,
    cojacobi_failures,
    from_matrices,
    invariant_generators,
    jacobi_failures,
    power_trace_invariant,
)
from rephom.core.linalg import rank
from rephom.core.rep_complex import rep_algebra


@pytest.mark.parametrize(
    "name, dim, exponents",
    [
        ("sl2", 3, (1,)),
        ("sl3", 8, (1, 2)),
        ("sl4", 15, (1, 2, 3)),
        ("gl2", 4, (0, 1)),
        ("so4", 6, (1, 1)),
        ("sp4", 10, (1, 3)),
        ("torus(2)", 2, (0, 0)),
    ],
)
def test_builtin_algebras(name, dim, exponents):
    """Built-ins have the right dimension, exponents and satisfy Jacobi."""
    g = builtin(name)
    if g.dim != dim or g.exponents != exponents:
        raise AssertionError(f"{name}: dim {g.dim}, exponents {g.exponents}")
    if jacobi_failures(g):
        raise AssertionError(f"{name} violates the Jacobi identity")
    if cojacobi_failures(g):
        raise AssertionError(f"{name} violates the co-Jacobi identity")


@pytest.mark.parametrize("name", ["sl2", "sl3", "sl4", "gl2", "so4", "sp4", "torus(2)"])
def test_dimension_from_exponents(name):
    """The dimension of a reductive algebra is the sum of 2m + 1 over its exponents."""
    g = builtin(name)
    if sum(2 * m + 1 for m in g.exponents) != g.dim:
        raise AssertionError(f"{name}: exponents {g.exponents} against dimension {g.dim}")


def test_unknown_builtin():
    """Unknown names are input errors."""
    with pytest.raises(InputError):
        builtin("e8")


def test_sl2_structure_constants(sl2):
    """[e, f] = h and [h, e] = 2e in the basis e, h, f."""
    if sl2.basis_labels != ("e", "h", "f"):
        raise AssertionError(f"unexpected basis {sl2.basis_labels}")
    if sl2.bracket_basis(0, 2) != {1: QQ(1)}:
        raise AssertionError("[e, f] should be h")
    if sl2.bracket_basis(1, 0) != {0: QQ(2)}:
        raise AssertionError("[h, e] should be 2e")
    if sl2.structure_constant(2, 1, 2) != QQ(-2):
        raise AssertionError("[h, f] should be -2f")


def test_cobracket(sl2):
    """The cobracket is dual to the bracket."""
    if cobracket(sl2, 1) != {(0, 2): QQ(1)}:
        raise AssertionError(f"unexpected delta(h*) {cobracket(sl2, 1)}")
    if cobracket(sl2, 0) != {(0, 1): QQ(-2)}:
        raise AssertionError(f"unexpected delta(e*) {cobracket(sl2, 0)}")
    with pytest.raises(InputError):
        cobracket(sl2, 3)


def test_power_trace_values(sl2):
    """tr(e f) = 1 and tr(h h) = 2."""
    P = power_trace_invariant(sl2, 2)
    if P.value((0, 2)) != 1 or P.value((1, 1)) != 2:
        raise AssertionError("unexpected trace form")
    if P.value((2, 0)) != P.value((0, 2)):
        raise AssertionError("the form is symmetric")
    if P.diagonal({1: QQ(1)}) != 2:
        raise AssertionError("diagonal evaluation disagrees with the value")
    with pytest.raises(InputError):
        P.value((0,))


@pytest.mark.parametrize("name", ["sl2", "sl3", "so4", "sp4", "gl2"])
def test_invariant_generators_are_ad_invariant(name):
    """Every invariant generator is ad-invariant, one per exponent."""
    g = builtin(name)
    generators = invariant_generators(g)
    if len(generators) != len(g.exponents):
        raise AssertionError(f"{name}: {len(generators)} generators for {len(g.exponents)} exponents")
    for P in generators:
        if ad_invariance_failures(P, g):
            raise AssertionError(f"{name}: {P.name} is not ad-invariant")


def test_invariant_degrees_match_exponents():
    """Generator degrees are exponents plus one."""
    for name in ("sl3", "sp4", "so4"):
        g = builtin(name)
        degrees = sorted(P.degree for P in invariant_generators(g))
        if degrees != sorted(m + 1 for m in g.exponents):
            raise AssertionError(f"{name}: degrees {degrees}")


def test_from_matrices_rejects_non_closed_basis():
    """A basis whose commutators leave its span is refused."""
    e = Matrix([[0, 1], [0, 0]])
    f = Matrix([[0, 0], [1, 0]])
    with pytest.raises(InputError):
        from_matrices("broken", ["e", "f"], [e, f], [1])


def test_ad_action_on_generators(sphere3, sl2):
    """The coadjoint action on u (x) g* is the coadjoint representation."""
    m = sphere3.require_quillen()
    c = GradedCommComplex(rep_algebra(m, sl2), {}, 2)
    matrices = ad_action_matrix(sl2, c, 2, (1,))
    if len(matrices) != 3:
        raise AssertionError("one matrix per basis vector")
    if rank(matrices[1]) != 2:
        raise AssertionError("ad h acts with rank 2 on sl2*")
