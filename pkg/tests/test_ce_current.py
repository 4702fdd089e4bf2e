"""
Current algebra cochain tests.

This module covers the weight cutoff bookkeeping, agreement of the cochain
route with the representation complex, the relative complex, and the input
errors raised for unusable models and cutoffs.
"""

import dataclasses

import pytest

from rephom.core.ce_current import CurrentLie, build_ce, ce_series, required_cutoff
from rephom.core.errors import InputError, InsufficientCutoffError
from rephom.core.models import sullivan_model
from rephom.core.rep_complex import build_rep_complex, homology_series, invariant_homology_series


def test_current_lie_basis(sphere2, sl2):
    """One basis element per Lie index and nonconstant monomial."""
    current = CurrentLie(sl2, sphere2.sullivan, 5)
    # z, s, z^2, zs
    if len(current.monomials()) != 4 or len(current.basis()) != 12:
        raise AssertionError(f"unexpected monomials {current.monomials()}")


def test_required_cutoff(sphere2, sl2):
    """Cochains of degree <= 4 reach total weight 4 for S^2."""
    total, components = required_cutoff(sl2, sphere2.sullivan, 3)
    if total != 4 or components != (4,):
        raise AssertionError(f"unexpected cutoff {total}, {components}")


def test_routes_agree_on_two_sphere(sphere2, sl2):
    """The cochain route reproduces representation homology with weights."""
    rep = homology_series(build_rep_complex(sphere2.quillen, sl2, 4), 4)
    ce = ce_series(build_ce(sl2, sphere2.sullivan, degree_window=4), 4)
    if rep != ce:
        raise AssertionError(f"rep {rep} != ce {ce}")


def test_relative_route_gives_invariants(sphere2, sl2):
    """The relative complex computes the invariant part."""
    c = build_rep_complex(sphere2.quillen, sl2, 4)
    rep = invariant_homology_series(c, sl2, 4)
    ce = ce_series(build_ce(sl2, sphere2.sullivan, degree_window=4, relative=True), 4)
    if rep != ce:
        raise AssertionError(f"rep {rep} != relative ce {ce}")
    if ce.forget_weights().degree_coefficients() != {0: 1, 3: 1}:
        raise AssertionError(f"unexpected invariant series {ce}")


def test_insufficient_cutoff(sphere2, sl2):
    """A cutoff below the required one is rejected with the required value."""
    with pytest.raises(InsufficientCutoffError) as info:
        build_ce(sl2, sphere2.sullivan, weight_cutoff=1, degree_window=3)
    if info.value.required != 4:
        raise AssertionError(f"unexpected required cutoff {info.value.required}")
    with pytest.raises(InsufficientCutoffError):
        build_ce(sl2, sphere2.sullivan, weight_cutoff=(2,), degree_window=3)


def test_rejections(sphere2, sl2):
    """Malformed cutoffs, zero weights and non-reductive relative complexes."""
    with pytest.raises(InputError):
        build_ce(sl2, sphere2.sullivan, weight_cutoff=(5, 5), degree_window=3)
    with pytest.raises(InputError):
        build_ce(sl2, sphere2.sullivan, degree_window=0)
    unweighted = sullivan_model("flat", [("z", 2, (0,))])
    with pytest.raises(InputError):
        build_ce(sl2, unweighted, degree_window=3)
    with pytest.raises(InputError):
        build_ce(dataclasses.replace(sl2, reductive=False), sphere2.sullivan, degree_window=3, relative=True)
