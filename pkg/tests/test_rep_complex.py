"""
Representation complex tests.

This module covers the universal representation, representation homology of
spheres and projective spaces in sl2, invariant homology, the weight-graded
Euler series, the vanishing bound, the low-degree comparison with the
homology of the space, and the abelian case.
"""

import dataclasses

import pytest
from sympy.polys.domains import QQ

from rephom.core.errors import InputError
from rephom.core.models import quillen_model
from rephom.core.rep_complex import (
    build_rep_complex,
    euler_series,
    homology_series,
    invariant_homology_series,
    low_degree_check,
    rep_algebra,
    torus_series,
    universal_rep,
    vanishing_bound,
)
from rephom.core.series import PoincareSeries
from rephom.services.catalog import catalog


def test_universal_rep_of_a_generator(sphere3, sl2):
    """rho(u) = sum_i (x^i u) (x) x_i."""
    m = sphere3.quillen
    algebra = rep_algebra(m, sl2)
    image = universal_rep(m, sl2, m.gen("u"), algebra)
    expected = {((algebra.index(i, "u"),), i): QQ(1) for i in range(3)}
    if image != expected:
        raise AssertionError(f"unexpected image {image}")


def test_two_sphere_is_an_exterior_algebra(sphere2, sl2):
    """For S^2 and sl2 the complex is Lambda(sl2*) in degree one."""
    c = build_rep_complex(sphere2.quillen, sl2, 3)
    dims = homology_series(c, 3).forget_weights().degree_coefficients()
    if dims != {0: 1, 1: 3, 2: 3, 3: 1}:
        raise AssertionError(f"expected 1 + 3z + 3z^2 + z^3, got {dims}")


def test_three_sphere_invariants(sphere3, sl2):
    """Invariants of Q[sl2*] in degree two are generated by the Killing form."""
    c = build_rep_complex(sphere3.quillen, sl2, 8)
    dims = invariant_homology_series(c, sl2, 8).forget_weights().degree_coefficients()
    if dims != {0: 1, 4: 1, 8: 1}:
        raise AssertionError(f"expected 1 + z^4 + z^8, got {dims}")


def test_projective_plane_invariants(cp2, sl2):
    """The invariant homology of CP^2 in sl2 is 1 + z^5 + z^7 + z^12."""
    top = vanishing_bound(2, 2, sl2)
    if top != 12:
        raise AssertionError(f"unexpected vanishing bound {top}")
    c = build_rep_complex(cp2.quillen, sl2, top)
    dims = invariant_homology_series(c, sl2, top).forget_weights().degree_coefficients()
    if dims != {0: 1, 5: 1, 7: 1, 12: 1}:
        raise AssertionError(f"unexpected invariant dims {dims}")


def test_euler_series_of_two_sphere(sphere2, sl2):
    """The full Euler series is (1 - q)^3; the invariant one is 1 - q^3."""
    c = build_rep_complex(sphere2.quillen, sl2, 3)
    full = PoincareSeries.from_terms(("z", "q"), {(0, 0): 1, (0, 1): -3, (0, 2): 3, (0, 3): -1}, {"q": 4})
    if euler_series(c) != full:
        raise AssertionError(f"unexpected Euler series {euler_series(c)}")
    invariant = PoincareSeries.from_terms(("z", "q"), {(0, 0): 1, (0, 3): -1}, {"q": 4})
    if euler_series(c, invariant=True) != invariant:
        raise AssertionError(f"unexpected invariant Euler series {euler_series(c, invariant=True)}")


def test_vanishing_bound_values(sl2, sl3):
    """r (d (r + 1) - 2) dim g / 2."""
    if vanishing_bound(2, 1, sl2) != 3 or vanishing_bound(4, 1, sl3) != 24:
        raise AssertionError("unexpected vanishing bounds")


@pytest.mark.parametrize("space, connectivity", [("sphere:3", 2), ("sphere:4", 3), ("cp:2", 1)])
def test_low_degree_agrees_with_homology(space, connectivity, sl2):
    """HR_i = H_{i+1}(X) (x) g* in the stable range."""
    entry = catalog(space)
    report = low_degree_check(entry.quillen, sl2, connectivity, entry.reduced_homology)
    if not report.ok:
        raise AssertionError(f"{space}: {[r for r in report.rows if not r.ok]}")
    if len(report.rows) != 2 * connectivity:
        raise AssertionError("one row per degree 0..2n-1")


def test_low_degree_rejects_a_wrong_model(sl2):
    """Expected values come from the homology of the space, so a model of S^5 fails against S^4."""
    wrong = quillen_model("s5", [("a", 4, None)])
    report = low_degree_check(wrong, sl2, 3, catalog("sphere:4").reduced_homology)
    if report.ok:
        raise AssertionError("a model of the wrong space should fail")
    bad = {row.degree for row in report.rows if not row.ok}
    if bad != {3, 4}:
        raise AssertionError(f"unexpected failing degrees {bad}")
    with pytest.raises(InputError):
        low_degree_check(wrong, sl2, 0, {})


def test_abelian_case_is_free(cp2, torus1):
    """With an abelian algebra the differential vanishes."""
    c = build_rep_complex(cp2.quillen, torus1, 6)
    if homology_series(c, 6) != torus_series(cp2.quillen, 1, 6):
        raise AssertionError("abelian representation homology should be free")
    expected = PoincareSeries.from_terms(("z", "q"), {(0, 0): 1, (1, 1): 1}, {"z": 6})
    if torus_series(catalog("sphere:2").quillen, 1, 5) != expected:
        raise AssertionError("the torus series of S^2 is 1 + qz")


def test_rejections(sphere2, sl2, sl3):
    """Bad caps and non-reductive invariants are input errors."""
    with pytest.raises(InputError):
        build_rep_complex(sphere2.quillen, sl2, 0)
    c = build_rep_complex(sphere2.quillen, sl2, 2)
    with pytest.raises(InputError):
        c.homology(5)
    solvable = dataclasses.replace(sl2, reductive=False)
    with pytest.raises(InputError):
        invariant_homology_series(c, solvable, 2)
    with pytest.raises(InputError):
        invariant_homology_series(c, sl3, 2)
