"""
Cyclic homology tests.

This module covers the Hodge pieces of loop-space homology for projective
spaces, K(Z, 2) and K(Z, 2) x S^3, the explicit reduction coefficient, the
agreement of the Hodge decomposition with the Connes complex, the duality
between loop and cyclic degrees, reduction modulo exact forms, and the input
errors of the forms complex.
"""

import pytest

from rephom.core.cyclic import (
    FormComplex,
    connes_cyclic_dims,
    hodge_cyclic,
    loop_hodge_classes,
    loop_hodge_dims,
    loop_weight_cutoff,
    reduction_coefficient_holds,
    total_hodge_dims,
)
from rephom.core.errors import InputError
from rephom.core.models import sullivan_model
from rephom.services.catalog import catalog


@pytest.mark.parametrize(
    "space, m, degrees",
    [
        ("cp:2", 1, [5, 7]),
        ("cp:2", 2, [9, 11]),
        ("hp:1", 1, [9]),
        ("kz:2:3", 0, [1, 3, 5, 7, 9, 11]),
        ("kz:2:3", 1, []),
        ("kzs:2,3", 1, list(range(3, 13))),
        ("kzs:2,3", 2, list(range(5, 13))),
    ],
)
def test_loop_hodge_degrees(space, m, degrees):
    """Each listed degree carries exactly one class up to degree 12."""
    dims = loop_hodge_dims(catalog(space).sullivan, m, 12)
    if dims != {n: 1 for n in degrees}:
        raise AssertionError(f"{space} m={m}: {dims}")


def test_loop_classes_have_representatives(cp2):
    """Classes come with printable forms and sorted degrees."""
    classes = loop_hodge_classes(cp2.sullivan, 1, 12)
    if [c.degree for c in classes] != [5, 7]:
        raise AssertionError(f"unexpected classes {classes}")
    if any(not c.representative for c in classes):
        raise AssertionError("every class needs a representative")


def test_weight_cutoff_for_loops(cp2):
    """The slowest generator ratio bounds the weights needed."""
    if loop_weight_cutoff(cp2.sullivan, 12) != 13:
        raise AssertionError(f"unexpected cutoff {loop_weight_cutoff(cp2.sullivan, 12)}")


@pytest.mark.parametrize("r, m, k", [(1, 1, 0), (1, 2, 1), (2, 1, 2)])
def test_reduction_coefficient(r, m, k):
    """del[z^k s (ds)^m] = -(k + (m+1)(r+1)) [z^{k+r} dz s (ds)^{m-1}] modulo exact forms."""
    if not reduction_coefficient_holds(catalog(f"cp:{r}").sullivan, r, m, k):
        raise AssertionError(f"coefficient fails for r={r}, m={m}, k={k}")


@pytest.mark.parametrize("space", ["sphere:2", "kzs:2,3"])
def test_hodge_sum_matches_connes_complex(space):
    """Summing the Hodge pieces gives reduced cyclic homology."""
    A = catalog(space).sullivan
    if total_hodge_dims(A, 4) != connes_cyclic_dims(A, 4):
        raise AssertionError(f"{space}: Hodge sum disagrees with the Connes complex")


def test_rejections(cp2):
    """Negative form degrees, negative cutoffs and unweighted generators."""
    with pytest.raises(InputError):
        hodge_cyclic(cp2.sullivan, -1, 4)
    with pytest.raises(InputError):
        FormComplex(cp2.sullivan, -1)
    with pytest.raises(InputError):
        FormComplex(sullivan_model("flat", [("z", 2, (0,))]), 3)


@pytest.mark.parametrize("space, m", [("cp:2", 1), ("cp:2", 2), ("kzs:2,3", 1)])
def test_loop_degrees_are_dual_to_cyclic_degrees(space, m):
    """A cyclic class of degree n is a loop class of degree -n - 1, stable under a larger cutoff."""
    A = catalog(space).sullivan
    piece = hodge_cyclic(A, m, loop_weight_cutoff(A, 12) + 2, with_classes=False)
    dual = {}
    for (n, _), h in piece.dims.items():
        if -n - 1 <= 12:
            dual[-n - 1] = dual.get(-n - 1, 0) + h
    if loop_hodge_dims(A, m, 12) != dual:
        raise AssertionError(f"{space} m={m}: {loop_hodge_dims(A, m, 12)} against {dual}")


def test_reduce_exact(cp2):
    """Forms differing by an exact form share one representative, exact forms reduce to zero."""
    forms = FormComplex(cp2.sullivan, 6)
    z, s = cp2.sullivan.index("z"), cp2.sullivan.index("s")
    dz, ds = forms.rank + z, forms.rank + s
    exact = forms.d(forms.product([z, z, s]))
    if not exact or forms.reduce_exact(exact):
        raise AssertionError("an exact form should reduce to zero")
    form = forms.product([z, dz, s])
    shifted = dict(form)
    for mono, c in exact.items():
        shifted[mono] = shifted.get(mono, 0) + 3 * c
    shifted = {mono: c for mono, c in shifted.items() if c}
    if forms.reduce_exact(form) != forms.reduce_exact(shifted) or not forms.reduce_exact(form):
        raise AssertionError("representatives modulo exact forms should agree")
    if forms.reduce_exact(forms.product([ds])) != {}:
        raise AssertionError("ds = d(s) is exact")
