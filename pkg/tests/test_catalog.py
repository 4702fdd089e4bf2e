"""
Space catalog tests.

This module covers the space strings understood by the catalog, the models
and metadata attached to each entry, model files given as spaces, and the
errors raised for unsupported spaces.
"""

import pytest

from rephom.core.errors import InputError
from rephom.services.catalog import CATALOG_NAMES, catalog, catalog_entries


@pytest.mark.parametrize(
    "space, name, connectivity, homology",
    [
        ("sphere:3", "sphere:3", 2, {3: 1}),
        ("sphere(4)", "sphere:4", 3, {4: 1}),
        ("cp:2", "cp:2", 1, {2: 1, 4: 1}),
        ("cp(3)", "cp:3", 1, {2: 1, 4: 1, 6: 1}),
        ("hp:1", "hp:1", 3, {4: 1}),
        ("op2", "op2", 7, {8: 1, 16: 1}),
    ],
)
def test_space_strings(space, name, connectivity, homology):
    """Names, connectivity and reduced homology of the finite spaces."""
    entry = catalog(space)
    if entry.name != name or entry.connectivity != connectivity or entry.reduced_homology != homology:
        raise AssertionError(f"{space}: {entry.name}, {entry.connectivity}, {entry.reduced_homology}")


def test_projective_models(cp2):
    """CP^2 has generators v1, v2 of degrees 1, 3 and Q[z, s] with ds = z^3."""
    degrees = [(g.label, g.degree, g.weight) for g in cp2.quillen.generators]
    if degrees != [("v1", 1, 1), ("v2", 3, 2)]:
        raise AssertionError(f"unexpected generators {degrees}")
    sullivan = [(g.label, g.degree, g.weight) for g in cp2.sullivan.generators]
    if sullivan != [("z", 2, (1,)), ("s", 5, (3,))]:
        raise AssertionError(f"unexpected Sullivan generators {sullivan}")
    if cp2.projective != (2, 2) or cp2.validity_bound is not None:
        raise AssertionError("CP^2 is a finite projective model")


def test_truncated_kz():
    """K(Z, 2) carries a truncated tower with its validity bound."""
    entry = catalog("kz:2:3")
    if entry.validity_bound != 5 or entry.quillen.validity_bound != 5:
        raise AssertionError(f"unexpected validity bound {entry.validity_bound}")
    if len(entry.quillen.generators) != 3 or [g.label for g in entry.sullivan.generators] != ["z"]:
        raise AssertionError("unexpected models")
    odd = catalog("kz:3")
    if odd.name != "kz:3" or odd.reduced_homology != {3: 1}:
        raise AssertionError("K(Z, 3) is rationally S^3")


def test_product_space():
    """K(Z, 2) x S^3 has only a bigraded Sullivan model."""
    entry = catalog("kzs:2,3")
    if entry.quillen is not None or entry.sullivan.weight_rank != 2:
        raise AssertionError("unexpected models")
    if entry.connectivity != 1 or entry.reduced_homology.get(5) != 1 or entry.reduced_homology.get(2) != 1:
        raise AssertionError(f"unexpected homology {entry.reduced_homology}")
    with pytest.raises(InputError):
        entry.require_quillen()


def test_model_file_as_space(sullivan_file):
    """A model file path resolves to an entry with that model."""
    entry = catalog(str(sullivan_file))
    if entry.name != "a2" or entry.quillen is not None or entry.connectivity != 1:
        raise AssertionError(f"unexpected entry {entry}")


@pytest.mark.parametrize("space", ["torus:2", "sphere:1", "cp:0", "kz:3:x", "kzs:3,3", "tp:3,1", "sphere"])
def test_unsupported_spaces(space):
    """Unknown kinds and out-of-range arguments are input errors."""
    with pytest.raises(InputError):
        catalog(space)


def test_catalog_entries():
    """Every listed space resolves."""
    entries = catalog_entries()
    if [e.name for e in entries] != list(CATALOG_NAMES):
        raise AssertionError("entries come back in catalog order under their canonical names")
