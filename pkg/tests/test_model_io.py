"""
Model file tests.

This module covers reading Sullivan and Quillen model files, schema errors
with their JSON-pointer locations, validation on load, writing models back,
and Lie algebra files with and without defining matrices.
"""

import json

import pytest

from rephom.core.errors import InputError, ModelValidationError, SchemaError
from rephom.core.lie import jacobi_failures
from rephom.core.models import QuillenModel, SullivanModel, validate
from rephom.services.catalog import catalog
from rephom.services.model_io import (
    dump_lie_algebra,
    dump_model,
    lie_algebra_from_dict,
    load_lie_algebra,
    model_from_dict,
    model_to_dict,
    parse_model,
    resolve_lie_algebra,
)


def test_parse_sullivan_file(sullivan_file):
    """Integer weights become one-component weight tuples."""
    m = parse_model(sullivan_file)
    if not isinstance(m, SullivanModel) or m.name != "a2":
        raise AssertionError(f"unexpected model {m}")
    weights = {g.label: g.weight for g in m.generators}
    if weights != {"z": (1,), "s": (3,)}:
        raise AssertionError(f"unexpected weights {weights}")
    if not validate(m).ok:
        raise AssertionError("the model should be valid")


def test_invalid_model_file(bad_model_file):
    """Validation runs on load unless disabled."""
    with pytest.raises(ModelValidationError) as info:
        parse_model(bad_model_file)
    if [r["generator"] for r in info.value.residues] != ["c"]:
        raise AssertionError(f"unexpected residues {info.value.residues}")
    m = parse_model(bad_model_file, check=False)
    if not isinstance(m, QuillenModel) or m.name != "bad":
        raise AssertionError("the model should load without checks")


@pytest.mark.parametrize(
    "data, pointer",
    [
        ({"type": "lie", "generators": []}, "/type"),
        ({"type": "quillen", "generators": [{"name": "a", "degree": 1}], "diff": {"x": []}}, "/diff/x"),
        (
            {
                "type": "quillen",
                "generators": [{"name": "a", "degree": 1}, {"name": "b", "degree": 2}],
                "diff": {"b": [{"coeff": "1", "term": "c"}]},
            },
            "/diff/b/0/term",
        ),
        (
            {"type": "sullivan", "generators": [{"name": "z", "degree": 2}]},
            "/generators/0/weight",
        ),
        (
            {
                "type": "sullivan",
                "generators": [{"name": "z", "degree": 2, "weight": 1}, {"name": "s", "degree": 3, "weight": 2}],
                "diff": {"s": [{"coeff": "1", "term": {"z": -2}}]},
            },
            "/diff/s/0/term/z",
        ),
    ],
)
def test_schema_pointers(data, pointer):
    """Schema violations carry the location of the first problem."""
    with pytest.raises(SchemaError) as info:
        model_from_dict(data)
    if info.value.pointer != pointer:
        raise AssertionError(f"expected {pointer}, got {info.value.pointer}")


def test_rejects_decimal_coefficients():
    """Coefficients are exact rationals."""
    data = {
        "type": "quillen",
        "generators": [{"name": "a", "degree": 1}, {"name": "b", "degree": 2}],
        "diff": {"b": [{"coeff": "0.5", "term": "a"}]},
    }
    with pytest.raises(SchemaError):
        model_from_dict(data)


def test_missing_and_malformed_files(tmp_path):
    """Missing files are input errors; broken JSON is a schema error."""
    with pytest.raises(InputError):
        parse_model(tmp_path / "absent.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    with pytest.raises(SchemaError):
        parse_model(broken)


def test_dump_and_reload(tmp_path):
    """A written model reads back to the same document."""
    m = catalog("cp:3").quillen
    path = tmp_path / "cp3.json"
    dump_model(m, path)
    again = parse_model(path)
    if model_to_dict(again) != model_to_dict(m):
        raise AssertionError("the reloaded model differs")
    document = json.loads(path.read_text())
    if document["diff"]["v2"] != [{"coeff": "1/2", "term": ["b", "v1", "v1"]}]:
        raise AssertionError(f"unexpected differential {document['diff']['v2']}")


def test_lie_algebra_file(tmp_path, sl2):
    """A dumped built-in reloads with the same structure constants."""
    path = tmp_path / "sl2.json"
    dump_lie_algebra(sl2, path)
    g = load_lie_algebra(path)
    if g.brackets != sl2.brackets or g.root_system_id != "A1" or g.exponents != (1,):
        raise AssertionError("the reloaded algebra differs")
    if resolve_lie_algebra(str(path)).dim != 3 or resolve_lie_algebra("sl2").name != "sl2":
        raise AssertionError("resolution by path and by name")


def test_lie_algebra_from_brackets():
    """The two-dimensional solvable algebra, given by brackets only."""
    g = lie_algebra_from_dict(
        {
            "name": "aff1",
            "basis": ["x", "y"],
            "brackets": [{"left": "y", "right": "x", "value": {"y": "-1"}}],
            "reductive": False,
        }
    )
    if g.reductive or g.bracket_basis(0, 1) != {1: 1} or jacobi_failures(g):
        raise AssertionError(f"unexpected algebra {g.brackets}")


def test_lie_algebra_schema_errors():
    """Unknown labels and failing identities are rejected."""
    with pytest.raises(SchemaError) as info:
        lie_algebra_from_dict({"name": "g", "basis": ["x"], "brackets": [{"left": "x", "right": "w", "value": {}}]})
    if info.value.pointer != "/brackets/0/right":
        raise AssertionError(f"unexpected pointer {info.value.pointer}")
    broken = {
        "name": "g",
        "basis": ["a", "b", "c"],
        "brackets": [
            {"left": "a", "right": "b", "value": {"a": "1"}},
            {"left": "b", "right": "c", "value": {"b": "1"}},
            {"left": "a", "right": "c", "value": {"c": "1"}},
        ],
    }
    with pytest.raises(InputError):
        lie_algebra_from_dict(broken)
