"""
Test Configuration Module.

This module provides shared fixtures for the rephom test suite:

1. Lie algebras - the built-in sl2, sl3 and a one-dimensional torus
2. Catalog entries - spheres and truncated projective spaces with their models
3. Configuration - the YAML defaults shipped in config/rephom.yaml
4. Model files - a valid and a broken model written to a temporary directory

The broken model has a differential that does not square to zero, so it can
drive the error paths of parsing, validation and the command line.
"""

import json
from pathlib import Path

import pytest

from rephom.core.lie import builtin
from rephom.services.catalog import catalog
from rephom.utils.config import load_config

CONFIG_PATH = Path(__file__).resolve().parent.parent / "config" / "rephom.yaml"


@pytest.fixture
def sl2():
    """The built-in sl2."""
    return builtin("sl2")


@pytest.fixture
def sl3():
    """The built-in sl3."""
    return builtin("sl3")


@pytest.fixture
def torus1():
    """The one-dimensional abelian Lie algebra."""
    return builtin("torus(1)")


@pytest.fixture
def sphere2():
    """Catalog entry of the 2-sphere."""
    return catalog("sphere:2")


@pytest.fixture
def sphere3():
    """Catalog entry of the 3-sphere."""
    return catalog("sphere:3")


@pytest.fixture
def cp2():
    """Catalog entry of the complex projective plane."""
    return catalog("cp:2")


@pytest.fixture
def config():
    """The shipped YAML configuration."""
    return load_config(CONFIG_PATH)


@pytest.fixture
def sullivan_file(tmp_path):
    """A Sullivan model file for Q[z, s] with ds = z^3."""
    data = {
        "type": "sullivan",
        "name": "a2",
        "generators": [
            {"name": "z", "degree": 2, "weight": 1},
            {"name": "s", "degree": 5, "weight": 3},
        ],
        "diff": {"s": [{"coeff": "1", "term": {"z": 3}}]},
    }
    path = tmp_path / "a2.json"
    path.write_text(json.dumps(data))
    return path


@pytest.fixture
def bad_model_file(tmp_path):
    """A Quillen model whose differential does not square to zero."""
    data = {
        "type": "quillen",
        "name": "bad",
        "generators": [
            {"name": "a", "degree": 1},
            {"name": "b", "degree": 2},
            {"name": "c", "degree": 3},
        ],
        "diff": {
            "b": [{"coeff": "1", "term": "a"}],
            "c": [{"coeff": "1", "term": "b"}],
        },
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    return path
