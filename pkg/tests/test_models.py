"""
Model tests.

This module covers bracket trees and their tensor normal form, graded
antisymmetry, the Leibniz rule of the model differential, Quillen and
Sullivan validation with residues, and exponent maps for Sullivan monomials.
"""

import pytest
from sympy.polys.domains import QQ

from rephom.core.errors import InputError, ModelValidationError
from rephom.core.models import (
    LieExpr,
    apply_diff,
    bracket_tree,
    ensure_valid,
    format_tree,
    lie_equal,
    quillen_model,
    sullivan_model,
    sullivan_monomial,
    tensor_normal_form,
    validate,
)
from rephom.services.catalog import CATALOG_NAMES, catalog


def test_graded_antisymmetry():
    """[x, y] = -(-1)^{|x||y|} [y, x] for every parity combination."""
    degrees = {"x": 1, "y": 2, "u": 1}
    x, y, u = (LieExpr.generator(k, degrees) for k in ("x", "y", "u"))
    if not lie_equal(x.bracket(y), -(y.bracket(x))):
        raise AssertionError("[x,y] should equal -[y,x] when |y| is even")
    if not lie_equal(x.bracket(u), u.bracket(x)):
        raise AssertionError("[x,u] should equal [u,x] for two odd elements")
    if tensor_normal_form(y.bracket(y)):
        raise AssertionError("[y,y] vanishes for even y")
    if tensor_normal_form(x.bracket(x)) != {("x", "x"): QQ(2)}:
        raise AssertionError("[x,x] = 2xx for odd x")


def test_expression_degree_and_format():
    """Degrees add under brackets; mixed degrees are rejected."""
    degrees = {"x": 1, "y": 2}
    x, y = LieExpr.generator("x", degrees), LieExpr.generator("y", degrees)
    if x.bracket(y).degree != 3 or LieExpr.zero(degrees).degree is not None:
        raise AssertionError("unexpected degrees")
    with pytest.raises(InputError):
        (x + y).degree
    if format_tree(bracket_tree("x", bracket_tree("x", "y"))) != "[x,[x,y]]":
        raise AssertionError("unexpected tree format")
    if str(x.scale("1/2") + y) != "1/2*x + y":
        raise AssertionError(f"unexpected expression format {x.scale('1/2') + y}")
    with pytest.raises(InputError):
        LieExpr.generator("w", degrees)


def test_leibniz_sign():
    """d[a, b] = [da, b] - [a, db] for odd a."""
    m = quillen_model("m", [("a", 1, None), ("b", 2, None)], {"b": [(1, "a")]})
    if not validate(m).ok:
        raise AssertionError("db = a is a valid model")
    image = apply_diff(m, m.gen("a").bracket(m.gen("b")))
    if tensor_normal_form(image) != {("a", "a"): QQ(-2)}:
        raise AssertionError(f"unexpected d[a,b] = {image}")
    with pytest.raises(InputError):
        m.gen("c")


def test_projective_tower_is_valid():
    """dv_i = 1/2 sum [v_j, v_k] squares to zero, also after rescaling."""
    m = catalog("cp:3").quillen
    if not validate(m).ok or not validate(m.scaled(3)).ok:
        raise AssertionError("the projective tower should validate")
    v1, v2 = m.gen("v1"), m.gen("v2")
    if not lie_equal(apply_diff(m, v2), v1.bracket(v1).scale("1/2")):
        raise AssertionError("dv2 = 1/2 [v1,v1]")


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_catalog_models_validate(name):
    """Every catalog model passes validation."""
    entry = catalog(name)
    for model in (entry.quillen, entry.sullivan):
        if model is not None and not validate(model).ok:
            raise AssertionError(f"{name}: {validate(model).residues}")


def test_quillen_residues():
    """A differential that does not square to zero is reported per generator."""
    m = quillen_model(
        "bad", [("a", 1, None), ("b", 2, None), ("c", 3, None)], {"b": [(1, "a")], "c": [(1, "b")]}
    )
    report = validate(m)
    if report.ok or report.kind != "quillen":
        raise AssertionError("the model should fail validation")
    if report.residues != [{"generator": "c", "check": "d^2", "residue": "a"}]:
        raise AssertionError(f"unexpected residues {report.residues}")
    with pytest.raises(ModelValidationError) as info:
        ensure_valid(m)
    if info.value.residues != report.residues:
        raise AssertionError("the error should carry the residues")


def test_quillen_degree_and_weight_residues():
    """Wrong-degree and weight-changing terms are both reported."""
    m = quillen_model("w", [("a", 1, 1), ("b", 3, 1)], {"b": [(1, bracket_tree("a", "a"))]})
    checks = {r["check"] for r in validate(m).residues}
    if "weight" not in checks:
        raise AssertionError(f"expected a weight residue, got {checks}")
    m = quillen_model("d", [("a", 1, None), ("b", 4, None)], {"b": [(1, "a")]})
    checks = {r["check"] for r in validate(m).residues}
    if "degree" not in checks:
        raise AssertionError(f"expected a degree residue, got {checks}")


def test_sullivan_validation():
    """Q[z, s] with ds = z^3 validates; ds = z^2 breaks degree and weight."""
    good = sullivan_model("a2", [("z", 2, (1,)), ("s", 5, (3,))], {"s": [(1, {"z": 3})]})
    if not validate(good).ok:
        raise AssertionError(f"unexpected residues {validate(good).residues}")
    s = sullivan_monomial(good, {"s": 1})
    if good.apply({s: QQ(1)}) != {sullivan_monomial(good, {"z": 3}): QQ(1)}:
        raise AssertionError("ds should be z^3")
    bad = sullivan_model("b", [("z", 2, (1,)), ("s", 5, (3,))], {"s": [(1, {"z": 2})]})
    checks = {r["check"] for r in validate(bad).residues}
    if not {"degree", "weight"} <= checks:
        raise AssertionError(f"expected degree and weight residues, got {checks}")


def test_sullivan_monomials():
    """Odd squares vanish, negative exponents and unknown labels are errors."""
    m = sullivan_model("a", [("z", 2, (1,)), ("s", 3, (1,))])
    if sullivan_monomial(m, {"s": 2}) is not None:
        raise AssertionError("an odd generator squares to zero")
    if sullivan_monomial(m, {"z": 2, "s": 1}) != (0, 0, 1):
        raise AssertionError("unexpected monomial")
    with pytest.raises(InputError):
        sullivan_monomial(m, {"z": -1})
    with pytest.raises(InputError):
        sullivan_monomial(m, {"y": 1})
