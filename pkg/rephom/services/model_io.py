"""
Model File Service Module

Reading and writing the JSON formats of the engine:

- model files ``{"type": "quillen" | "sullivan", "name", "generators":
  [{"name", "degree", "weight"}], "diff": {gen: [{"coeff": "p/q", "term": ...}]},
  "validity_bound"}`` where a Quillen term is a bracket tree (a generator
  name or ``["b", left, right]``) and a Sullivan term is an exponent map
  ``{"gen": exponent}``;
- Lie algebra files ``{"name", "basis", "brackets": [{"left", "right",
  "value": {label: "p/q"}}], "matrices", "exponents", "root_system",
  "reductive", "invariants": [[kind, arg]]}``.

Schema violations are raised as ``SchemaError`` with a JSON-pointer location.
"""

import dataclasses
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field, ValidationError, validator
from sympy import Matrix
from sympy.polys.domains import QQ

from rephom.core.errors import InputError, SchemaError
from rephom.core.lie import LieAlgebraData, builtin, from_matrices, validate_lie_algebra
from rephom.core.linalg import format_rational, to_rational
from rephom.core.models import (
    QuillenModel,
    SullivanModel,
    Tree,
    bracket_tree,
    ensure_valid,
    quillen_model,
    sullivan_model,
)

logger = logging.getLogger(__name__)

Model = Union[QuillenModel, SullivanModel]


class GeneratorSpec(BaseModel):
    name: str = Field(..., min_length=1)
    degree: int
    weight: Optional[Union[int, List[int]]] = None


class TermSpec(BaseModel):
    coeff: str
    term: Any

    @validator("coeff")
    def _rational(cls, value: str) -> str:
        to_rational(value)
        return value


class ModelFile(BaseModel):
    """
    Schema of a model file.

    Attributes:
        type (str): ``quillen`` or ``sullivan``
        name (Optional[str]): model name; defaults to the file stem
        generators (List[GeneratorSpec]): generators with degree and weight
        diff (Dict[str, List[TermSpec]]): differential on generators
        validity_bound (Optional[int]): truncation validity bound (Quillen only)
    """

    type: str
    name: Optional[str] = None
    generators: List[GeneratorSpec]
    diff: Dict[str, List[TermSpec]] = {}
    validity_bound: Optional[int] = None

    @validator("type")
    def _known_type(cls, value: str) -> str:
        if value not in ("quillen", "sullivan"):
            raise ValueError("must be 'quillen' or 'sullivan'")
        return value


class BracketSpec(BaseModel):
    left: str
    right: str
    value: Dict[str, str]


class LieAlgebraFile(BaseModel):
    name: str
    basis: List[str]
    brackets: List[BracketSpec] = []
    matrices: Optional[List[List[List[str]]]] = None
    exponents: List[int] = []
    root_system: Optional[str] = None
    reductive: bool = True
    invariants: List[Tuple[str, int]] = []


def _pointer(loc: Tuple[Any, ...]) -> str:
    return "/" + "/".join(str(part) for part in loc)


def _validated(schema, data: Any, what: str):
    try:
        return schema.parse_obj(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise SchemaError(f"{what}: {first['msg']}", _pointer(first["loc"])) from exc


def _read_json(path: Union[str, Path]) -> Any:
    try:
        with open(path, "r") as file:
            return json.load(file)
    except FileNotFoundError as exc:
        raise InputError(f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON ({exc.msg} at line {exc.lineno})") from exc


def _tree(raw: Any, known: Dict[str, int], pointer: str) -> Tree:
    if isinstance(raw, str):
        if raw not in known:
            raise SchemaError(f"unknown generator {raw!r}", pointer)
        return raw
    if isinstance(raw, list) and len(raw) == 3 and raw[0] == "b":
        return bracket_tree(_tree(raw[1], known, pointer + "/1"), _tree(raw[2], known, pointer + "/2"))
    raise SchemaError("a bracket tree is a generator name or [\"b\", left, right]", pointer)


def _exponents(raw: Any, known: Dict[str, int], pointer: str) -> Dict[str, int]:
    if not isinstance(raw, dict):
        raise SchemaError("a monomial is a map generator -> exponent", pointer)
    for label, e in raw.items():
        if label not in known:
            raise SchemaError(f"unknown generator {label!r}", f"{pointer}/{label}")
        if not isinstance(e, int) or isinstance(e, bool) or e < 0:
            raise SchemaError("exponents are nonnegative integers", f"{pointer}/{label}")
    return dict(raw)


def model_from_dict(data: Any, default_name: str = "model", check: bool = True) -> Model:
    """
    Build a model from the JSON document of a model file.

    Args:
        data (Any): decoded JSON
        default_name (str): name when the document has none
        check (bool): validate d^2 = 0 and weights

    Raises:
        SchemaError: with a JSON-pointer location
        ModelValidationError: when ``check`` is set and validation fails
    """
    spec = _validated(ModelFile, data, "model file")
    name = spec.name or default_name
    known = {g.name: g.degree for g in spec.generators}
    if len(known) != len(spec.generators):
        raise SchemaError("duplicate generator names", "/generators")
    for label in spec.diff:
        if label not in known:
            raise SchemaError(f"differential of unknown generator {label!r}", f"/diff/{label}")
    if spec.type == "quillen":
        generators = []
        for i, g in enumerate(spec.generators):
            if isinstance(g.weight, list):
                raise SchemaError("Quillen weights are integers", f"/generators/{i}/weight")
            generators.append((g.name, g.degree, g.weight))
        diff = {
            label: [(t.coeff, _tree(t.term, known, f"/diff/{label}/{k}/term")) for k, t in enumerate(terms)]
            for label, terms in spec.diff.items()
        }
        model: Model = quillen_model(name, generators, diff, spec.validity_bound)
    else:
        generators = []
        for i, g in enumerate(spec.generators):
            if g.weight is None:
                raise SchemaError("Sullivan generators need a weight", f"/generators/{i}/weight")
            weight = (g.weight,) if isinstance(g.weight, int) else tuple(g.weight)
            generators.append((g.name, g.degree, weight))
        diff = {
            label: [(t.coeff, _exponents(t.term, known, f"/diff/{label}/{k}/term")) for k, t in enumerate(terms)]
            for label, terms in spec.diff.items()
        }
        model = sullivan_model(name, generators, diff)
    return ensure_valid(model) if check else model


def parse_model(path: Union[str, Path], check: bool = True) -> Model:
    """
    Read a model file.

    Args:
        path (Union[str, Path]): JSON model file
        check (bool): validate the model after parsing

    Returns:
        Model: QuillenModel or SullivanModel

    Raises:
        InputError: for a missing file
        SchemaError: for a schema violation, with its JSON-pointer location
        ModelValidationError: if the parsed model fails validation
    """
    model = model_from_dict(_read_json(path), Path(path).stem, check)
    logger.info("parsed %s model %s with %d generators", type(model).__name__, model.name, len(model.generators))
    return model


def _tree_json(tree: Tree) -> Any:
    if isinstance(tree, str):
        return tree
    return ["b", _tree_json(tree[1]), _tree_json(tree[2])]


def model_to_dict(m: Model) -> Dict[str, Any]:
    """The JSON document of a model; inverse of ``model_from_dict``."""
    if isinstance(m, QuillenModel):
        data: Dict[str, Any] = {
            "type": "quillen",
            "name": m.name,
            "generators": [
                {"name": g.label, "degree": g.degree, **({"weight": g.weight} if g.weight is not None else {})}
                for g in m.generators
            ],
            "diff": {
                label: [
                    {"coeff": format_rational(c), "term": _tree_json(t)}
                    for t, c in sorted(expr.terms.items(), key=lambda kv: str(kv[0]))
                ]
                for label, expr in sorted(m.diff.items())
                if not expr.is_zero()
            },
        }
        if m.validity_bound is not None:
            data["validity_bound"] = m.validity_bound
        return data
    labels = [g.label for g in m.generators]
    diff = {}
    for label, poly in sorted(m.diff.items()):
        terms = []
        for mono, c in sorted(poly.items()):
            exponents: Dict[str, int] = {}
            for i in mono:
                exponents[labels[i]] = exponents.get(labels[i], 0) + 1
            terms.append({"coeff": format_rational(c), "term": exponents})
        if terms:
            diff[label] = terms
    return {
        "type": "sullivan",
        "name": m.name,
        "generators": [{"name": g.label, "degree": g.degree, "weight": list(g.weight)} for g in m.generators],
        "diff": diff,
    }


def dump_model(m: Model, path: Optional[Union[str, Path]] = None) -> str:
    """Serialize a model; writes ``path`` when given and returns the JSON text."""
    text = json.dumps(model_to_dict(m), indent=2, sort_keys=True) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def lie_algebra_from_dict(data: Any) -> LieAlgebraData:
    """
    Build a Lie algebra from its JSON document.

    Matrices, when present, define the brackets and the defining
    representation; listed brackets must then agree with them.

    Raises:
        SchemaError: for a schema violation or an unknown basis label
        InputError: when the Jacobi identity or the matrix check fails
    """
    spec = _validated(LieAlgebraFile, data, "Lie algebra file")
    index = {label: i for i, label in enumerate(spec.basis)}
    if len(index) != len(spec.basis):
        raise SchemaError("duplicate basis labels", "/basis")
    brackets: Dict[Tuple[int, int], Dict[int, Any]] = {}
    for n, b in enumerate(spec.brackets):
        for key in ("left", "right"):
            if getattr(b, key) not in index:
                raise SchemaError(f"unknown basis label {getattr(b, key)!r}", f"/brackets/{n}/{key}")
        value = {}
        for label, coeff in b.value.items():
            if label not in index:
                raise SchemaError(f"unknown basis label {label!r}", f"/brackets/{n}/value/{label}")
            c = to_rational(coeff)
            if c:
                value[index[label]] = c
        i, j = index[b.left], index[b.right]
        if i == j:
            raise SchemaError("a bracket of a basis vector with itself is zero", f"/brackets/{n}")
        if i > j:
            i, j, value = j, i, {k: -c for k, c in value.items()}
        if value:
            brackets[(i, j)] = value
    invariants = tuple((kind, int(arg)) for kind, arg in spec.invariants)
    if spec.matrices is not None:
        if len(spec.matrices) != len(spec.basis):
            raise SchemaError(f"{len(spec.matrices)} matrices for {len(spec.basis)} basis vectors", "/matrices")
        mats = [Matrix([[QQ.to_sympy(to_rational(x)) for x in row] for row in m]) for m in spec.matrices]
        g = from_matrices(spec.name, spec.basis, mats, spec.exponents, spec.root_system, invariants)
        if spec.brackets and g.brackets != brackets:
            raise InputError(f"{spec.name}: listed brackets disagree with the matrices")
    else:
        g = validate_lie_algebra(
            LieAlgebraData(
                name=spec.name,
                basis_labels=tuple(spec.basis),
                brackets=brackets,
                exponents=tuple(spec.exponents),
                root_system_id=spec.root_system,
                reductive=spec.reductive,
                invariant_spec=invariants,
            )
        )
    if g.reductive != spec.reductive:
        g = dataclasses.replace(g, reductive=spec.reductive)
    return g


def load_lie_algebra(path: Union[str, Path]) -> LieAlgebraData:
    g = lie_algebra_from_dict(_read_json(path))
    logger.info("loaded Lie algebra %s of dimension %d from %s", g.name, g.dim, path)
    return g


def lie_algebra_to_dict(g: LieAlgebraData) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "name": g.name,
        "basis": list(g.basis_labels),
        "brackets": [
            {
                "left": g.basis_labels[i],
                "right": g.basis_labels[j],
                "value": {g.basis_labels[k]: format_rational(c) for k, c in sorted(coords.items())},
            }
            for (i, j), coords in sorted(g.brackets.items())
        ],
        "exponents": list(g.exponents),
        "reductive": g.reductive,
        "invariants": [list(spec) for spec in g.invariant_spec],
    }
    if g.root_system_id:
        data["root_system"] = g.root_system_id
    if g.defining_rep is not None:
        data["matrices"] = [[[str(x) for x in m.row(i)] for i in range(m.rows)] for m in g.defining_rep]
    return data


def dump_lie_algebra(g: LieAlgebraData, path: Optional[Union[str, Path]] = None) -> str:
    text = json.dumps(lie_algebra_to_dict(g), indent=2, sort_keys=True) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def resolve_lie_algebra(group: str) -> LieAlgebraData:
    """A built-in name such as ``sl2`` or ``torus(2)``, or a Lie algebra file path."""
    if group.strip().endswith(".json") or Path(group).is_file():
        return load_lie_algebra(group)
    return builtin(group)
