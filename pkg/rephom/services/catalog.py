"""
Space Catalog Service Module

This module maps space descriptions to validated algebraic models. A space is
named by a short string (``sphere:3``, ``cp:2``, ``hp:1``, ``op2``,
``kz:4:3``, ``kzs:2,3``; the forms ``sphere(3)`` and ``cp(2)`` are accepted
too) or by the path of a model file.

Each entry carries the Quillen and/or Sullivan model, the connectivity of the
space, its reduced rational homology in low degrees, and the degree up to
which a truncated model is valid.
"""

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

from rephom.core.errors import InputError
from rephom.core.models import (
    QuillenModel,
    SullivanModel,
    bracket_tree,
    ensure_valid,
    quillen_model,
    sullivan_model,
)
from rephom.services.model_io import parse_model

logger = logging.getLogger(__name__)

HOMOLOGY_WINDOW = 24


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    """
    A space together with its models.

    Attributes:
        name (str): canonical space string
        quillen (Optional[QuillenModel]): Quillen model, if one is available
        sullivan (Optional[SullivanModel]): Sullivan model, if one is available
        connectivity (int): the space is ``connectivity``-connected
        reduced_homology (Dict[int, int]): dim of reduced rational homology per
            degree, up to ``HOMOLOGY_WINDOW``
        validity_bound (Optional[int]): highest degree where a truncated model
            is exact; None for finite models
        projective (Optional[Tuple[int, int]]): (d, r) for truncated projective spaces
    """

    name: str
    quillen: Optional[QuillenModel]
    sullivan: Optional[SullivanModel]
    connectivity: int
    reduced_homology: Dict[int, int] = field(default_factory=dict)
    validity_bound: Optional[int] = None
    projective: Optional[Tuple[int, int]] = None

    def require_quillen(self) -> QuillenModel:
        if self.quillen is None:
            raise InputError(f"{self.name} has no Quillen model; use a Sullivan-model command")
        return self.quillen

    def require_sullivan(self) -> SullivanModel:
        if self.sullivan is None:
            raise InputError(f"{self.name} has no Sullivan model")
        return self.sullivan


def _projective_diff(r: int) -> Dict[str, List[Tuple[object, object]]]:
    # dv_i = 1/2 sum_{j+k=i} [v_j, v_k]
    diff: Dict[str, List[Tuple[object, object]]] = {}
    for i in range(2, r + 1):
        terms = []
        for j in range(1, i):
            terms.append(("1/2", bracket_tree(f"v{j}", f"v{i - j}")))
        diff[f"v{i}"] = terms
    return diff


def projective_quillen(d: int, r: int, name: str, validity_bound: Optional[int] = None) -> QuillenModel:
    """Generators v_1..v_r of degree d*i - 1 and weight i."""
    generators = [(f"v{i}", d * i - 1, i) for i in range(1, r + 1)]
    return ensure_valid(quillen_model(name, generators, _projective_diff(r), validity_bound))


def projective_sullivan(d: int, r: int, name: str) -> SullivanModel:
    """(Q[z, s], ds = z^{r+1}) with |z| = d, |s| = d(r+1) - 1, weights 1 and r+1."""
    generators = [("z", d, (1,)), ("s", d * (r + 1) - 1, (r + 1,))]
    return ensure_valid(sullivan_model(name, generators, {"s": [(1, {"z": r + 1})]}))


def truncated_projective(d: int, r: int, name: Optional[str] = None) -> CatalogEntry:
    """
    The space with rational cohomology Q[z]/(z^{r+1}), |z| = d even.

    Raises:
        InputError: for odd d or r < 1
    """
    if d < 2 or d % 2 or r < 1:
        raise InputError(f"truncated projective space needs even d >= 2 and r >= 1, got d={d}, r={r}")
    name = name or f"tp:{d},{r}"
    return CatalogEntry(
        name=name,
        quillen=projective_quillen(d, r, name),
        sullivan=projective_sullivan(d, r, name),
        connectivity=d - 1,
        reduced_homology={d * i: 1 for i in range(1, r + 1)},
        projective=(d, r),
    )


def odd_sphere(n: int) -> CatalogEntry:
    """S^n for odd n: L(u) with |u| = n - 1, and Lambda(s) with |s| = n."""
    name = f"sphere:{n}"
    quillen = ensure_valid(quillen_model(name, [("u", n - 1, 1)]))
    sullivan = ensure_valid(sullivan_model(name, [("s", n, (1,))]))
    return CatalogEntry(name=name, quillen=quillen, sullivan=sullivan, connectivity=n - 1, reduced_homology={n: 1})


def sphere(n: int) -> CatalogEntry:
    """
    The n-sphere; even spheres are truncated projective spaces with r = 1.

    Raises:
        InputError: for n < 2
    """
    if n < 2:
        raise InputError(f"only simply connected spheres are supported, got sphere:{n}")
    if n % 2:
        return odd_sphere(n)
    return truncated_projective(n, 1, f"sphere:{n}")


def kz(d: int, truncation: int = 3) -> CatalogEntry:
    """
    K(Z, d). For even d the Quillen model is the truncation to v_1..v_N of the
    projective tower, exact up to degree d(N + 1) - 3; the Sullivan model Q[z]
    is exact. For odd d the space is rationally S^d.

    Raises:
        InputError: for d < 2 or N < 1
    """
    if d < 2 or truncation < 1:
        raise InputError(f"kz needs d >= 2 and truncation >= 1, got d={d}, N={truncation}")
    name = f"kz:{d}:{truncation}" if d % 2 == 0 else f"kz:{d}"
    if d % 2:
        entry = odd_sphere(d)
        return CatalogEntry(name, entry.quillen, entry.sullivan, entry.connectivity, entry.reduced_homology)
    bound = d * (truncation + 1) - 3
    return CatalogEntry(
        name=name,
        quillen=projective_quillen(d, truncation, name, validity_bound=bound),
        sullivan=ensure_valid(sullivan_model(name, [("z", d, (1,))])),
        connectivity=d - 1,
        reduced_homology={d * i: 1 for i in range(1, HOMOLOGY_WINDOW // d + 1)},
        validity_bound=bound,
    )


def kzs(d: int, p: int) -> CatalogEntry:
    """
    K(Z, d) x S^p with Sullivan model Q[z, s], zero differential, bigraded by
    z -> (1, 0), s -> (0, 1).

    Raises:
        InputError: unless d is even and p is odd
    """
    if d < 2 or d % 2 or p < 3 or p % 2 == 0:
        raise InputError(f"kzs needs even d >= 2 and odd p >= 3, got d={d}, p={p}")
    name = f"kzs:{d},{p}"
    sullivan = ensure_valid(sullivan_model(name, [("z", d, (1, 0)), ("s", p, (0, 1))]))
    homology: Dict[int, int] = {}
    for n in range(0, HOMOLOGY_WINDOW + 1, d):
        for extra in (0, p):
            if 0 < n + extra <= HOMOLOGY_WINDOW:
                homology[n + extra] = homology.get(n + extra, 0) + 1
    return CatalogEntry(
        name=name,
        quillen=None,
        sullivan=sullivan,
        connectivity=min(d, p) - 1,
        reduced_homology=dict(sorted(homology.items())),
    )


def _file_entry(path: Path) -> CatalogEntry:
    model = parse_model(path)
    if isinstance(model, QuillenModel):
        connectivity = min((g.degree for g in model.generators), default=1)
        return CatalogEntry(model.name, model, None, connectivity, validity_bound=model.validity_bound)
    connectivity = min((g.degree for g in model.generators), default=2) - 1
    return CatalogEntry(model.name, None, model, connectivity)


def _ints(args: Iterable[str], space: str) -> List[int]:
    try:
        return [int(a) for a in args]
    except ValueError as exc:
        raise InputError(f"malformed space {space!r}") from exc


_SPACE_RE = re.compile(r"([a-z]+\d?)(?:[:(]([\d,:\s]*)\)?)?")


def catalog(space: str) -> CatalogEntry:
    """
    Resolve a space string or model-file path.

    Args:
        space (str): ``sphere:n``, ``cp:r``, ``hp:r``, ``op2``, ``kz:d[:N]``,
            ``kzs:d,p`` (parenthesized forms also accepted) or a file path

    Returns:
        CatalogEntry: the entry with validated models

    Raises:
        InputError: for an unsupported space or malformed arguments
    """
    text = space.strip()
    path = Path(text)
    if text.endswith(".json") or path.is_file():
        return _file_entry(path)
    match = _SPACE_RE.fullmatch(text.lower())
    if not match:
        raise InputError(f"unsupported space {space!r}")
    kind = match.group(1)
    args = _ints([a for a in re.split(r"[,:\s]+", match.group(2) or "") if a], space)
    if kind in ("sphere", "s") and len(args) == 1:
        entry = sphere(args[0])
    elif kind == "cp" and len(args) == 1:
        entry = truncated_projective(2, args[0], f"cp:{args[0]}")
    elif kind == "hp" and len(args) == 1:
        entry = truncated_projective(4, args[0], f"hp:{args[0]}")
    elif kind == "op2" and not args:
        entry = truncated_projective(8, 2, "op2")
    elif kind == "tp" and len(args) == 2:
        entry = truncated_projective(*args)
    elif kind == "kz" and len(args) in (1, 2):
        entry = kz(*args)
    elif kind == "kzs" and len(args) == 2:
        entry = kzs(*args)
    else:
        raise InputError(f"unsupported space {space!r}")
    logger.info("catalog %s: connectivity %d", entry.name, entry.connectivity)
    return entry


CATALOG_NAMES = (
    "sphere:2",
    "sphere:3",
    "sphere:4",
    "sphere:5",
    "cp:2",
    "cp:3",
    "hp:1",
    "hp:2",
    "op2",
    "kz:2:3",
    "kzs:2,3",
)


def catalog_entries(names: Iterable[str] = CATALOG_NAMES) -> List[CatalogEntry]:
    return [catalog(name) for name in names]
