"""
Acceptance Suite Service Module

Runs the closed-form checks of the engine and collects one row per
criterion: PASS/FAIL, the computed value, the expected value and the
runtime. A criterion that raises becomes a FAIL row carrying the error
message; the suite itself never aborts.
"""

import logging
import time
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel

from rephom.core.ce_current import build_ce, ce_series
from rephom.core.cyclic import connes_cyclic_dims, loop_hodge_dims, reduction_coefficient_holds, total_hodge_dims
from rephom.core.drinfeld import (
    SymWord,
    drinfeld_freeness_check,
    psi_chain_map_failures,
    quillen_trace,
    trace_subalgebra_independent,
)
from rephom.core.errors import InputError
from rephom.core.lie import LieAlgebraData, builtin, power_trace_invariant
from rephom.core.macdonald import root_system, verify_q_identity, verify_qt_identity
from rephom.core.models import validate
from rephom.core.rep_complex import (
    build_rep_complex,
    homology_series,
    invariant_homology_series,
    low_degree_check,
    torus_series,
    vanishing_bound,
)
from rephom.core.series import free_graded_series
from rephom.services.catalog import CATALOG_NAMES, CatalogEntry, catalog

logger = logging.getLogger(__name__)

Resolver = Callable[[str], CatalogEntry]
Outcome = Tuple[bool, str, str]


class AcceptanceRow(BaseModel):
    """
    One line of the acceptance table.

    Attributes:
        criterion (str): criterion name
        status (str): PASS or FAIL
        value (str): computed value
        expected (str): expected value
        runtime (float): seconds
        budget (Optional[float]): runtime budget in seconds
        within_budget (bool): runtime <= budget
    """

    criterion: str
    status: str
    value: str
    expected: str
    runtime: float
    budget: Optional[float] = None
    within_budget: bool = True


def _join(parts: Iterable[str]) -> str:
    return "; ".join(parts)


def _odd_spheres(resolve: Resolver) -> Outcome:
    entry = resolve("sphere:3")
    ok, got, want = True, [], []
    for name in ("sl2", "sl3"):
        g = builtin(name)
        c = build_rep_complex(entry.require_quillen(), g, 12)
        series = invariant_homology_series(c, g, 12).forget_weights()
        expected = free_graded_series(("z",), [(2 * (m + 1),) for m in g.exponents], {"z": 13})
        ok = ok and series == expected
        got.append(f"{name}: {series}")
        want.append(f"{name}: {expected}")
    return ok, _join(got), _join(want)


def _cp_invariants(resolve: Resolver) -> Outcome:
    g = builtin("sl2")
    ok, got, want = True, [], []
    for r in (1, 2, 3):
        entry = resolve(f"cp:{r}")
        top = vanishing_bound(2, r, g)
        c = build_rep_complex(entry.require_quillen(), g, top)
        series = invariant_homology_series(c, g, top).forget_weights()
        degrees = [(2 * r * m + 2 * j - 1,) for m in g.exponents for j in range(1, r + 1)]
        expected = free_graded_series(("z",), degrees, {"z": top + 1})
        full = homology_series(c, top).degree_coefficients()
        vanishing = max(full) == top and full[top] == 1
        ok = ok and series == expected and vanishing
        got.append(f"cp:{r}: {series}, HR_{top} = {full.get(top, 0)}")
        want.append(f"cp:{r}: {expected}, HR_{top} = 1")
    return ok, _join(got), _join(want)


def _low_degree(resolve: Resolver) -> Outcome:
    ok, got = True, []
    for space in ("sphere:4", "sphere:5"):
        entry = resolve(space)
        for name in ("sl2", "sl3"):
            report = low_degree_check(
                entry.require_quillen(), builtin(name), entry.connectivity, entry.reduced_homology
            )
            ok = ok and report.ok
            got.append(f"{space}/{name}: " + " ".join(str(row.computed) for row in report.rows))
    return ok, _join(got), "HR_i = H_{i+1}(X; g*) in the low-degree window"


def _tori(resolve: Resolver) -> Outcome:
    ok, failures = True, []
    for name in ("torus(1)", "torus(2)"):
        g = builtin(name)
        for space in ("sphere:2", "sphere:3", "cp:2", "cp:3"):
            m = resolve(space).require_quillen()
            series = homology_series(build_rep_complex(m, g, 10), 10)
            if series != torus_series(m, g.dim, 10):
                ok = False
                failures.append(f"{space}/{name}: {series}")
    return ok, _join(failures) or "8 cases agree", "Lambda[H_{*+1}(X)^l] series"


def _cross_route(resolve: Resolver) -> Outcome:
    g = builtin("sl2")
    ok, got, want = True, [], []
    for space in ("sphere:2", "cp:2"):
        entry = resolve(space)
        rep = homology_series(build_rep_complex(entry.require_quillen(), g, 12), 12)
        ce = ce_series(build_ce(g, entry.require_sullivan(), degree_window=12), 12)
        ok = ok and rep == ce
        got.append(f"{space} ce: {ce}")
        want.append(f"{space} rep: {rep}")
    return ok, _join(got), _join(want)


def _cyclic_hodge(resolve: Resolver) -> Outcome:
    cases: List[Tuple[str, int, Dict[int, int]]] = [
        ("cp:2", 1, {5: 1, 7: 1}),
        ("cp:2", 2, {9: 1, 11: 1}),
        ("hp:1", 1, {9: 1}),
        ("kz:2:3", 0, {2 * j - 1: 1 for j in range(1, 7)}),
        ("kz:2:3", 1, {}),
        ("kzs:2,3", 1, {n: 1 for n in range(3, 13)}),
        ("kzs:2,3", 2, {n: 1 for n in range(5, 13)}),
    ]
    ok, got, want = True, [], []
    for space, m, expected in cases:
        dims = loop_hodge_dims(resolve(space).require_sullivan(), m, 12)
        ok = ok and dims == expected
        got.append(f"{space} m={m}: {sorted(dims)}")
        want.append(f"{space} m={m}: {sorted(expected)}")
    for r in (1, 2):
        A = resolve(f"cp:{r}").require_sullivan()
        for m in (1, 2):
            for k in range(3):
                if not reduction_coefficient_holds(A, r, m, k):
                    ok = False
                    got.append(f"coefficient fails for r={r}, m={m}, k={k}")
    for space in ("kzs:2,3", "sphere:2"):
        A = resolve(space).require_sullivan()
        if total_hodge_dims(A, 4) != connes_cyclic_dims(A, 4):
            ok = False
            got.append(f"{space}: Hodge sum disagrees with the Connes complex")
    return ok, _join(got), _join(want)


def _drinfeld(resolve: Resolver) -> Outcome:
    cases = [
        ("sphere:3", "sl2", 8),
        ("sphere:3", "sl3", 8),
        ("cp:2", "sl2", 12),
        ("cp:3", "sl2", 27),
        ("kzs:2,3", "sl2", 7),
    ]
    ok, got = True, []
    for space, name, top in cases:
        report = drinfeld_freeness_check(resolve(space), builtin(name), top)
        ok = ok and report.verdict == "PASS"
        got.append(f"{space}/{name}: {report.verdict} {report.generators}")
    if not trace_subalgebra_independent(resolve("sphere:3").require_quillen(), builtin("sl3"), "u", 12):
        ok = False
        got.append("sphere:3/sl3: trace products dependent up to degree 12")
    return ok, _join(got), "PASS for every case"


def _macdonald_q(resolve: Resolver) -> Outcome:
    cases = [("A1", 1), ("A1", 2), ("A1", 3), ("A2", 1), ("A2", 2), ("B2", 1), ("G2", 1)]
    ok, got = True, []
    for type_name, r in cases:
        report = verify_q_identity(root_system(type_name), r)
        ok = ok and report.verdict == "PASS"
        got.append(f"{type_name} r={r}: {report.lhs}")
    return ok, _join(got), "chi_ct_q == chi_product_q"


def _macdonald_qt(resolve: Resolver) -> Outcome:
    ok, got = True, []
    for type_name in ("A1", "A2"):
        report = verify_qt_identity(root_system(type_name), 5, 5)
        ok = ok and report.verdict == "PASS"
        got.append(f"{type_name}: {report.verdict}" + (f" at {report.mismatch}" if report.mismatch else ""))
    return ok, _join(got), "equal mod (q^5, t^5)"


def _properties(resolve: Resolver) -> Outcome:
    groups: List[LieAlgebraData] = [builtin(name) for name in ("sl2", "sl3", "torus(1)", "torus(2)")]
    ok, notes = True, []
    for space in CATALOG_NAMES:
        entry = resolve(space)
        for model in (entry.quillen, entry.sullivan):
            if model is not None and not validate(model).ok:
                ok = False
                notes.append(f"{space}: {model.name} fails validation")
        for g in groups:
            # The complexes check d^2 = 0 on generators when built.
            if entry.quillen is not None:
                build_rep_complex(entry.quillen, g, 6)
            if entry.sullivan is not None:
                build_ce(g, entry.sullivan, degree_window=3)
    sphere3 = resolve("sphere:3").require_quillen()
    g = builtin("sl2")
    c = build_rep_complex(sphere3, g, 4)
    word = SymWord((sphere3.gen("u"), sphere3.gen("u")))
    image = quillen_trace(power_trace_invariant(g, 2), sphere3, g, word, c.algebra)
    if not c.invariant_subcomplex().is_invariant(image):
        ok = False
        notes.append("trace image of u.u is not ad-invariant")
    cp2 = resolve("cp:2").require_quillen()
    base = build_rep_complex(cp2, g, 12).homology(12)
    if build_rep_complex(cp2.scaled(2), g, 12).homology(12) != base:
        ok = False
        notes.append("homology of cp:2 changes when the differential is scaled")
    for space in ("kzs:2,3", "cp:1"):
        failures = psi_chain_map_failures(power_trace_invariant(g, 2), g, resolve(space).require_sullivan(), 4)
        if failures:
            ok = False
            notes.append(f"{space}: Psi is not a chain map on {failures[0]}")
    return ok, _join(notes) or "all properties hold", "d^2 = 0, invariant traces, scaling invariance, Psi chain map"


CRITERIA: Dict[str, Callable[[Resolver], Outcome]] = {
    "odd-spheres": _odd_spheres,
    "cp-invariants": _cp_invariants,
    "low-degree": _low_degree,
    "tori": _tori,
    "cross-route": _cross_route,
    "cyclic-hodge": _cyclic_hodge,
    "drinfeld": _drinfeld,
    "macdonald-q": _macdonald_q,
    "macdonald-qt": _macdonald_qt,
    "properties": _properties,
}


def _selected(only: Optional[Sequence[str]]) -> List[str]:
    if not only:
        return list(CRITERIA)
    chosen = []
    for prefix in only:
        # An exact name selects that criterion alone.
        matches = [prefix] if prefix in CRITERIA else [name for name in CRITERIA if name.startswith(prefix)]
        if not matches:
            raise InputError(f"unknown acceptance criterion {prefix!r} (known: {', '.join(CRITERIA)})")
        chosen += [name for name in matches if name not in chosen]
    return chosen


def run_acceptance_suite(
    only: Optional[Sequence[str]] = None,
    budgets: Optional[Dict[str, float]] = None,
    resolve: Resolver = catalog,
) -> List[AcceptanceRow]:
    """
    Run the acceptance criteria.

    Args:
        only (Optional[Sequence[str]]): criterion names or prefixes, e.g. ``macdonald``
        budgets (Optional[Dict[str, float]]): runtime budget per criterion, in seconds
        resolve (Resolver): space resolver, ``catalog`` by default

    Returns:
        List[AcceptanceRow]: one row per selected criterion

    Raises:
        InputError: for an unknown criterion name
    """
    budgets = budgets or {}
    rows = []
    for name in _selected(only):
        start = time.perf_counter()
        try:
            ok, value, expected = CRITERIA[name](resolve)
        except Exception as exc:
            logger.error("acceptance criterion %s raised: %s", name, exc)
            ok, value, expected = False, f"error: {exc}", "no error"
        runtime = round(time.perf_counter() - start, 3)
        budget = budgets.get(name)
        rows.append(
            AcceptanceRow(
                criterion=name,
                status="PASS" if ok else "FAIL",
                value=value,
                expected=expected,
                runtime=runtime,
                budget=budget,
                within_budget=budget is None or runtime <= budget,
            )
        )
        logger.info("acceptance %s: %s in %.2fs", name, rows[-1].status, runtime)
    return rows

