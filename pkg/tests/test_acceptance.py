"""
Acceptance suite tests.

This module covers criterion selection by exact name and by prefix, budgets,
the conversion of raised errors into FAIL rows, and the detection of wrong
models through an injected space resolver.
"""

from unittest.mock import patch

import pytest

from rephom.core.errors import InputError
from rephom.core.models import quillen_model
from rephom.services.acceptance import CRITERIA, run_acceptance_suite
from rephom.services.catalog import CatalogEntry, catalog


def passing(resolve):
    return True, "value", "expected"


def raising(resolve):
    raise RuntimeError("boom")


def test_prefix_selection_and_budgets():
    """A prefix selects every matching criterion; budgets are reported."""
    with patch.dict(CRITERIA, {"macdonald-q": passing, "macdonald-qt": raising}):
        rows = run_acceptance_suite(["macdonald"], budgets={"macdonald-q": 10.0, "macdonald-qt": -1.0})
    if [row.criterion for row in rows] != ["macdonald-q", "macdonald-qt"]:
        raise AssertionError(f"unexpected rows {rows}")
    first, second = rows
    if first.status != "PASS" or not first.within_budget or first.budget != 10.0:
        raise AssertionError(f"unexpected row {first}")
    if second.status != "FAIL" or "boom" not in second.value or second.within_budget:
        raise AssertionError(f"unexpected row {second}")


def test_exact_name_selects_one_criterion():
    """A full criterion name is not widened to the criteria it prefixes."""
    with patch.dict(CRITERIA, {"macdonald-q": passing, "macdonald-qt": raising}):
        rows = run_acceptance_suite(["macdonald-q"])
    if [row.criterion for row in rows] != ["macdonald-q"] or rows[0].status != "PASS":
        raise AssertionError(f"unexpected rows {rows}")


def test_unknown_criterion():
    """Unknown names are input errors."""
    with pytest.raises(InputError):
        run_acceptance_suite(["nonsense"])


def test_cheap_criteria_pass():
    """Low-degree and torus criteria pass on the catalog."""
    rows = run_acceptance_suite(["low-degree", "tori"])
    if [row.status for row in rows] != ["PASS", "PASS"]:
        raise AssertionError(f"unexpected rows {rows}")


def test_wrong_model_fails_exactly_one_criterion():
    """A resolver serving a wrong model for CP^2 breaks only the torus check."""
    wrong = quillen_model("cp:2", [("a", 1, 1), ("b", 2, 1)], {"b": [(1, "a")]})

    def resolve(space):
        if space == "cp:2":
            return CatalogEntry("cp:2", wrong, None, 1)
        return catalog(space)

    rows = run_acceptance_suite(["low-degree", "tori"], resolve=resolve)
    statuses = {row.criterion: row.status for row in rows}
    if statuses != {"low-degree": "PASS", "tori": "FAIL"}:
        raise AssertionError(f"unexpected statuses {statuses}")
    if "cp:2" not in rows[1].value:
        raise AssertionError("the failing case should be named")


def test_low_degree_reads_the_homology_of_the_space():
    """A model of S^5 served for S^4 fails the low-degree criterion."""
    wrong = quillen_model("sphere:4", [("a", 4, 1)])

    def resolve(space):
        if space == "sphere:4":
            return CatalogEntry("sphere:4", wrong, None, 3, {4: 1})
        return catalog(space)

    rows = run_acceptance_suite(["low-degree"], resolve=resolve)
    if rows[0].status != "FAIL":
        raise AssertionError(f"unexpected row {rows[0]}")
