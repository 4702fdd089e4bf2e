"""
Command-line tests.

This module drives ``rephom.main.main`` end to end and checks the exit-code
contract: 0 for success, 1 for a mathematical mismatch, 2 for an input
error. Reports are read back from stdout or from the output file.
"""

import json
from unittest.mock import patch

import pytest

from rephom.api.jobs import HANDLERS, JobSpec, run
from rephom.core.errors import ConventionError, InputError
from rephom.core.series import PoincareSeries
from rephom.main import build_parser, main
from rephom.services.acceptance import AcceptanceRow

ENVELOPE = {"schema", "command", "conventions"}


def report_of(capsys):
    return json.loads(capsys.readouterr().out)


def test_macdonald_q_identity(capsys):
    """The q-identity for A1 passes and reports the Weyl group order."""
    if main(["macdonald", "--type", "A1", "--r", "1"]) != 0:
        raise AssertionError("expected exit status 0")
    report = report_of(capsys)
    if report["verdict"] != "PASS" or report["weyl_order"] != 2 or report["schema"] != "rephom/1":
        raise AssertionError(f"unexpected report {report}")
    if "|W|" not in report["normalization_note"]:
        raise AssertionError("the normalization note is always reported")


def test_compute_two_sphere(capsys):
    """Representation homology of S^2 in sl2 with its invariant part."""
    status = main(["compute", "--space", "sphere:2", "--group", "sl2", "--max-degree", "3"])
    report = report_of(capsys)
    if status != 0 or report["route"] != "rep":
        raise AssertionError(f"unexpected report {report}")
    if report["betti"] != {"0": 1, "1": 3, "2": 3, "3": 1} or report["invariant_betti"] != {"0": 1, "3": 1}:
        raise AssertionError(f"unexpected betti numbers {report['betti']}, {report['invariant_betti']}")


def test_compute_report_keys(capsys):
    """The compute report carries exactly the homology fields."""
    main(["compute", "--space", "sphere:2", "--group", "sl2", "--max-degree", "3"])
    keys = set(report_of(capsys)) - ENVELOPE - {"note"}
    expected = {
        "space",
        "group",
        "max_degree",
        "route",
        "series",
        "weighted_series",
        "betti",
        "invariant_series",
        "weighted_invariant_series",
        "invariant_betti",
    }
    if keys != expected:
        raise AssertionError(f"unexpected keys {sorted(keys ^ expected)}")


def test_ce_check_shares_compute_schema(capsys):
    """ce-check reports the compute fields with route ce, plus the comparison."""
    status = main(["ce-check", "--space", "sphere:2", "--group", "sl2", "--max-degree", "3"])
    report = report_of(capsys)
    if status != 0 or report["route"] != "ce" or report["verdict"] != "PASS":
        raise AssertionError(f"unexpected report {report}")
    missing = {"space", "group", "betti", "invariant_betti", "series", "rep_series"} - set(report)
    if missing:
        raise AssertionError(f"missing keys {sorted(missing)}")
    if report["betti"] != {"0": 1, "1": 3, "2": 3, "3": 1} or report["invariant_betti"] != {"0": 1, "3": 1}:
        raise AssertionError(f"the cochain route disagrees: {report['betti']}, {report['invariant_betti']}")


def test_macdonald_qt_report_keys(capsys):
    """The (q,t) report has the same headline fields as the q report."""
    if main(["macdonald", "--type", "A1", "--nq", "3", "--nt", "3"]) != 0:
        raise AssertionError("expected exit status 0")
    report = report_of(capsys)
    missing = {"type", "r", "lhs", "rhs", "verdict", "normalization_note"} - set(report)
    if missing or report["r"] is not None:
        raise AssertionError(f"unexpected report {report}")


def test_hodge_loop_degrees(capsys):
    """Loop degrees of the first Hodge piece of CP^2."""
    if main(["hodge", "--space", "cp:2", "--m", "1", "--max-degree", "12"]) != 0:
        raise AssertionError("expected exit status 0")
    report = report_of(capsys)
    if report["hodge_dims"] != {"5": 1, "7": 1} or len(report["loop_classes"]) != 2:
        raise AssertionError(f"unexpected report {report}")
    if report["model"] != "cp:2" or report["m"] != 1:
        raise AssertionError(f"unexpected header {report}")


def test_trace_command(capsys):
    """The trace of u.u on S^3 is an invariant nonzero class."""
    if main(["trace", "--space", "sphere:3", "--group", "sl2", "--word", "u.u"]) != 0:
        raise AssertionError("expected exit status 0")
    report = report_of(capsys)
    if not (report["cycle"] and report["invariant"] and report["nonzero_class"]) or report["degree"] != 4:
        raise AssertionError(f"unexpected report {report}")


def test_validate_reports_residues(bad_model_file, capsys):
    """A failing model exits with status 2 and lists its residues."""
    if main(["validate", "--model", str(bad_model_file)]) != 2:
        raise AssertionError("expected exit status 2")
    report = report_of(capsys)
    if report["kind"] != "ModelValidationError" or report["residues"][0]["generator"] != "c":
        raise AssertionError(f"unexpected report {report}")


def test_validate_good_model(sullivan_file, capsys):
    """A valid model exits with status 0."""
    if main(["validate", "--model", str(sullivan_file)]) != 0:
        raise AssertionError("expected exit status 0")
    if report_of(capsys)["ok"] is not True:
        raise AssertionError("the report should be ok")


@pytest.mark.parametrize(
    "argv",
    [
        ["compute", "--space", "torus:2", "--group", "sl2"],
        ["compute", "--space", "sphere:2", "--group", "e8"],
        ["compute", "--space", "sphere:2"],
        ["macdonald", "--type", "E6", "--r", "1"],
    ],
)
def test_input_errors(argv, capsys):
    """Unknown spaces, groups or missing flags exit with status 2."""
    if main(argv) != 2:
        raise AssertionError(f"expected exit status 2 for {argv}")
    if "error" not in report_of(capsys):
        raise AssertionError("the report should carry the error")


def test_insufficient_cutoff_reports_required(capsys):
    """The cochain route names the cutoff it needs."""
    status = main(["ce-check", "--space", "sphere:2", "--group", "sl2", "--max-degree", "3", "--weight-cutoff", "1"])
    report = report_of(capsys)
    if status != 2 or report["kind"] != "InsufficientCutoffError" or report["required"] != 4:
        raise AssertionError(f"unexpected report {report}")


def test_invalid_flag_values(capsys):
    """Values rejected by the job schema exit with status 2 before any work."""
    if main(["compute", "--space", "sphere:2", "--group", "sl2", "--max-degree", "0"]) != 2:
        raise AssertionError("expected exit status 2")
    if "max_degree" not in capsys.readouterr().out:
        raise AssertionError("the error should name the field")
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args(["frobnicate"])
    if info.value.code != 2:
        raise AssertionError("argument errors exit with status 2")


def test_mismatch_exits_with_one(capsys):
    """A disagreement between the two routes is a FAIL verdict."""
    wrong = PoincareSeries.one(("z", "q"), {"z": 4})
    with patch("rephom.api.jobs.homology_series", return_value=wrong):
        status = main(["ce-check", "--space", "sphere:2", "--group", "sl2", "--max-degree", "3"])
    report = report_of(capsys)
    if status != 1 or report["verdict"] != "FAIL" or "mismatch" not in report:
        raise AssertionError(f"unexpected report {report}")


def test_convention_error_exits_with_one(capsys):
    """Convention errors raised by a handler map to status 1."""

    def broken(job, config):
        raise ConventionError("d^2 != 0")

    with patch.dict(HANDLERS, {"catalog": broken}):
        status = run(JobSpec(command="catalog"), config={})
    if status != 1 or report_of(capsys)["kind"] != "ConventionError":
        raise AssertionError("expected a convention error report")


def test_missing_configuration(capsys):
    """An unreadable configuration is an input error."""
    with patch("rephom.api.jobs.get_config", side_effect=InputError("configuration file not found")):
        status = run(JobSpec(command="catalog"))
    if status != 2 or "configuration" not in capsys.readouterr().out:
        raise AssertionError("expected a configuration error")


def test_acceptance_verdict(capsys):
    """A failing acceptance row makes the run exit with status 1."""
    rows = [
        AcceptanceRow(criterion="tori", status="PASS", value="ok", expected="ok", runtime=0.1),
        AcceptanceRow(criterion="drinfeld", status="FAIL", value="bad", expected="ok", runtime=0.2),
    ]
    with patch("rephom.api.jobs.run_acceptance_suite", return_value=rows) as suite:
        status = main(["acceptance", "--only", "tori,drinfeld"])
    report = report_of(capsys)
    if status != 1 or report["failed"] != ["drinfeld"] or report["verdict"] != "FAIL":
        raise AssertionError(f"unexpected report {report}")
    if suite.call_args[0][0] != ["tori", "drinfeld"]:
        raise AssertionError(f"unexpected selection {suite.call_args}")


def test_output_file_in_csv(tmp_path):
    """--output writes the chosen format instead of printing it."""
    path = tmp_path / "catalog.csv"
    if main(["catalog", "--space", "sphere:3", "--format", "csv", "--output", str(path)]) != 0:
        raise AssertionError("expected exit status 0")
    lines = path.read_text().splitlines()
    if lines[0] != "key,value" or "entries[0].name,sphere:3" not in lines:
        raise AssertionError(f"unexpected csv {lines[:5]}")
