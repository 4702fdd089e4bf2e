"""
Jobs API Module

This module turns a command-line request into a report. A request is a
``JobSpec``; each command has one handler that computes a report body, and
``run`` wraps the handlers with the exit-code contract:

- 0: the computation succeeded and every verdict is PASS
- 1: a mathematical mismatch (a FAIL verdict or a convention error)
- 2: an input error (unknown space or group, malformed file, insufficient cutoff)

Reports are written through the report service, so every report carries the
schema version and the conventions fingerprint.
"""

import logging
import re
from typing import Any, Callable, Dict, List, Optional, Tuple

from pydantic import BaseModel, ValidationError, validator

from rephom.core.ce_current import build_ce, ce_series
from rephom.core.cyclic import hodge_cyclic, loop_hodge_classes, loop_hodge_dims
from rephom.core.drinfeld import SymWord, drinfeld_freeness_check, is_nonzero_class, quillen_trace
from rephom.core.errors import (
    ConventionError,
    InputError,
    InsufficientCutoffError,
    MismatchError,
    ModelValidationError,
    SchemaError,
)
from rephom.core.lie import LieAlgebraData, invariant_generators, power_trace_invariant
from rephom.core.macdonald import root_system, verify_euler_chain, verify_q_identity, verify_qt_identity
from rephom.core.models import LieExpr, QuillenModel, validate
from rephom.core.rep_complex import build_rep_complex, euler_series, homology_series, invariant_homology_series
from rephom.services.acceptance import run_acceptance_suite
from rephom.services.catalog import CATALOG_NAMES, CatalogEntry, catalog, catalog_entries
from rephom.services.model_io import model_to_dict, parse_model, resolve_lie_algebra
from rephom.services.reports import FORMATS, build_report, series_dims, write_report
from rephom.utils.config import get_config

logger = logging.getLogger(__name__)

COMMANDS = (
    "compute",
    "invariants",
    "ce-check",
    "hodge",
    "trace",
    "drinfeld-check",
    "macdonald",
    "series",
    "catalog",
    "validate",
    "acceptance",
)

Body = Dict[str, Any]
Outcome = Tuple[Body, int]


class JobSpec(BaseModel):
    """
    One command-line request.

    Attributes:
        command (str): one of ``COMMANDS``
        space (Optional[str]): space string or model-file path
        group (Optional[str]): built-in Lie algebra name or algebra-file path
        model (Optional[str]): model-file path (``validate``)
        max_degree (Optional[int]): highest homological degree; config default when None
        weight_cutoff (Optional[int]): weight truncation of the cochain and forms routes
        m (Optional[int]): Hodge piece
        type (Optional[str]): root system type (``macdonald``)
        r (Optional[int]): truncation height (``macdonald``, ``series``)
        nq (Optional[int]): q-order of the (q, t) identity
        nt (Optional[int]): t-order of the (q, t) identity
        word (Optional[str]): symmetric word such as ``u.u`` or ``v1.[v1,v1]`` (``trace``)
        poly_degree (Optional[int]): degree of the invariant polynomial (``trace``)
        only (List[str]): acceptance criteria to run
        output (Optional[str]): report path; the report goes to stdout when None
        format (str): ``json``, ``csv`` or ``text``
    """

    command: str
    space: Optional[str] = None
    group: Optional[str] = None
    model: Optional[str] = None
    max_degree: Optional[int] = None
    weight_cutoff: Optional[int] = None
    m: Optional[int] = None
    type: Optional[str] = None
    r: Optional[int] = None
    nq: Optional[int] = None
    nt: Optional[int] = None
    word: Optional[str] = None
    poly_degree: Optional[int] = None
    only: List[str] = []
    output: Optional[str] = None
    format: str = "json"

    @validator("command")
    def _known_command(cls, value: str) -> str:
        if value not in COMMANDS:
            raise ValueError(f"unknown command {value!r}")
        return value

    @validator("format")
    def _known_format(cls, value: str) -> str:
        if value not in FORMATS:
            raise ValueError(f"unknown format {value!r}")
        return value

    @validator("max_degree")
    def _positive_degree(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 1:
            raise ValueError("max_degree must be at least 1")
        return value

    @validator("weight_cutoff", "m", "r", "nq", "nt", "poly_degree")
    def _nonnegative(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 0:
            raise ValueError("must be nonnegative")
        return value


def job_from_dict(data: Dict[str, Any]) -> JobSpec:
    """
    Validate a raw request.

    Raises:
        SchemaError: with the location of the first invalid field
    """
    try:
        return JobSpec.parse_obj(data)
    except ValidationError as exc:
        error = exc.errors()[0]
        pointer = "/" + "/".join(str(part) for part in error["loc"])
        raise SchemaError(error["msg"], pointer) from exc


def _require(job: JobSpec, *fields: str) -> None:
    missing = [name for name in fields if getattr(job, name) is None]
    if missing:
        flags = ", ".join("--" + name.replace("_", "-") for name in missing)
        raise InputError(f"{job.command} needs {flags}")


def _max_degree(job: JobSpec, config: Dict[str, Any]) -> int:
    return job.max_degree or int(config.get("defaults", {}).get("max_degree", 12))


def _space_and_group(job: JobSpec) -> Tuple[CatalogEntry, LieAlgebraData]:
    _require(job, "space", "group")
    return catalog(job.space), resolve_lie_algebra(job.group)


def _verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def _exit(verdict: str) -> int:
    return 0 if verdict == "PASS" else 1


def _homology_body(entry: CatalogEntry, g: LieAlgebraData, job: JobSpec, top: int, route: str) -> Tuple[Body, Any]:
    """Report fields shared by the representation-complex and cochain routes."""
    body: Body = {"space": entry.name, "group": g.name, "max_degree": top, "route": route}
    if route == "rep":
        c = build_rep_complex(entry.require_quillen(), g, top)
        full = homology_series(c, top)
        invariant = invariant_homology_series(c, g, top) if g.reductive else None
    else:
        A = entry.require_sullivan()
        full = ce_series(build_ce(g, A, job.weight_cutoff, degree_window=top), top)
        invariant = None
        if g.reductive:
            invariant = ce_series(build_ce(g, A, job.weight_cutoff, degree_window=top, relative=True), top)
    body["series"] = str(full.forget_weights())
    body["weighted_series"] = str(full)
    body["betti"] = series_dims(full)
    if invariant is not None:
        body["invariant_series"] = str(invariant.forget_weights())
        body["weighted_invariant_series"] = str(invariant)
        body["invariant_betti"] = series_dims(invariant)
    return body, full


def handle_compute(job: JobSpec, config: Dict[str, Any]) -> Outcome:
    entry, g = _space_and_group(job)
    top = _max_degree(job, config)
    body, _ = _homology_body(entry, g, job, top, "rep" if entry.quillen is not None else "ce")
    if entry.validity_bound is not None and top > entry.validity_bound:
        body["note"] = f"degrees above {entry.validity_bound} are outside the validity of the truncated model"
    return body, 0


def handle_invariants(job: JobSpec, config: Dict[str, Any]) -> Outcome:
    entry, g = _space_and_group(job)
    if not g.reductive:
        raise InputError(f"{g.name} is not reductive")
    top = _max_degree(job, config)
    if entry.quillen is not None:
        series = invariant_homology_series(build_rep_complex(entry.quillen, g, top), g, top)
        route = "rep"
    else:
        c = build_ce(g, entry.require_sullivan(), job.weight_cutoff, degree_window=top, relative=True)
        series, route = ce_series(c, top), "ce"
    body = {
        "space": entry.name,
        "group": g.name,
        "route": route,
        "exponents": list(g.exponents),
        "invariant_series": str(series.forget_weights()),
        "weighted_invariant_series": str(series),
        "invariant_betti": series_dims(series),
    }
    return body, 0


def handle_ce_check(job: JobSpec, config: Dict[str, Any]) -> Outcome:
    entry, g = _space_and_group(job)
    top = _max_degree(job, config)
    body, ce = _homology_body(entry, g, job, top, "ce")
    if entry.quillen is None:
        body["verdict"] = "PASS"
        body["note"] = "no Quillen model; nothing to compare against"
        return body, 0
    rep = homology_series(build_rep_complex(entry.quillen, g, top), top)
    mismatch = ce.first_mismatch(rep)
    body["rep_series"] = str(rep)
    body["verdict"] = _verdict(mismatch is None)
    if mismatch is not None:
        exps, a, b = mismatch
        body["mismatch"] = f"{ce.monomial_string(exps) or '1'}: ce {a}, rep {b}"
    return body, _exit(body["verdict"])


def handle_hodge(job: JobSpec, config: Dict[str, Any]) -> Outcome:
    _require(job, "space")
    entry = catalog(job.space)
    A = entry.require_sullivan()
    m = job.m if job.m is not None else int(config.get("defaults", {}).get("hodge_m", 1))
    top = _max_degree(job, config)
    body: Body = {"model": entry.name, "m": m, "max_degree": top}
    body["hodge_dims"] = loop_hodge_dims(A, m, top)
    body["loop_classes"] = [
        {"degree": cls.degree, "weight": list(cls.weight), "class": cls.representative}
        for cls in loop_hodge_classes(A, m, top)
    ]
    if job.weight_cutoff is not None:
        piece = hodge_cyclic(A, m, job.weight_cutoff)
        body["cyclic"] = [
            {
                "degree": n,
                "weight": list(w),
                "dim": h,
                "classes": [piece.format_class(p) for p in piece.classes.get((n, w), [])],
            }
            for (n, w), h in piece.dims.items()
        ]
    return body, 0


_LABEL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def parse_word(text: str, m: QuillenModel) -> SymWord:
    """
    Parse a symmetric word: letters joined by ``.``, each a generator label or
    a bracket ``[x,y]`` of letters.

    Raises:
        InputError: for malformed words or unknown generators
    """
    source = text.replace(" ", "")
    position = 0

    def letter() -> LieExpr:
        nonlocal position
        if source.startswith("[", position):
            position += 1
            left = letter()
            if not source.startswith(",", position):
                raise InputError(f"expected ',' at position {position} of {text!r}")
            position += 1
            right = letter()
            if not source.startswith("]", position):
                raise InputError(f"expected ']' at position {position} of {text!r}")
            position += 1
            return left.bracket(right)
        match = _LABEL_RE.match(source, position)
        if not match:
            raise InputError(f"expected a generator at position {position} of {text!r}")
        position = match.end()
        return m.gen(match.group())

    factors = [letter()]
    while position < len(source):
        if source[position] != ".":
            raise InputError(f"unexpected {source[position]!r} at position {position} of {text!r}")
        position += 1
        factors.append(letter())
    return SymWord(tuple(factors))


def _polynomial(g: LieAlgebraData, degree: int):
    for P in invariant_generators(g) if g.invariant_spec else []:
        if P.degree == degree:
            return P
    return power_trace_invariant(g, degree)


def handle_trace(job: JobSpec, config: Dict[str, Any]) -> Outcome:
    _require(job, "word")
    entry, g = _space_and_group(job)
    m = entry.require_quillen()
    word = parse_word(job.word, m)
    P = _polynomial(g, job.poly_degree or len(word))
    c = build_rep_complex(m, g, max(word.degree + 1, 1))
    image = quillen_trace(P, m, g, word, c.algebra)
    body: Body = {
        "space": entry.name,
        "group": g.name,
        "word": str(word),
        "polynomial": P.name,
        "degree": word.degree,
        "image": c.algebra.format_poly(image) if image else "0",
        "cycle": not c.apply(image),
        "invariant": c.invariant_subcomplex().is_invariant(image) if g.reductive else None,
        "nonzero_class": is_nonzero_class(c, image),
    }
    return body, 0


def handle_drinfeld(job: JobSpec, config: Dict[str, Any]) -> Outcome:
    entry, g = _space_and_group(job)
    entry.require_sullivan()
    report = drinfeld_freeness_check(entry, g, _max_degree(job, config))
    return report.dict(), _exit(report.verdict)


def handle_macdonald(job: JobSpec, config: Dict[str, Any]) -> Outcome:
    _require(job, "type")
    rs = root_system(job.type)
    if job.r is not None and job.nq is None and job.nt is None:
        report = verify_q_identity(rs, job.r)
    else:
        defaults = config.get("macdonald", {})
        nq = job.nq if job.nq is not None else int(defaults.get("nq", 5))
        nt = job.nt if job.nt is not None else int(defaults.get("nt", 5))
        report = verify_qt_identity(rs, nq, nt)
    body = report.dict()
    body["weyl_order"] = rs.weyl_order
    body["exponents"] = list(rs.exponents)
    return body, _exit(report.verdict)


def handle_series(job: JobSpec, config: Dict[str, Any]) -> Outcome:
    entry, g = _space_and_group(job)
    m = entry.require_quillen()
    if not m.weighted:
        raise InputError(f"{entry.name} has no weight grading")
    top = _max_degree(job, config)
    c = build_rep_complex(m, g, top)
    body: Body = {
        "space": entry.name,
        "group": g.name,
        "max_degree": top,
        "euler_series": str(euler_series(c)),
    }
    if g.reductive:
        body["invariant_euler_series"] = str(euler_series(c, invariant=True))
    if entry.projective is not None and g.root_system_id:
        d, r = entry.projective
        chain = verify_euler_chain(m, g, r, d)
        body["euler_chain"] = chain.dict()
        return body, _exit(chain.verdict)
    return body, 0


def _describe(entry: CatalogEntry) -> Body:
    return {
        "name": entry.name,
        "connectivity": entry.connectivity,
        "reduced_homology": entry.reduced_homology,
        "validity_bound": entry.validity_bound,
        "quillen": model_to_dict(entry.quillen) if entry.quillen is not None else None,
        "sullivan": model_to_dict(entry.sullivan) if entry.sullivan is not None else None,
    }


def handle_catalog(job: JobSpec, config: Dict[str, Any]) -> Outcome:
    if job.space:
        return {"entries": [_describe(catalog(job.space))]}, 0
    return {"entries": [_describe(entry) for entry in catalog_entries(CATALOG_NAMES)]}, 0


def handle_validate(job: JobSpec, config: Dict[str, Any]) -> Outcome:
    _require(job, "model")
    report = validate(parse_model(job.model, check=False))
    if not report.ok:
        raise ModelValidationError(f"model {report.model} failed validation", report.residues)
    return report.dict(), 0


def handle_acceptance(job: JobSpec, config: Dict[str, Any]) -> Outcome:
    budgets = config.get("acceptance", {}).get("budgets", {})
    rows = run_acceptance_suite(job.only or None, budgets)
    failed = [row.criterion for row in rows if row.status != "PASS"]
    body = {
        "rows": [row.dict() for row in rows],
        "failed": failed,
        "verdict": _verdict(not failed),
    }
    return body, _exit(body["verdict"])


HANDLERS: Dict[str, Callable[[JobSpec, Dict[str, Any]], Outcome]] = {
    "compute": handle_compute,
    "invariants": handle_invariants,
    "ce-check": handle_ce_check,
    "hodge": handle_hodge,
    "trace": handle_trace,
    "drinfeld-check": handle_drinfeld,
    "macdonald": handle_macdonald,
    "series": handle_series,
    "catalog": handle_catalog,
    "validate": handle_validate,
    "acceptance": handle_acceptance,
}


def _error_body(exc: Exception) -> Body:
    body: Body = {"error": str(exc), "kind": type(exc).__name__}
    if isinstance(exc, InsufficientCutoffError):
        body["required"] = exc.required
    if isinstance(exc, ModelValidationError):
        body["residues"] = exc.residues
    if isinstance(exc, SchemaError):
        body["pointer"] = exc.pointer
    return body


def run(job: JobSpec, config: Optional[Dict[str, Any]] = None) -> int:
    """
    Execute a job and write its report.

    Args:
        job (JobSpec): the request
        config (Optional[Dict[str, Any]]): YAML defaults; read from the configured path when None

    Returns:
        int: 0 on success, 1 on a mathematical mismatch, 2 on an input error
    """
    try:
        config = config if config is not None else get_config()
    except InputError as exc:
        logger.error("configuration error: %s", exc)
        print(f"error: {exc}")
        return 2
    conventions = config.get("conventions", {})
    try:
        body, status = HANDLERS[job.command](job, config)
    except InputError as exc:
        logger.error("%s: input error: %s", job.command, exc)
        body, status = _error_body(exc), 2
    except (ConventionError, MismatchError) as exc:
        logger.error("%s: mathematical error: %s", job.command, exc)
        body, status = _error_body(exc), 1
    payload = build_report(job.command, body, conventions)
    text = write_report(payload, job.output, job.format)
    if job.output is None:
        print(text, end="")
    logger.info("%s finished with exit status %d", job.command, status)
    return status
