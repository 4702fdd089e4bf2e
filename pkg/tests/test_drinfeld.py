"""
Drinfeld trace tests.

This module covers symmetric words and their grammar, the trace map into the
representation complex, independence of products of traces, the map from
Chevalley-Eilenberg chains to forms with its chain-map property, the search
for canonical words, and the freeness check on both the representation and
the relative cochain routes.
"""

import dataclasses

import pytest
from sympy.polys.domains import QQ

from rephom.api.jobs import parse_word
from rephom.core.cyclic import FormComplex
from rephom.core.drinfeld import (
    SymWord,
    canonical_words,
    ce_chain_boundary,
    classes_independent,
    drinfeld_freeness_check,
    is_nonzero_class,
    psi_chain_map_failures,
    quillen_trace,
    sullivan_psi,
    trace_subalgebra_independent,
)
from rephom.core.errors import InputError
from rephom.core.lie import invariant_generators, power_trace_invariant
from rephom.core.rep_complex import build_rep_complex
from rephom.services.catalog import catalog


def test_word_grammar(cp2):
    """Letters are joined by '.', brackets are written [x,y]."""
    word = parse_word("v1 . [v1,v1]", cp2.quillen)
    if len(word) != 2 or word.degree != 3:
        raise AssertionError(f"unexpected word {word}")
    for text in ("v1.", "[v1,v1", "v1;v2", "w"):
        with pytest.raises(InputError):
            parse_word(text, cp2.quillen)


def test_trace_of_killing_form(sphere3, sl2):
    """tr(u . u) is an invariant cycle with a nonzero class."""
    m = sphere3.quillen
    c = build_rep_complex(m, sl2, 5)
    word = SymWord((m.gen("u"), m.gen("u")))
    image = quillen_trace(power_trace_invariant(sl2, 2), m, sl2, word, c.algebra)
    if not image or c.apply(image):
        raise AssertionError("the trace should be a nonzero cycle")
    if not c.invariant_subcomplex().is_invariant(image):
        raise AssertionError("the trace should be ad-invariant")
    if not is_nonzero_class(c, image):
        raise AssertionError("the trace should not be a boundary")


def test_arity_mismatch(sphere3, cp2, sl2):
    """The polynomial degree must match the number of letters or factors."""
    m = sphere3.quillen
    with pytest.raises(InputError):
        quillen_trace(power_trace_invariant(sl2, 2), m, sl2, SymWord((m.gen("u"),)))
    with pytest.raises(InputError):
        sullivan_psi(power_trace_invariant(sl2, 2), sl2, cp2.sullivan, [({0: 1}, {(0,): 1})])


def test_canonical_words(cp2):
    """Words of two letters in degree 4 and weight 3."""
    words = canonical_words(cp2.quillen, 2, 4, 3)
    if [str(w) for w in words] != ["v1 . v2"]:
        raise AssertionError(f"unexpected words {[str(w) for w in words]}")


def test_freeness_on_three_sphere(sphere3, sl2):
    """Invariants of S^3 in sl2 are free on the trace of u . u."""
    report = drinfeld_freeness_check(sphere3, sl2, 8)
    if report.verdict != "PASS" or report.route != "rep":
        raise AssertionError(f"unexpected report {report}")
    if report.generators != [4]:
        raise AssertionError(f"unexpected generators {report.generators}")
    if not report.traces or not all(t.nonzero and t.word for t in report.traces):
        raise AssertionError(f"missing trace generators {report.traces}")


def test_freeness_without_quillen_model(sl2):
    """Spaces with only a Sullivan model use the relative cochain route."""
    report = drinfeld_freeness_check(catalog("kzs:2,3"), sl2, 4)
    if report.route != "ce" or report.verdict != "PASS" or report.traces:
        raise AssertionError(f"unexpected report {report}")


def test_rejections(sphere3, sl2):
    """Degree zero and non-reductive algebras are input errors."""
    with pytest.raises(InputError):
        drinfeld_freeness_check(sphere3, sl2, 0)
    with pytest.raises(InputError):
        drinfeld_freeness_check(sphere3, dataclasses.replace(sl2, reductive=False), 4)


E, H, F = {0: QQ(1)}, {1: QQ(1)}, {2: QQ(1)}


def test_psi_on_current_chains(sl2):
    """Psi sends chains of K(Z, 2) x S^3 to forms, modulo exact forms, and kills constants."""
    A = catalog("kzs:2,3").sullivan
    z, s = A.index("z"), A.index("s")
    forms = FormComplex(A, 5)
    dz, ds = forms.rank + z, forms.rank + s
    P = power_trace_invariant(sl2, 2)
    v = P.evaluate([H, H])
    chain = [(H, {(z, s): 1}), (H, {(z, z, s): 1})]
    if sullivan_psi(P, sl2, A, chain, forms) != forms.reduce_exact({(z, z, z, s, ds): v}):
        raise AssertionError("h(x)sz ^ h(x)sz^2 should go to P(h, h) z^3 s ds")
    chain = [(H, {(z, z): 1}), (H, {(z, s): 1})]
    image = sullivan_psi(P, sl2, A, chain, forms)
    if not image or image != forms.reduce_exact({(z, z, s, dz): 2 * v}):
        raise AssertionError(f"h(x)z^2 ^ h(x)sz should go to 2 P(h, h) z^2 s dz, got {image}")
    if sullivan_psi(P, sl2, A, [(H, {(): 1}), (H, {(): 1})], forms):
        raise AssertionError("constants have no differential, so their image vanishes")
    if sullivan_psi(P, sl2, A, chain) != image:
        raise AssertionError("a forms complex is built when none is given")


def test_ce_boundary_terms(sl2):
    """The bracket part merges two factors, the internal part applies d_A."""
    kzs = catalog("kzs:2,3").sullivan
    z = kzs.index("z")
    terms = ce_chain_boundary(sl2, kzs, [(E, {(z,): 1}), (F, {(z,): 1})])
    if len(terms) != 1:
        raise AssertionError(f"unexpected terms {terms}")
    coeff, chain = terms[0]
    if coeff != 1 or chain[0][0] != sl2.bracket(E, F) or chain[0][1] != {(z, z): 1}:
        raise AssertionError(f"unexpected bracket term {terms[0]}")
    A = catalog("cp:1").sullivan
    z, s = A.index("z"), A.index("s")
    terms = ce_chain_boundary(sl2, A, [(H, {(s,): 1})])
    if terms != [(-1, [(H, {(z, z): 1})])]:
        raise AssertionError(f"d(h(x)s) should be -h(x)z^2, got {terms}")


@pytest.mark.parametrize("space", ["kzs:2,3", "cp:1"])
def test_psi_is_a_chain_map(space, sl2):
    """Psi(d c) + del Psi(c) is exact on every basis chain up to weight 4."""
    failures = psi_chain_map_failures(power_trace_invariant(sl2, 2), sl2, catalog(space).sullivan, 4)
    if failures:
        raise AssertionError(f"{space}: {failures[:3]}")


def test_classes_independent(sphere3, sl2):
    """Powers of the trace of u . u are independent, a class and its double are not."""
    m = sphere3.quillen
    c = build_rep_complex(m, sl2, 8)
    t = quillen_trace(power_trace_invariant(sl2, 2), m, sl2, SymWord((m.gen("u"), m.gen("u"))), c.algebra)
    if not classes_independent(c, [t]) or not classes_independent(c, []):
        raise AssertionError("a nonzero class is independent")
    if classes_independent(c, [t, {mono: 2 * coeff for mono, coeff in t.items()}]):
        raise AssertionError("a class and its double are dependent")
    with pytest.raises(InputError):
        classes_independent(c, [t, c.algebra.multiply_poly(t, t)])


def test_trace_products_on_three_sphere(sphere3, sl3):
    """For sl3 the traces of u^2 and u^3 generate a free algebra through degree 12."""
    if len(invariant_generators(sl3)) != 2:
        raise AssertionError("sl3 has two invariant generators")
    if not trace_subalgebra_independent(sphere3.quillen, sl3, "u", 12):
        raise AssertionError("t4^3 and t6^2 should be independent in degree 12")
