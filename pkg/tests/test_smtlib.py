from __future__ import annotations

import pytest

from contractcheck.encoder import (AnalysisInstance, AnalysisKind,
                                   NamedAssertion, build_analyses)
from contractcheck.errors import EncodeError
from contractcheck.smtlib import (emit_smtlib, model_queries, parse_sexprs,
                                  sexpr_int, tokenize_sexpr)
from contractcheck.terms import Const, Var, eq


def test_emission_is_deterministic(bakery_model):
    for instance in build_analyses(bakery_model):
        assert emit_smtlib(instance) == emit_smtlib(instance)


def test_empty_instance_is_header_and_check_sat():
    instance = AnalysisInstance(AnalysisKind.EXECUTABILITY, None, ())
    text = emit_smtlib(instance)
    lines = [l for l in text.splitlines() if l and not l.startswith("(set-option")]
    assert lines == ["(check-sat)"]
    assert model_queries(instance) == []


def test_transfer_instance_contains_conflicting_assertions(bakery_model):
    instance = next(i for i in build_analyses(bakery_model)
                    if i.kind is AnalysisKind.CLAIM_CONSISTENCY
                    and i.target == "TransferClaim")
    text = emit_smtlib(instance)
    assert "(assert (! (= (owner Bakery) Bank) :named owner_Bakery))" in text
    assert ":named claim_TransferClaim" in text
    assert "(= (owner Bakery) Eva)" in text
    assert text.strip().endswith("(check-sat)")
    assert "(declare-fun owner (LegalObject) Person)" in text


def test_soft_assertions_emitted_only_in_native_mode(bakery_model):
    instance = next(i for i in build_analyses(bakery_model)
                    if i.kind is AnalysisKind.EXECUTABILITY)
    native = emit_smtlib(instance, native_soft=True)
    plain = emit_smtlib(instance, native_soft=False)
    assert native.count("(assert-soft ") == 6
    assert "(assert-soft " not in plain


def test_duplicate_assertion_name_rejected():
    a = NamedAssertion("same", eq(Var("x"), Const(1)))
    b = NamedAssertion("same", eq(Var("x"), Const(2)))
    instance = AnalysisInstance(AnalysisKind.EXECUTABILITY, None, (a, b))
    with pytest.raises(EncodeError):
        emit_smtlib(instance)


def test_negative_constants_render_in_smt_syntax():
    a = NamedAssertion("neg", eq(Var("d"), Const(-1)))
    instance = AnalysisInstance(AnalysisKind.EXECUTABILITY, None, (a,))
    assert "(= d (- 1))" in emit_smtlib(instance)


def test_sexpr_tokenizer():
    assert tokenize_sexpr("(a (b -1) |quoted sym|)") == \
        ["(", "a", "(", "b", "-1", ")", "quoted sym", ")"]


def test_parse_model_output_round_trip():
    # a synthetic model printed in solver syntax parses to equal bindings
    text = """
sat
((d_u (- 1))
 (d_z 28)
 ((owner Bakery) Person!val!2)
 (Eva Person!val!0))
"""
    exprs = parse_sexprs(text)
    assert exprs[0] == "sat"
    pairs = exprs[1]
    values = {}
    for key, value in pairs:
        values[tuple(key) if isinstance(key, list) else key] = value
    assert sexpr_int(values["d_u"]) == -1
    assert sexpr_int(values["d_z"]) == 28
    assert values[("owner", "Bakery")] == "Person!val!2"


def test_parse_unbalanced_output_raises():
    from contractcheck.errors import SolverError

    with pytest.raises(SolverError):
        parse_sexprs("(a (b)")


def test_model_queries_cover_all_symbols(bakery_model):
    instance = next(i for i in build_analyses(bakery_model)
                    if i.kind is AnalysisKind.EXECUTABILITY)
    queries = model_queries(instance)
    assert set(instance.int_vars()) <= set(queries)
    assert "(owner Bakery)" in queries
    assert "Eva" in queries
