from __future__ import annotations

import json

import pytest

from contractcheck.blocks import parse_contract
from contractcheck.encoder import (AnalysisInstance, AnalysisKind,
                                   NamedAssertion)
from contractcheck.ontology import build_model, date_var, resolve_window
from contractcheck.orchestrator import (flags_from_core, performed_per_set,
                                        run_all)
from contractcheck.references import resolve_references
from contractcheck.terms import FALSE, ReplayEnv, eval_int
from conftest import fixture_model


@pytest.fixture(scope="module")
def bakery_report(bakery_model, solver_config):
    return run_all(bakery_model, solver_config)


def test_bakery_flag_summary(bakery_report):
    by_kind = {(f.kind, f.targets): f.block_ids for f in bakery_report.flags}
    assert by_kind == {
        ("ClaimConsistency", ("TransferClaim",)): ("Block1", "Block11"),
        ("LimitationCheck", ("Claim2",)): ("Block10", "Block6", "Block9"),
    }


def test_bakery_outcome_statuses(bakery_report):
    statuses = {(o.kind, o.target): o.status for o in bakery_report.outcomes}
    assert statuses[("ContractExecutability", None)] == "pass"
    assert statuses[("ClaimConsistency", "TransferClaim")] == "flag"
    assert statuses[("ClaimConsistency", "PayClaim")] == "pass"
    assert statuses[("ClaimConsistency", "PretzelWarranty")] == "pass"
    assert statuses[("ClaimUnsatisfiable", "TransferClaim")] == "pass"
    assert statuses[("LimitationCheck", "Claim1")] == "pass"
    assert statuses[("LimitationCheck", "Claim2")] == "flag"


def test_bakery_execution_trace(bakery_report):
    trace = bakery_report.outcome(AnalysisKind.EXECUTABILITY).trace
    assert trace is not None
    assert [(e.claim_id, e.day, e.actor) for e in trace.events] == [
        ("PayClaim", 28, "Chris"), ("RestitutionPurchaser", 29, "Eva"),
    ]
    assert [n.claim_id for n in trace.unperformed] == ["TransferClaim"]
    assert [n.claim_id for n in trace.satisfied] == ["PretzelWarranty"]
    assert trace.participants[:2] == ("Eva", "Chris")


def test_limitation_witness_trace(bakery_report):
    outcome = bakery_report.outcome(AnalysisKind.LIMITATION, "Claim2")
    assert outcome.status == "flag"
    trace = outcome.trace
    events = {e.claim_id: e for e in trace.events}
    assert "PretzelWarranty" in events and events["PretzelWarranty"].action == "asserted"
    assert events["Claim2"].action == "compensated"
    assert events["Claim2"].day > 70
    assert events["Claim2"].amount is not None and events["Claim2"].amount >= 1000


def test_repaired_bakery_is_clean(solver_config):
    report = run_all(fixture_model("bakery_repaired"), solver_config)
    assert report.flags == ()
    trace = report.outcome(AnalysisKind.EXECUTABILITY).trace
    assert [n.claim_id for n in trace.unperformed] == []
    performed = {e.claim_id for e in trace.events}
    assert performed == {"TransferClaim", "PayClaim"}
    assert [n.claim_id for n in trace.satisfied] == ["PretzelWarranty"]


def test_empty_model_report(solver_config):
    blocks = parse_contract("[]")
    model = build_model(blocks, resolve_references(blocks), "empty")
    report = run_all(model, solver_config)
    assert sorted(f.code for f in report.findings) == [
        "ESSENTIALIA_OBJECT", "ESSENTIALIA_PRICE", "ESSENTIALIA_PURCHASER",
        "ESSENTIALIA_SELLER"]
    assert [o.kind for o in report.outcomes] == ["ContractExecutability"]
    assert report.outcome(AnalysisKind.EXECUTABILITY).status == "pass"


def test_report_stats_match_recounted_instances(bakery_report, bakery_model):
    from contractcheck.encoder import build_analyses

    instances = {(i.kind.value, i.target): i for i in build_analyses(bakery_model)}
    for outcome in bakery_report.outcomes:
        instance = instances[(outcome.kind, outcome.target)]
        assert outcome.vars == instance.var_count()
        assert outcome.constraints == instance.constraint_count()


def test_batch_outcomes_are_deterministic(bakery_model, solver_config):
    first = run_all(bakery_model, solver_config)
    second = run_all(bakery_model, solver_config)
    outcome_key = [(o.kind, o.target, o.status, o.verdict) for o in first.outcomes]
    assert outcome_key == [(o.kind, o.target, o.status, o.verdict)
                           for o in second.outcomes]
    assert first.flags == second.flags


def test_trace_days_lie_in_windows(bakery_model, solver_config):
    """Every performed claim's day is inside its resolved window, given the
    trigger's breach date; independently re-evaluated on the solver model."""
    report = run_all(bakery_model, solver_config,
                     kinds={AnalysisKind.EXECUTABILITY})
    trace = report.outcome(AnalysisKind.EXECUTABILITY).trace
    days = {e.claim_id: e.day for e in trace.events}
    env_ints = {date_var(c): -1 for c in bakery_model.claims}
    env_ints.update({date_var(cid): day for cid, day in days.items()})
    env_ints["dprime_TransferClaim"] = 28 if days.get("TransferClaim") is None else -1
    env_ints["dprime_PayClaim"] = 28 if days.get("PayClaim") is None else -1
    env_ints["dprime_PretzelWarranty"] = env_ints[date_var("PretzelWarranty")]
    env = ReplayEnv(env_ints)
    for cid, day in days.items():
        window = resolve_window(bakery_model, bakery_model.claims[cid])
        lower = eval_int(window.lower, env)
        assert day > lower if window.lower_strict else day >= lower
        for upper in (window.due_upper, window.lim_upper):
            if upper is not None:
                assert day <= eval_int(upper, env)


def test_exactly_one_performed_per_trigger_set(bakery_model, solver_config):
    report = run_all(bakery_model, solver_config,
                     kinds={AnalysisKind.EXECUTABILITY})
    trace = report.outcome(AnalysisKind.EXECUTABILITY).trace
    # reconstruct the model bindings from the trace
    ints = {date_var(c): -1 for c in bakery_model.claims}
    ints.update({date_var(e.claim_id): e.day for e in trace.events})
    from contractcheck.solver import Model

    counts = performed_per_set(bakery_model, Model(int_bindings=ints))
    assert counts == [1, 1, 1]


def test_flags_from_core_maps_blocks():
    a = NamedAssertion("one", FALSE, ("Block1",))
    b = NamedAssertion("two", FALSE, ("Block11",))
    harness = NamedAssertion("analysis_x", FALSE)
    instance = AnalysisInstance(AnalysisKind.CLAIM_CONSISTENCY, "C",
                                (a, b, harness))
    flag = flags_from_core(instance, ("one", "two", "analysis_x"))
    assert flag.block_ids == ("Block1", "Block11")
    assert "one" in flag.explanation and "analysis_x" in flag.explanation


def test_flags_from_harness_only_core():
    harness = NamedAssertion("analysis_x", FALSE)
    instance = AnalysisInstance(AnalysisKind.CLAIM_CONSISTENCY, "C", (harness,))
    flag = flags_from_core(instance, ("analysis_x",))
    assert flag.block_ids == ("analysis-harness",)


def test_flags_from_empty_core_has_diagnostic():
    instance = AnalysisInstance(AnalysisKind.CLAIM_CONSISTENCY, "C", ())
    flag = flags_from_core(instance, ())
    assert flag.block_ids == ("analysis-harness",)
    assert "empty core" in flag.explanation


def test_flag_deduplication_by_blocks(solver_config):
    """Two instances failing for the same root cause report one flag listing
    both targets."""
    doc = json.dumps([
        {"ID": "B1", "Text": "two conflicting facts",
         "Object": ["a:Person", "b:Person", "o:Shares", "p1:PropertyRight",
                    "p2:PropertyRight", "spa:SPA", "c1:PrimaryClaim",
                    "c2:PrimaryClaim", "price:PurchasePrice"],
         "Assignment": ["a.Name=Ann", "b.Name=Bob", "o.Name=Mill",
                        "price.Name=Price", "spa.Price=$price",
                        "p1.Owner=$a", "p1.Property=$o",
                        "p2.Owner=$b", "p2.Property=$o",
                        "spa.Seller=$a", "spa.Purchaser=$b", "spa.Object=$o",
                        "c1.Name=Give", "c1.DueDate=5", "c1.Debtor=$a",
                        "c1.Creditor=$b", "c1.Performance=$o.transfer($b)",
                        "c2.Name=GiveBack", "c2.DueDate=9", "c2.Debtor=$a",
                        "c2.Creditor=$b", "c2.Performance=$o.transfer($b)"]},
    ])
    blocks = parse_contract(doc)
    model = build_model(blocks, resolve_references(blocks), "dup")
    report = run_all(model, solver_config,
                     kinds={AnalysisKind.CLAIM_CONSISTENCY})
    consistency_flags = [f for f in report.flags if f.kind == "ClaimConsistency"]
    assert len(consistency_flags) == 1
    assert set(consistency_flags[0].targets) == {"Give", "GiveBack"}


def test_unresolvable_claims_are_skipped_not_fatal(solver_config):
    doc = json.dumps([
        {"ID": "B1", "Text": "",
         "Object": ["spa:SPA", "s:Person", "p:Person", "o:Shares",
                    "price:PurchasePrice", "w:WarrantyClaim", "c:PrimaryClaim"],
         "Assignment": ["s.Name=Ann", "p.Name=Bob", "o.Name=Mill",
                        "price.Name=Price",
                        "spa.Seller=$s", "spa.Purchaser=$p", "spa.Object=$o",
                        "spa.Price=$price",
                        "w.Name=W",  # no due date: unresolvable window
                        "c.Name=C", "c.DueDate=5"]},
    ])
    blocks = parse_contract(doc)
    model = build_model(blocks, resolve_references(blocks), "partial")
    report = run_all(model, solver_config)
    assert any(f.code == "NO_DUEDATE" for f in report.findings)
    targets = {o.target for o in report.outcomes}
    assert "C" in targets and "W" not in targets
