from __future__ import annotations

import json

from contractcheck.blocks import parse_contract
from contractcheck.encoder import (AnalysisKind, Expectation, breach_term,
                                   build_analyses, consistency_instances,
                                   dprime_definitions, encode_claim,
                                   encode_owner, encode_secondary, encode_soft,
                                   encode_spa, performed_term,
                                   trigger_disjunctions)
from contractcheck.ontology import build_model
from contractcheck.references import resolve_references
from contractcheck.terms import OwnerEq, ReplayEnv, eval_bool, int_vars
from conftest import fixture_model


def model_of(doc: str):
    blocks = parse_contract(doc)
    return build_model(blocks, resolve_references(blocks))


def bakery_env(count=10000, owner_of_bakery="Bank", **dates) -> ReplayEnv:
    """Replay environment over the bakery's symbols.

    Every date defaults to -1 (nothing performed); the warranted pretzel
    output defaults to the warranted amount.
    """
    ints = {
        "d_TransferClaim": -1, "d_PayClaim": -1, "d_RestitutionPurchaser": -1,
        "d_RestitutionSeller": -1, "d_PretzelWarranty": -1, "d_Claim1": -1,
        "d_Claim2": -1, "Block6_count": count, "l_Claim2": 0,
    }
    for key, value in dates.items():
        ints[key] = value
    # breach dates follow their definitions
    ints.setdefault("dprime_TransferClaim",
                    -1 if ints["d_TransferClaim"] >= 0 else 28)
    ints.setdefault("dprime_PayClaim", -1 if ints["d_PayClaim"] >= 0 else 28)
    ints.setdefault("dprime_PretzelWarranty", ints["d_PretzelWarranty"])
    persons = {"Eva": "p0", "Chris": "p1", "Bank": "p2"}
    return ReplayEnv(ints, owner_raw={"Bakery": persons[owner_of_bakery],
                                      "Price": "p1"},
                     person_values=persons,
                     object_values={"Bakery": "o0", "Price": "o1"})


# -- ownership facts -----------------------------------------------------------

def test_encode_owner_bakery(bakery_model):
    assertions = encode_owner(bakery_model)
    assert [(a.name, a.term, a.origin_blocks) for a in assertions] == [
        ("owner_Bakery", OwnerEq("Bakery", "Bank"), ("Block11",)),
    ]


def test_encode_owner_empty():
    model = model_of("[]")
    assert encode_owner(model) == []


def test_encode_owner_two_rights_on_one_object():
    doc = json.dumps([
        {"ID": "B1", "Text": "",
         "Object": ["a:Person", "b:Person", "o:Shares", "p1:PropertyRight",
                    "p2:PropertyRight"],
         "Assignment": ["a.Name=Ann", "b.Name=Bob", "o.Name=Mill",
                        "p1.Owner=$a", "p1.Property=$o",
                        "p2.Owner=$b", "p2.Property=$o"]},
    ])
    model = model_of(doc)
    assertions = encode_owner(model)
    assert len(assertions) == 2  # both stated; the conflict surfaces as unsat
    # oracle: no single-valued owner function satisfies both
    env_a = ReplayEnv({}, owner_raw={"Mill": "pa"},
                      person_values={"Ann": "pa", "Bob": "pb"})
    assert eval_bool(assertions[0].term, env_a)
    assert not eval_bool(assertions[1].term, env_a)


# -- claim formulas, replayed against the formalization -----------------------

def test_transfer_claim_formula(bakery_model):
    """Unperformed, or performed from day 28 with the seller owning the
    shares."""
    term = encode_claim(bakery_model, bakery_model.claims["TransferClaim"])
    assert eval_bool(term, bakery_env())  # d = -1
    assert eval_bool(term, bakery_env(owner_of_bakery="Eva", d_TransferClaim=28))
    assert eval_bool(term, bakery_env(owner_of_bakery="Eva", d_TransferClaim=99))
    assert not eval_bool(term, bakery_env(owner_of_bakery="Eva", d_TransferClaim=27))
    assert not eval_bool(term, bakery_env(owner_of_bakery="Bank", d_TransferClaim=28))


def test_pretzel_warranty_formula(bakery_model):
    """Met with the warranted output, or asserted within [28, 42]."""
    term = encode_claim(bakery_model, bakery_model.claims["PretzelWarranty"])
    assert eval_bool(term, bakery_env(count=10000))            # met
    assert not eval_bool(term, bakery_env(count=9999))         # met but false
    assert eval_bool(term, bakery_env(d_PretzelWarranty=28))   # asserted
    assert eval_bool(term, bakery_env(d_PretzelWarranty=42, count=0))
    assert not eval_bool(term, bakery_env(d_PretzelWarranty=43, count=0))
    assert not eval_bool(term, bakery_env(d_PretzelWarranty=27, count=0))


def test_trivial_claim_formula():
    doc = json.dumps([{
        "ID": "B1", "Text": "", "Object": ["c:PrimaryClaim"],
        "Assignment": ["c.Name=C", "c.DueDate=0"],
    }])
    model = model_of(doc)
    term = encode_claim(model, model.claims["C"])
    assert eval_bool(term, ReplayEnv({"d_C": -1}))
    assert eval_bool(term, ReplayEnv({"d_C": 0}))
    assert eval_bool(term, ReplayEnv({"d_C": 1000}))
    assert not eval_bool(term, ReplayEnv({"d_C": -2}))


def test_claim1_formula(bakery_model):
    """Unperformed, or inside (d', d'+28] with the warranted output met and
    before the absolute limitation."""
    term = encode_secondary(bakery_model, bakery_model.claims["Claim1"])
    base = dict(d_PretzelWarranty=30, dprime_PretzelWarranty=30, count=10000)
    assert eval_bool(term, bakery_env(**base))  # d_Claim1 = -1
    assert eval_bool(term, bakery_env(d_Claim1=31, **base))
    assert eval_bool(term, bakery_env(d_Claim1=58, **base))
    assert not eval_bool(term, bakery_env(d_Claim1=30, **base))   # not after d'
    assert not eval_bool(term, bakery_env(d_Claim1=59, **base))   # beyond +28
    assert not eval_bool(term, bakery_env(d_Claim1=31, d_PretzelWarranty=30,
                                          dprime_PretzelWarranty=30, count=9999))
    # limitation 70 caps the window even for a late assertion
    late = dict(d_PretzelWarranty=42, dprime_PretzelWarranty=42, count=10000)
    assert not eval_bool(term, bakery_env(d_Claim1=71, **late))
    assert eval_bool(term, bakery_env(d_Claim1=70, **late))


def test_claim2_compensation_formula(bakery_model):
    """Damage clamp per the formalization, plus the payment threshold."""
    term = encode_secondary(bakery_model, bakery_model.claims["Claim2"])
    breached = dict(d_PretzelWarranty=30, dprime_PretzelWarranty=30)
    # unperformed with zero damage
    assert eval_bool(term, bakery_env(count=10000, l_Claim2=0, **breached))
    # 9900 pretzels -> damage (10000-9900)/100*1000 = 1000, payable
    assert eval_bool(term, bakery_env(count=9900, d_Claim2=31, l_Claim2=1000,
                                      **breached))
    # clamp forces the paid amount to equal the damage
    assert not eval_bool(term, bakery_env(count=9900, d_Claim2=31, l_Claim2=500,
                                          **breached))
    # below the minimum the clamp yields 0, so a performed payment cannot
    # reach the threshold
    assert not eval_bool(term, bakery_env(count=9950, d_Claim2=31, l_Claim2=0,
                                          **breached))
    # unperformed requires zero damage
    assert not eval_bool(term, bakery_env(count=9900, l_Claim2=1000, **breached))


def test_min_zero_clamp_is_identity():
    doc = json.dumps([{
        "ID": "B1", "Text": "",
        "Object": ["c:PrimaryClaim", "s:CompensationClaim", "x:Integer"],
        "Assignment": ["c.Name=C", "c.DueDate=5",
                       "s.Name=S", "s.Trigger=$c", "s.DueDate=+5",
                       "s.Min=0", "s.Compensation=B1_x"],
    }])
    model = model_of(doc)
    term = encode_secondary(model, model.claims["S"])
    env = ReplayEnv({"d_S": 6, "dprime_C": 5, "B1_x": 123, "l_S": 123})
    assert eval_bool(term, env)
    env_wrong = ReplayEnv({"d_S": 6, "dprime_C": 5, "B1_x": 123, "l_S": 0})
    assert not eval_bool(term, env_wrong)


def test_limitation_before_due_makes_performance_impossible():
    """Absolute limitation below the due date: the performed branch is false
    for every day around the due date."""
    doc = json.dumps([{
        "ID": "B1", "Text": "", "Object": ["c:PrimaryClaim"],
        "Assignment": ["c.Name=C", "c.DueDate=10", "c.Limitation=8"],
    }])
    model = model_of(doc)
    term = encode_claim(model, model.claims["C"])
    for day in (9, 10, 11):
        assert not eval_bool(term, ReplayEnv({"d_C": day}))
    assert eval_bool(term, ReplayEnv({"d_C": -1}))


# -- breach dates --------------------------------------------------------------

def test_dprime_definitions(bakery_model):
    defs = {a.name: a for a in dprime_definitions(
        bakery_model, {"TransferClaim", "PretzelWarranty"})}
    assert set(defs) == {"dprimedef_TransferClaim", "dprimedef_PretzelWarranty"}
    # breached primary: d' is its due date; performed: -1
    term = defs["dprimedef_TransferClaim"].term
    assert eval_bool(term, bakery_env(dprime_TransferClaim=28))
    assert eval_bool(term, bakery_env(d_TransferClaim=30, dprime_TransferClaim=-1))
    assert not eval_bool(term, bakery_env(d_TransferClaim=30, dprime_TransferClaim=28))
    # warranty: d' equals the assertion date
    term = defs["dprimedef_PretzelWarranty"].term
    assert eval_bool(term, bakery_env(d_PretzelWarranty=31,
                                      dprime_PretzelWarranty=31, count=0))
    assert not eval_bool(term, bakery_env(d_PretzelWarranty=31,
                                          dprime_PretzelWarranty=-1, count=0))


# -- contract-level structure ---------------------------------------------------

def test_encode_spa_structure(bakery_model):
    assertions = encode_spa(bakery_model)
    by_prefix = {}
    for a in assertions:
        by_prefix.setdefault(a.name.split("_")[0], []).append(a.name)
    # counted by hand: 1 ownership fact, 7 claims, 3 trigger sets,
    # 3 breach-date definitions (one per claim with consequences)
    assert len(by_prefix["owner"]) == 1
    assert len(by_prefix["claim"]) == 7
    assert len(by_prefix["triggerset"]) == 3
    assert len(by_prefix["dprimedef"]) == 3


def test_warranty_set_disjunction(bakery_model):
    disjunctions = {a.name: a for a in trigger_disjunctions(bakery_model)}
    term = disjunctions["triggerset_PretzelWarranty"].term
    # met counts as performed for a warranty
    assert eval_bool(term, bakery_env())
    assert eval_bool(term, bakery_env(d_PretzelWarranty=30, d_Claim1=31))
    assert eval_bool(term, bakery_env(d_PretzelWarranty=30, d_Claim2=31))
    assert not eval_bool(term, bakery_env(d_PretzelWarranty=30))


def test_encode_soft_bakery(bakery_model):
    softs = encode_soft(bakery_model)
    assert all(a.soft and a.weight == 1 for a in softs)
    assert [a.name for a in softs] == [
        "soft_TransferClaim", "soft_PayClaim", "soft_RestitutionPurchaser",
        "soft_RestitutionSeller", "soft_PretzelWarranty", "soft_Claim1",
    ]
    # evaluate the published optimal execution against the soft assertions:
    # only the transfer preference and the purchaser's withdrawal are violated
    env = bakery_env(d_PayClaim=28, d_RestitutionPurchaser=29)
    violated = [a.name for a in softs if not eval_bool(a.term, env)]
    assert violated == ["soft_TransferClaim", "soft_RestitutionPurchaser"]


def test_encode_soft_empty():
    assert encode_soft(model_of("[]")) == []


# -- analysis assembly ----------------------------------------------------------

def test_bakery_analysis_enumeration(bakery_model):
    instances = build_analyses(bakery_model)
    summary = [(i.kind, i.target) for i in instances]
    assert summary == [
        (AnalysisKind.EXECUTABILITY, None),
        (AnalysisKind.CLAIM_CONSISTENCY, "TransferClaim"),
        (AnalysisKind.CLAIM_CONSISTENCY, "PayClaim"),
        (AnalysisKind.CLAIM_CONSISTENCY, "PretzelWarranty"),
        (AnalysisKind.CLAIM_CONSISTENCY, "Claim1"),
        (AnalysisKind.CLAIM_CONSISTENCY, "Claim2"),
        (AnalysisKind.CLAIM_UNSATISFIABLE, "TransferClaim"),
        (AnalysisKind.CLAIM_UNSATISFIABLE, "PayClaim"),
        (AnalysisKind.CLAIM_UNSATISFIABLE, "PretzelWarranty"),
        (AnalysisKind.LIMITATION, "Claim1"),
        (AnalysisKind.LIMITATION, "Claim2"),
    ]


def test_expectations_fixed_by_kind(bakery_model):
    for instance in build_analyses(bakery_model):
        expected = (Expectation.UNSAT_IS_GOOD
                    if instance.kind in (AnalysisKind.CLAIM_DEFENSE,
                                         AnalysisKind.LIMITATION)
                    else Expectation.SAT_IS_GOOD)
        assert instance.expectation is expected


def test_precede_variant_creates_defense_instance():
    model = fixture_model("bakery_precede_variant")
    defense = [i for i in build_analyses(model)
               if i.kind is AnalysisKind.CLAIM_DEFENSE]
    assert [(i.kind, i.target) for i in defense] == \
        [(AnalysisKind.CLAIM_DEFENSE, "TransferClaim")]


def test_empty_model_has_only_executability():
    instances = build_analyses(model_of("[]"))
    assert [(i.kind, i.target) for i in instances] == \
        [(AnalysisKind.EXECUTABILITY, None)]


def test_every_variable_declared_once(bakery_model):
    for instance in build_analyses(bakery_model):
        names = instance.int_vars()
        assert len(names) == len(set(names))
        for assertion in instance.assertions:
            assert int_vars(assertion.term) <= set(names)


def test_paper_symbols_have_unique_carriers(bakery_model):
    """Every symbol of the formalization maps to exactly one variable."""
    instance = [i for i in build_analyses(bakery_model)
                if i.kind is AnalysisKind.EXECUTABILITY][0]
    names = set(instance.int_vars())
    assert {"d_TransferClaim", "d_PayClaim", "d_PretzelWarranty", "d_Claim1",
            "d_Claim2", "d_RestitutionPurchaser", "d_RestitutionSeller",
            "dprime_PretzelWarranty", "l_Claim2", "Block6_count"} <= names


def test_consistency_breach_terms(bakery_model):
    """Breach of a warranty is an assertion; of a primary claim, inaction."""
    warranty = bakery_model.claims["PretzelWarranty"]
    transfer = bakery_model.claims["TransferClaim"]
    assert eval_bool(breach_term(warranty), bakery_env(d_PretzelWarranty=30, count=0))
    assert not eval_bool(breach_term(warranty), bakery_env())
    assert eval_bool(breach_term(transfer), bakery_env())
    assert not eval_bool(breach_term(transfer), bakery_env(d_TransferClaim=28))
    assert eval_bool(performed_term(warranty), bakery_env())


def test_consistency_instances_force_trigger_breach(bakery_model):
    instances = {i.target: i for i in consistency_instances(bakery_model)}
    claim1 = instances["Claim1"]
    names = [a.name for a in claim1.assertions]
    assert "analysis_trigger_breached" in names
    assert "claim_PretzelWarranty" in names
    assert "claim_Claim1" in names
    assert "dprimedef_PretzelWarranty" in names
