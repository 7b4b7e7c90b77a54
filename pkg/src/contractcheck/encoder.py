"""Compilation of the contract model into constraint systems.

Every claim ``c`` gets an integer performance date ``d_c``; the value ``-1``
means the claim was not performed, any other value is the day it was.  For a
warranty ``w``, ``d_w = -1`` means the warranted condition is met and a
non-negative value is the day the breach was asserted.

The building blocks:

* ownership facts — ``owner(object) = person`` per stated property right,
* one formula per claim constraining its date to the resolved window and its
  performance precondition,
* for each claim with consequences, a breach date ``d'`` that is ``-1``
  while the claim is performed, the due date for a breached primary claim and
  the assertion date for a breached warranty,
* per independent claim, the disjunction requiring it or one of its
  consequence claims to be performed,
* soft assertions preferring primary performance over breach handling.

``build_analyses`` assembles the five analysis instances from these pieces;
each instance is an independent list of named assertions ready for emission.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from . import terms
from .errors import EncodeError
from .ontology import (Claim, ClaimKind, ContractModel, Formula, Transfer,
                       UNPERFORMED, Window, compensation_var, date_var,
                       dprime_var, resolve_window, trigger_sets)
from .terms import (BoolTerm, Const, IntIte, IntTerm, Var, conj, disj, eq,
                    ge, le, lt)

HARNESS = "analysis-harness"


class AnalysisKind(Enum):
    CLAIM_CONSISTENCY = "ClaimConsistency"
    EXECUTABILITY = "ContractExecutability"
    CLAIM_UNSATISFIABLE = "ClaimUnsatisfiable"
    CLAIM_DEFENSE = "ClaimDefense"
    LIMITATION = "LimitationCheck"


class Expectation(Enum):
    SAT_IS_GOOD = "sat-is-good"
    UNSAT_IS_GOOD = "unsat-is-good"


EXPECTATION: dict[AnalysisKind, Expectation] = {
    AnalysisKind.CLAIM_CONSISTENCY: Expectation.SAT_IS_GOOD,
    AnalysisKind.EXECUTABILITY: Expectation.SAT_IS_GOOD,
    AnalysisKind.CLAIM_UNSATISFIABLE: Expectation.SAT_IS_GOOD,
    AnalysisKind.CLAIM_DEFENSE: Expectation.UNSAT_IS_GOOD,
    AnalysisKind.LIMITATION: Expectation.UNSAT_IS_GOOD,
}


@dataclass(frozen=True)
class NamedAssertion:
    name: str
    term: BoolTerm
    origin_blocks: tuple[str, ...] = ()
    soft: bool = False
    weight: int = 1

    @property
    def synthetic(self) -> bool:
        return not self.origin_blocks


@dataclass(frozen=True)
class AnalysisInstance:
    kind: AnalysisKind
    target: str | None
    assertions: tuple[NamedAssertion, ...]
    # persons/objects referenced, for sort declarations and model queries
    persons: tuple[str, ...] = ()
    objects: tuple[str, ...] = ()

    @property
    def expectation(self) -> Expectation:
        return EXPECTATION[self.kind]

    @property
    def hard(self) -> tuple[NamedAssertion, ...]:
        return tuple(a for a in self.assertions if not a.soft)

    @property
    def soft(self) -> tuple[NamedAssertion, ...]:
        return tuple(a for a in self.assertions if a.soft)

    def int_vars(self) -> list[str]:
        out: set[str] = set()
        for a in self.assertions:
            out |= terms.int_vars(a.term)
        return sorted(out)

    def var_count(self) -> int:
        return len(self.int_vars()) + len(self.persons) + len(self.objects)

    def constraint_count(self) -> int:
        return len(self.assertions)

    def by_name(self, name: str) -> NamedAssertion:
        for a in self.assertions:
            if a.name == name:
                return a
        raise KeyError(name)


def _mk_instance(kind: AnalysisKind, target: str | None,
                 assertions: list[NamedAssertion]) -> AnalysisInstance:
    names = [a.name for a in assertions]
    if len(names) != len(set(names)):
        raise EncodeError(f"duplicate assertion name in {kind.value} instance")
    persons: set[str] = set()
    objects: set[str] = set()
    for a in assertions:
        objs, pers = terms.entity_refs(a.term)
        objects |= objs
        persons |= pers
    front: list[NamedAssertion] = []
    if len(persons) > 1:
        front.append(NamedAssertion(
            "distinct_persons", terms.Distinct("person", tuple(sorted(persons)))))
    if len(objects) > 1:
        front.append(NamedAssertion(
            "distinct_objects", terms.Distinct("object", tuple(sorted(objects)))))
    return AnalysisInstance(kind, target, tuple(front + assertions),
                            tuple(sorted(persons)), tuple(sorted(objects)))


# -- claim formulas -----------------------------------------------------------


def _performance_term(model: ContractModel, claim: Claim) -> BoolTerm:
    perf = claim.performance
    if perf is None:
        return terms.TRUE
    if isinstance(perf, Transfer):
        if claim.debtor is None:
            raise EncodeError(f"claim {claim.id} has a transfer but no debtor")
        return terms.OwnerEq(perf.object_id, claim.debtor)
    if isinstance(perf, Formula):
        return perf.term
    raise EncodeError(f"unsupported performance on claim {claim.id}")


def _window_conjuncts(window: Window, d: Var, drop_limitation: bool) -> list[BoolTerm]:
    out: list[BoolTerm] = []
    if window.lower_strict:
        out.append(lt(window.lower, d))
    else:
        out.append(le(window.lower, d))
    if window.extra_lower is not None:
        out.append(le(window.extra_lower, d))
    if window.due_upper is not None:
        out.append(le(d, window.due_upper))
    if window.lim_upper is not None and not drop_limitation:
        out.append(le(d, window.lim_upper))
    return out


def encode_claim(model: ContractModel, claim: Claim,
                 drop_limitation: bool = False) -> BoolTerm:
    """The formula for one claim over its performance date.

    Primary claim: unperformed, or performed inside the window with the
    performance precondition.  Warranty: met (date ``-1`` and the warranted
    condition holds), or breached inside the assertion window.  Triggered
    claims delegate to :func:`encode_secondary`.
    """
    if claim.trigger is not None:
        return encode_secondary(model, claim, drop_limitation)
    window = resolve_window(model, claim)
    d = Var(date_var(claim.id))
    not_performed = eq(d, Const(UNPERFORMED))
    in_window = _window_conjuncts(window, d, drop_limitation)
    if claim.kind is ClaimKind.WARRANTY:
        met = conj([not_performed, _performance_term(model, claim)])
        return disj([met, conj(in_window)])
    performed = conj(in_window + [_performance_term(model, claim)])
    return disj([not_performed, performed])


def encode_secondary(model: ContractModel, claim: Claim,
                     drop_limitation: bool = False) -> BoolTerm:
    """Formula for a consequence claim relative to its trigger's breach date.

    Performance and restitution claims may stay unperformed or run in the
    window after the breach.  A compensation claim fixes the paid amount to
    the clamped damage and, when performed, the payment must reach the
    minimum and respect the cap; when unperformed the damage term is zero.
    """
    if claim.trigger is None:
        raise EncodeError(f"secondary claim {claim.id} has no trigger")
    window = resolve_window(model, claim)
    d = Var(date_var(claim.id))
    not_performed = eq(d, Const(UNPERFORMED))
    in_window = _window_conjuncts(window, d, drop_limitation)
    if claim.kind is ClaimKind.PERFORMANCE:
        performed = conj(in_window + [_performance_term(model, claim)])
        return disj([not_performed, performed])
    if claim.kind is ClaimKind.RESTITUTION:
        return disj([not_performed, conj(in_window)])
    if claim.kind is ClaimKind.COMPENSATION:
        raw = claim.compensation if claim.compensation is not None else Var(f"raw_{claim.id}")
        minimum = Const(claim.min_amount or 0)
        paid = Var(compensation_var(claim.id))
        if claim.max_amount is not None:
            clamped: IntTerm = IntIte(lt(raw, minimum), Const(0),
                                      IntIte(lt(Const(claim.max_amount), raw),
                                             Const(claim.max_amount), raw))
        else:
            clamped = IntIte(lt(raw, minimum), Const(0), raw)
        clamp_def = eq(paid, clamped)
        bounds: list[BoolTerm] = [ge(paid, minimum)]
        if claim.max_amount is not None:
            bounds.append(le(paid, Const(claim.max_amount)))
        performed = conj(in_window + bounds)
        unpaid = conj([not_performed, eq(raw, Const(0))])
        return conj([clamp_def, disj([unpaid, performed])])
    raise EncodeError(f"claim {claim.id} is not a secondary claim")


def performed_term(claim: Claim) -> BoolTerm:
    """Performed in the execution sense: for a warranty, being met."""
    d = Var(date_var(claim.id))
    if claim.kind is ClaimKind.WARRANTY:
        return eq(d, Const(UNPERFORMED))
    return ge(d, Const(0))


def breach_term(claim: Claim) -> BoolTerm:
    """The claim is breached: unperformed, or asserted for a warranty."""
    d = Var(date_var(claim.id))
    if claim.kind is ClaimKind.WARRANTY:
        return ge(d, Const(0))
    return eq(d, Const(UNPERFORMED))


def _deadline_term(model: ContractModel, claim: Claim) -> IntTerm:
    """Date at which a breach of ``claim`` becomes definite."""
    window = resolve_window(model, claim)
    if claim.kind is ClaimKind.WARRANTY:
        return Var(date_var(claim.id))
    for candidate in (window.due_upper, window.extra_lower, window.lim_upper):
        if candidate is not None:
            return candidate
    return window.lower


def dprime_definitions(model: ContractModel,
                       trigger_ids: set[str]) -> list[NamedAssertion]:
    """Definitional assertions for the breach dates of the given claims,
    including any breach dates they themselves depend on."""
    needed = set(trigger_ids)
    changed = True
    while changed:
        changed = False
        for cid in list(needed):
            trigger = model.claims[cid].trigger
            if trigger is not None and trigger not in needed:
                needed.add(trigger)
                changed = True
    out = []
    for cid in sorted(needed):
        claim = model.claims[cid]
        dp = Var(dprime_var(cid))
        if claim.kind is ClaimKind.WARRANTY:
            definition = eq(dp, Var(date_var(cid)))
        else:
            definition = eq(dp, IntIte(performed_term(claim),
                                       Const(UNPERFORMED),
                                       _deadline_term(model, claim)))
        out.append(NamedAssertion(f"dprimedef_{cid}", definition,
                                  (claim.block_id,)))
    return out


def _triggers_in_use(model: ContractModel, claims: list[Claim]) -> set[str]:
    return {c.trigger for c in claims if c.trigger is not None}


# -- contract-level encodings -------------------------------------------------


def encode_owner(model: ContractModel) -> list[NamedAssertion]:
    """One ownership assertion per stated property right."""
    out = []
    seen: dict[str, int] = {}
    for fact in model.property_rights:
        base = f"owner_{fact.object_id}"
        seen[base] = seen.get(base, 0) + 1
        name = base if seen[base] == 1 else f"{base}__{seen[base]}"
        out.append(NamedAssertion(name, terms.OwnerEq(fact.object_id, fact.owner),
                                  (fact.block_id,)))
    return out


def claim_assertion(model: ContractModel, claim: Claim,
                    drop_limitation: bool = False) -> NamedAssertion:
    return NamedAssertion(f"claim_{claim.id}",
                          encode_claim(model, claim, drop_limitation),
                          tuple(sorted(claim.origin_blocks)))


def trigger_disjunctions(model: ContractModel) -> list[NamedAssertion]:
    """Per independent claim: it or one of its trigger set is performed."""
    out = []
    sets = trigger_sets(model)
    for group in sets:
        roots = [cid for cid in sorted(group) if model.claims[cid].trigger is None]
        for root in roots:
            others = [cid for cid in sorted(group) if cid != root]
            term = disj([performed_term(model.claims[root])]
                        + [ge(Var(date_var(cid)), Const(0)) for cid in others])
            origin = sorted({model.claims[cid].block_id for cid in group})
            out.append(NamedAssertion(f"triggerset_{root}", term, tuple(origin)))
    return out


def encode_spa(model: ContractModel,
               drop_limitation_for: str | None = None) -> list[NamedAssertion]:
    """All hard assertions of the contract execution formula."""
    claims = list(model.claims.values())
    out = encode_owner(model)
    for claim in claims:
        out.append(claim_assertion(model, claim,
                                   drop_limitation=claim.id == drop_limitation_for))
    out.extend(dprime_definitions(model, _triggers_in_use(model, claims)))
    out.extend(trigger_disjunctions(model))
    return out


def encode_soft(model: ContractModel) -> list[NamedAssertion]:
    """Unit-weight soft assertions prioritizing undisturbed execution:
    every independent claim performed (warranties met), every performance or
    restitution consequence unexecuted."""
    out = []
    for claim in model.claims.values():
        if claim.trigger is None:
            out.append(NamedAssertion(f"soft_{claim.id}", performed_term(claim),
                                      (claim.block_id,), soft=True))
        elif claim.kind in (ClaimKind.PERFORMANCE, ClaimKind.RESTITUTION):
            out.append(NamedAssertion(
                f"soft_{claim.id}", eq(Var(date_var(claim.id)), Const(UNPERFORMED)),
                (claim.block_id,), soft=True))
    return out


# -- analysis assembly --------------------------------------------------------


def consistency_instances(model: ContractModel) -> list[AnalysisInstance]:
    """Per independent claim: owner facts + the claim formula + performed.
    Per performance/compensation consequence: additionally force the breach
    of the trigger."""
    owner = encode_owner(model)
    out = []
    for claim in model.claims.values():
        if claim.trigger is None:
            assertions = owner + [
                claim_assertion(model, claim),
                NamedAssertion("analysis_performed", performed_term(claim)),
            ]
            out.append(_mk_instance(AnalysisKind.CLAIM_CONSISTENCY, claim.id,
                                    assertions))
        elif claim.kind in (ClaimKind.PERFORMANCE, ClaimKind.COMPENSATION):
            trigger = model.claims[claim.trigger]
            assertions = owner + [
                NamedAssertion("analysis_trigger_breached", breach_term(trigger)),
                claim_assertion(model, trigger),
                claim_assertion(model, claim),
            ]
            assertions += dprime_definitions(model, {trigger.id})
            assertions.append(NamedAssertion(
                "analysis_performed", ge(Var(date_var(claim.id)), Const(0))))
            out.append(_mk_instance(AnalysisKind.CLAIM_CONSISTENCY, claim.id,
                                    assertions))
    return out


def executability_instance(model: ContractModel) -> AnalysisInstance:
    return _mk_instance(AnalysisKind.EXECUTABILITY, None,
                        encode_spa(model) + encode_soft(model))


def unsatisfiable_instances(model: ContractModel) -> list[AnalysisInstance]:
    """Per independent claim: is the contract executable despite its breach?"""
    out = []
    spa = encode_spa(model)
    for claim in model.claims.values():
        if claim.trigger is not None:
            continue
        assertions = spa + [NamedAssertion("analysis_breached", breach_term(claim))]
        out.append(_mk_instance(AnalysisKind.CLAIM_UNSATISFIABLE, claim.id,
                                assertions))
    return out


def defense_instances(model: ContractModel) -> list[AnalysisInstance]:
    """Per precede association: can the claim fall due before the claim that
    must be performed first?  Satisfiable means the timing is inconsistent."""
    owner = encode_owner(model)
    out = []
    for claim in model.claims.values():
        if claim.precede is None:
            continue
        preceding = model.claims[claim.precede]
        assertions = owner + [
            claim_assertion(model, claim),
            claim_assertion(model, preceding),
        ]
        assertions += dprime_definitions(
            model, _triggers_in_use(model, [claim, preceding]))
        assertions.append(NamedAssertion(
            "analysis_due_order",
            lt(_due_term(model, claim), _due_term(model, preceding))))
        out.append(_mk_instance(AnalysisKind.CLAIM_DEFENSE, claim.id, assertions))
    return out


def _due_term(model: ContractModel, claim: Claim) -> IntTerm:
    window = resolve_window(model, claim)
    if not window.lower_strict:
        return window.lower
    if window.due_upper is not None:
        return window.due_upper
    if window.extra_lower is not None:
        return window.extra_lower
    return window.lower


def limitation_instances(model: ContractModel) -> list[AnalysisInstance]:
    """Per claim with a limitation and a trigger-relative due date: drop the
    claim's limitation bound from the contract formula and ask for a
    performance beyond the limitation."""
    out = []
    for claim in model.claims.values():
        if claim.trigger is None:
            continue
        window = resolve_window(model, claim)
        if window.lim_upper is None or window.due_upper is None:
            continue
        assertions = encode_spa(model, drop_limitation_for=claim.id)
        assertions.append(NamedAssertion(
            "analysis_beyond_limitation",
            lt(window.lim_upper, Var(date_var(claim.id)))))
        out.append(_mk_instance(AnalysisKind.LIMITATION, claim.id, assertions))
    return out


def build_analyses(model: ContractModel,
                   kinds: set[AnalysisKind] | None = None) -> list[AnalysisInstance]:
    """Assemble every analysis instance for the model (optionally filtered)."""
    wanted = kinds if kinds is not None else set(AnalysisKind)
    instances: list[AnalysisInstance] = []
    if AnalysisKind.EXECUTABILITY in wanted:
        instances.append(executability_instance(model))
    if AnalysisKind.CLAIM_CONSISTENCY in wanted:
        instances.extend(consistency_instances(model))
    if AnalysisKind.CLAIM_UNSATISFIABLE in wanted:
        instances.extend(unsatisfiable_instances(model))
    if AnalysisKind.CLAIM_DEFENSE in wanted:
        instances.extend(defense_instances(model))
    if AnalysisKind.LIMITATION in wanted:
        instances.extend(limitation_instances(model))
    return instances


def core_instance(instance: AnalysisInstance,
                  core: tuple[str, ...]) -> AnalysisInstance:
    """The sub-instance containing exactly the named core assertions
    (used to confirm that a reported core is itself unsatisfiable)."""
    names = set(core)
    kept = tuple(a for a in instance.hard if a.name in names)
    persons: set[str] = set()
    objects: set[str] = set()
    for a in kept:
        objs, pers = terms.entity_refs(a.term)
        persons |= pers
        objects |= objs
    return AnalysisInstance(instance.kind, instance.target, kept,
                            tuple(sorted(persons)), tuple(sorted(objects)))


def replay_hard_assertions(instance: AnalysisInstance, env: terms.ReplayEnv) -> list[str]:
    """Names of hard assertions the model fails to satisfy (soundness check;
    expected to be empty for every sat verdict)."""
    failed = []
    for assertion in instance.hard:
        if not terms.eval_bool(assertion.term, env):
            failed.append(assertion.name)
    return failed
