"""Running all analyses for a contract and assembling the report.

Verdicts are interpreted against each analysis kind's expectation: for claim
consistency, executability and breach-tolerance a satisfiable instance is
good news and an unsatisfiable one produces a red flag from the
unsatisfiability core; for the defense and limitation analyses a satisfying
model is itself the inconsistency witness and is rendered as an execution
trace.

Every satisfying model is replayed through the independent term evaluator
before it is trusted; models used for traces are re-solved once with
cosmetic date preferences so diagrams show only the claims that matter.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from . import terms
from .checks import Finding, run_static_checks
from .encoder import (HARNESS, AnalysisInstance, AnalysisKind, Expectation,
                      NamedAssertion, build_analyses, performed_term,
                      replay_hard_assertions)
from .errors import ContractCheckError, SolverError
from .ontology import (Claim, ClaimKind, ContractModel, UNPERFORMED,
                       compensation_var, date_var, resolve_window,
                       trigger_sets)
from .solver import (Model, Sat, SolverConfig, Unknown, Unsat, Verdict,
                     run_solver, solve_maxsmt)
from .terms import Const, Var, eq


@dataclass(frozen=True)
class TraceEvent:
    day: int
    claim_id: str
    action: str  # performed | asserted | withdrawn | compensated
    actor: str
    counterparty: str
    amount: int | None = None


@dataclass(frozen=True)
class TraceNote:
    claim_id: str
    party: str


@dataclass(frozen=True)
class ExecutionTrace:
    participants: tuple[str, ...]
    events: tuple[TraceEvent, ...]
    unperformed: tuple[TraceNote, ...] = ()  # breached independent claims
    satisfied: tuple[TraceNote, ...] = ()    # warranties that were met


@dataclass(frozen=True)
class RedFlag:
    kind: str
    targets: tuple[str, ...]
    block_ids: tuple[str, ...]
    explanation: str


@dataclass(frozen=True)
class AnalysisOutcome:
    kind: str
    target: str | None
    status: str  # pass | flag | unknown | error
    verdict: str | None  # sat | unsat | unknown
    vars: int
    constraints: int
    trace: ExecutionTrace | None = None
    message: str | None = None
    solve_ms: float = field(default=0.0, compare=False)


@dataclass(frozen=True)
class Report:
    contract_id: str
    findings: tuple[Finding, ...]
    outcomes: tuple[AnalysisOutcome, ...]
    flags: tuple[RedFlag, ...]
    # text of every block cited by a flag, for side-by-side display
    block_texts: dict[str, str] = field(default_factory=dict)

    @property
    def has_flags(self) -> bool:
        return bool(self.flags)

    def outcome(self, kind: AnalysisKind | str,
                target: str | None = None) -> AnalysisOutcome | None:
        kind_value = kind.value if isinstance(kind, AnalysisKind) else kind
        for outcome in self.outcomes:
            if outcome.kind == kind_value and (target is None or outcome.target == target):
                return outcome
        return None


def encodable_submodel(model: ContractModel) -> tuple[ContractModel, list[str]]:
    """Drop claims whose window cannot be resolved (already reported by the
    static checks), cascading over their consequences."""
    bad: set[str] = set()
    for claim in model.claims.values():
        try:
            resolve_window(model, claim)
        except ContractCheckError:
            bad.add(claim.id)
    changed = True
    while changed:
        changed = False
        for claim in model.claims.values():
            if claim.id in bad:
                continue
            if claim.trigger in bad or (claim.precede and claim.precede in bad):
                bad.add(claim.id)
                changed = True
    if not bad:
        return model, []
    kept = {cid: c for cid, c in model.claims.items() if cid not in bad}
    pruned = replace_claims(model, kept)
    return pruned, sorted(bad)


def replace_claims(model: ContractModel, claims: dict[str, Claim]) -> ContractModel:
    from copy import copy

    out = copy(model)
    out.claims = claims
    return out


# -- traces -------------------------------------------------------------------

_ACTIONS = {
    ClaimKind.PRIMARY: "performed",
    ClaimKind.PERFORMANCE: "performed",
    ClaimKind.WARRANTY: "asserted",
    ClaimKind.RESTITUTION: "withdrawn",
    ClaimKind.COMPENSATION: "compensated",
}


def trace_from_model(model: ContractModel, smt_model: Model,
                     partial: bool = False) -> ExecutionTrace:
    """Execution trace of a satisfying model.

    Claims with a non-negative date become dated events (the breach of a
    warranty is its assertion by the creditor).  Unperformed independent
    claims and met warranties get their own sections; unperformed
    consequence claims are omitted as the normal case.  ``partial`` permits
    models of instances that constrain only a subset of the claims (witness
    models); otherwise a missing date variable is a bug.
    """
    events = []
    unperformed = []
    satisfied = []
    for claim in model.claims.values():
        name = date_var(claim.id)
        if name not in smt_model.int_bindings:
            if partial:
                continue
            raise SolverError(f"model is missing the date variable {name}")
        day = smt_model.int_bindings[name]
        if day == UNPERFORMED:
            if claim.kind is ClaimKind.WARRANTY:
                satisfied.append(TraceNote(claim.id, claim.debtor or "?"))
            elif claim.trigger is None:
                unperformed.append(TraceNote(claim.id, claim.debtor or "?"))
            continue
        actor, counterparty = claim.debtor, claim.creditor
        if claim.kind is ClaimKind.WARRANTY:
            actor, counterparty = claim.creditor, claim.debtor
        amount = None
        if claim.kind is ClaimKind.COMPENSATION:
            amount = smt_model.int_bindings.get(compensation_var(claim.id))
        events.append(TraceEvent(day, claim.id, _ACTIONS[claim.kind],
                                 actor or "?", counterparty or "?", amount))
    events.sort(key=lambda e: (e.day, e.claim_id))
    ordered: list[str] = []
    for pid in [model.seller, model.purchaser]:
        if pid and pid not in ordered:
            ordered.append(pid)
    for claim in model.claims.values():
        for pid in (claim.debtor, claim.creditor):
            if pid and pid not in ordered:
                ordered.append(pid)
    return ExecutionTrace(tuple(ordered), tuple(events),
                          tuple(unperformed), tuple(satisfied))


def performed_per_set(model: ContractModel, smt_model: Model) -> list[int]:
    """How many claims of each trigger set the model performs (a warranty
    counts when met) — exactly one per set in a clean execution."""
    counts = []
    env = smt_model.replay_env()
    for group in trigger_sets(model):
        count = 0
        for cid in sorted(group):
            if terms.eval_bool(performed_term(model.claims[cid]), env):
                count += 1
        counts.append(count)
    return counts


def _cosmetic_cleanup(instance: AnalysisInstance, verdict: Sat,
                      model: ContractModel, config: SolverConfig) -> Sat:
    """Re-solve with date preferences so traces stay minimal.

    Soft assertions the optimum satisfied are pinned hard (the semantic
    result cannot change); every claim not covered by a pinned preference,
    except the instance's target, softly prefers staying unperformed.
    """
    env = verdict.model.replay_env()
    pinned: list[NamedAssertion] = []
    covered: set[str] = set()
    for soft in instance.soft:
        if terms.eval_bool(soft.term, env):
            pinned.append(replace(soft, name=f"pinned_{soft.name}", soft=False))
            covered.add(soft.name.removeprefix("soft_"))
    cosmetic = []
    for claim in model.claims.values():
        if claim.id in covered or claim.id == instance.target:
            continue
        if date_var(claim.id) not in verdict.model.int_bindings:
            continue
        cosmetic.append(NamedAssertion(
            f"cosmetic_{claim.id}", eq(Var(date_var(claim.id)), Const(UNPERFORMED)),
            soft=True))
    if not cosmetic:
        return verdict
    candidate = AnalysisInstance(instance.kind, instance.target,
                                 instance.hard + tuple(pinned) + tuple(cosmetic),
                                 instance.persons, instance.objects)
    cleaned = solve_maxsmt(candidate, config)
    if not isinstance(cleaned, Sat):
        return verdict
    violated = tuple(a.name for a in instance.soft
                     if not terms.eval_bool(a.term, cleaned.model.replay_env()))
    return Sat(replace(cleaned.model, violated_soft=violated))


# -- flags --------------------------------------------------------------------

def flags_from_core(instance: AnalysisInstance, core: tuple[str, ...]) -> RedFlag:
    """Map an unsatisfiability core to the text blocks that caused it."""
    blocks: set[str] = set()
    lines = []
    for name in core:
        try:
            assertion = instance.by_name(name)
        except KeyError:
            continue
        blocks.update(assertion.origin_blocks)
        origin = ", ".join(assertion.origin_blocks) or HARNESS
        lines.append(f"{name} [{origin}]: {terms.pretty(assertion.term)}")
    if not core:
        lines.append("the solver reported an empty core; the conflict could "
                     "not be narrowed down")
    explanation = "conflicting constraints:\n" + "\n".join("  " + l for l in lines)
    block_ids = tuple(sorted(blocks)) if blocks else (HARNESS,)
    return RedFlag(instance.kind.value, (instance.target or "",), block_ids,
                   explanation)


def _witness_flag(instance: AnalysisInstance, model: ContractModel,
                  smt_model: Model) -> RedFlag:
    target = instance.target or ""
    claim = model.claims.get(target)
    blocks = tuple(sorted(claim.origin_blocks)) if claim else (HARNESS,)
    if instance.kind is AnalysisKind.CLAIM_DEFENSE and claim is not None:
        preceding = model.claims.get(claim.precede or "")
        if preceding is not None:
            blocks = tuple(sorted(set(blocks) | set(preceding.origin_blocks)))
        explanation = (f"claim {target} can fall due before its preceding claim "
                       f"{claim.precede} is performed")
    else:
        day = smt_model.int_bindings.get(date_var(target))
        explanation = (f"claim {target} can be performed on day {day}, after "
                       f"its limitation has expired")
    return RedFlag(instance.kind.value, (target,), blocks, explanation)


def _merge_flags(flags: list[RedFlag]) -> tuple[RedFlag, ...]:
    """De-duplicate by (kind, block set); merge the affected targets."""
    merged: dict[tuple[str, tuple[str, ...]], RedFlag] = {}
    for flag in flags:
        key = (flag.kind, flag.block_ids)
        if key in merged:
            existing = merged[key]
            targets = tuple(dict.fromkeys(existing.targets + flag.targets))
            merged[key] = replace(existing, targets=targets)
        else:
            merged[key] = flag
    return tuple(merged.values())


# -- the batch ----------------------------------------------------------------

def run_all(model: ContractModel, config: SolverConfig | None = None,
            kinds: set[AnalysisKind] | None = None) -> Report:
    """Static checks plus every analysis instance, solved concurrently."""
    config = config or SolverConfig()
    findings = run_static_checks(model)
    submodel, skipped = encodable_submodel(model)
    instances = build_analyses(submodel, kinds)

    def solve(instance: AnalysisInstance) -> tuple[Verdict | None, float, str | None]:
        start = time.monotonic()
        try:
            if instance.soft:
                verdict = solve_maxsmt(instance, config)
            else:
                verdict = run_solver(instance, config)
            return verdict, (time.monotonic() - start) * 1000.0, None
        except SolverError as exc:
            return None, (time.monotonic() - start) * 1000.0, str(exc)

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        solved = list(pool.map(solve, instances))

    outcomes: list[AnalysisOutcome] = []
    flags: list[RedFlag] = []
    for instance, (verdict, ms, error) in zip(instances, solved):
        base = dict(kind=instance.kind.value, target=instance.target,
                    vars=instance.var_count(),
                    constraints=instance.constraint_count(), solve_ms=ms)
        if error is not None:
            outcomes.append(AnalysisOutcome(status="error", verdict=None,
                                            message=error, **base))
            continue
        if isinstance(verdict, Unknown):
            outcomes.append(AnalysisOutcome(status="unknown", verdict="unknown",
                                            message=verdict.reason, **base))
            continue
        if isinstance(verdict, Sat):
            failed = replay_hard_assertions(instance, verdict.model.replay_env())
            if failed:
                outcomes.append(AnalysisOutcome(
                    status="error", verdict="sat",
                    message=f"model replay failed for {failed}", **base))
                continue
        good_sat = instance.expectation is Expectation.SAT_IS_GOOD
        if isinstance(verdict, Sat) and good_sat:
            trace = None
            if instance.kind is AnalysisKind.EXECUTABILITY:
                cleaned = _cosmetic_cleanup(instance, verdict, submodel, config)
                trace = trace_from_model(submodel, cleaned.model)
            outcomes.append(AnalysisOutcome(status="pass", verdict="sat",
                                            trace=trace, **base))
        elif isinstance(verdict, Unsat) and not good_sat:
            outcomes.append(AnalysisOutcome(status="pass", verdict="unsat", **base))
        elif isinstance(verdict, Unsat):
            flag = flags_from_core(instance, verdict.core)
            flags.append(flag)
            outcomes.append(AnalysisOutcome(status="flag", verdict="unsat",
                                            message=flag.explanation, **base))
        else:
            assert isinstance(verdict, Sat)
            cleaned = _cosmetic_cleanup(instance, verdict, submodel, config)
            trace = trace_from_model(submodel, cleaned.model, partial=True)
            flag = _witness_flag(instance, submodel, cleaned.model)
            flags.append(flag)
            outcomes.append(AnalysisOutcome(status="flag", verdict="sat",
                                            trace=trace, message=flag.explanation,
                                            **base))
    merged = _merge_flags(flags)
    block_texts = {}
    for flag in merged:
        for block_id in flag.block_ids:
            if block_id in model.blocks:
                block_texts[block_id] = model.blocks[block_id].text
    return Report(model.contract_id, tuple(findings), tuple(outcomes),
                  merged, dict(sorted(block_texts.items())))
