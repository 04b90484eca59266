"""Executable checks of the engine's guaranteed properties on finite domains.

Each check enumerates or samples a bounded space of runs and reports every
counterexample with a reproducing script (in script-file syntax) plus the
seed and actual state involved, so a violation can be replayed exactly.
A pass is always relative to the stated bounds, which every report carries.

Checks:
  subsumption      — whatever the discard-based baseline believes after an
                     error-free run, the ranked engine believes too.
  revision         — sensing a formula through a matching sensor makes the
                     agent believe the formula's actual truth value; a
                     witness run shows a belief reversal without collapse.
  introspection    — the agent believes what it believes (and disbelieves),
                     and never believes a contradiction.
  error-awareness  — after a belief reversal the agent believes it was
                     previously mistaken.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator

from noetic.core import Valuation, all_valuations, eval_static, sf
from noetic.dsl import DomainSpec, PhysicalAction, SensingAction, literal_probes
from noetic.engine import (
    EpistemicTrace,
    PenaltyMode,
    apply_physical,
    apply_sensing,
    baseline_apply,
    baseline_bel,
    baseline_init,
    bel,
    init_epistemic,
)
from noetic.formula import FALSE, And, Atom, Bel, Formula, Not, Prev, is_domain_dependent, render
from noetic.sim import Directive, ScriptStep, World, mix_seed, observe, run_script, world_progress


@dataclass(frozen=True)
class CheckViolation:
    description: str
    script: tuple[str, ...]  # script-file syntax, replays the violation
    actual: Valuation | None = None
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "description": self.description,
            "script": list(self.script),
            "actual": self.actual,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class CheckReport:
    check: str
    cases: int
    bounds: dict[str, object]
    violations: tuple[CheckViolation, ...]
    details: dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "cases": self.cases,
            "bounds": self.bounds,
            "violations": [v.to_dict() for v in self.violations],
            "details": self.details,
            "passed": self.passed,
        }

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        bounds = ", ".join(f"{k}={v}" for k, v in self.bounds.items())
        return f"[{status}] {self.check}: {self.cases} cases, {len(self.violations)} violations ({bounds})"


def default_probes(spec: DomainSpec, initial_descriptions: bool = True) -> list[Formula]:
    """Fluent literals, pairwise conjunctions of distinct literals, and the
    full state description of each declared initial situation."""
    literals = literal_probes(spec)
    probes = list(literals)
    for i in range(len(literals)):
        for j in range(i + 1, len(literals)):
            probes.append(And(literals[i], literals[j]))
    if initial_descriptions:
        for init in spec.initial_situations:
            desc: Formula | None = None
            for f in spec.fluents:
                lit: Formula = Atom(f) if init.valuation[f] else Not(Atom(f))
                desc = lit if desc is None else And(desc, lit)
            if desc is not None:
                probes.append(desc)
    return probes


def find_revision_action(spec: DomainSpec, formula: Formula) -> SensingAction | None:
    """A declared sensing action whose sensed bit equals the formula's truth
    value in every state, if one exists. Sensing actions change no fluents,
    so such an action revises beliefs about the formula without side
    effects."""
    if not is_domain_dependent(formula):
        raise ValueError("revision target must be domain-dependent")
    for act in spec.sensing_actions:
        if all(sf(act, v) == eval_static(formula, v) for v in all_valuations(spec.fluents)):
            return act
    return None


def _require_revision_action(spec: DomainSpec, action: SensingAction | str, formula: Formula) -> SensingAction:
    act = spec.action(action) if isinstance(action, str) else action
    if not isinstance(act, SensingAction):
        raise ValueError(f"'{act.name}' is not a sensing action")
    if not all(sf(act, v) == eval_static(formula, v) for v in all_valuations(spec.fluents)):
        raise ValueError(f"'{act.name}' is not a revision action for {render(formula)}")
    return act


def reachable_states(
    spec: DomainSpec, max_len: int, penalty_mode: PenaltyMode = PenaltyMode.AXIOM
) -> Iterator[tuple[tuple[str, ...], EpistemicTrace]]:
    """Every belief state the agent can be driven into by at most max_len
    actions: physical actions branch once, sensing actions branch on both
    observable bits (noise makes any bit receivable)."""
    actions = list(spec.physical_actions) + list(spec.sensing_actions)

    def walk(trace: EpistemicTrace, script: tuple[str, ...]) -> Iterator[tuple[tuple[str, ...], EpistemicTrace]]:
        yield script, trace
        if len(script) >= max_len:
            return
        for act in actions:
            if isinstance(act, PhysicalAction):
                yield from walk(apply_physical(trace, act), script + (f"do {act.name}",))
            else:
                for bit in (False, True):
                    yield from walk(
                        apply_sensing(trace, act, bit),
                        script + (f"sense {act.name} obs={int(bit)}",),
                    )

    yield from walk(init_epistemic(spec, penalty_mode), ())


def check_revision(
    spec: DomainSpec,
    action: SensingAction | str,
    formula: Formula,
    max_len: int = 4,
    penalty_mode: PenaltyMode = PenaltyMode.AXIOM,
) -> CheckReport:
    """Sensing through a revision action must leave the agent believing the
    formula's actual truth value, from every reachable belief state and
    every possible actual state.

    Also constructs a witness run in which the agent believed the formula
    false, an accurate reading reversed that belief, and the agent's
    beliefs stayed consistent throughout.
    """
    act = _require_revision_action(spec, action, formula)
    negated = Not(formula)
    violations: list[CheckViolation] = []
    witness: dict[str, object] | None = None
    cases = 0
    for script, trace in reachable_states(spec, max_len, penalty_mode):
        g = trace.last
        believed_not = bel(trace, g, negated)
        for actual in all_valuations(spec.fluents):
            cases += 1
            holds = eval_static(formula, actual)
            observed = sf(act, actual)
            after = apply_sensing(trace, act, observed)
            target = formula if holds else negated
            if not bel(after, g + 1, target):
                violations.append(
                    CheckViolation(
                        description=(
                            f"after accurate '{act.name}' the agent does not believe "
                            f"{render(target)}"
                        ),
                        script=script + (f"sense {act.name} obs={int(observed)}",),
                        actual=dict(actual),
                    )
                )
            if (
                witness is None
                and holds
                and believed_not
                and bel(after, g + 1, formula)
                and not bel(after, g + 1, FALSE)
            ):
                witness = {
                    "script": list(script + (f"sense {act.name} obs={int(observed)}",)),
                    "actual": dict(actual),
                }
    if witness is None:
        violations.append(
            CheckViolation(
                description="no reachable state exhibits a consistent belief reversal",
                script=(),
            )
        )
    return CheckReport(
        check="revision",
        cases=cases,
        bounds={
            "max_script_len": max_len,
            "action": act.name,
            "formula": render(formula),
            "penalty_mode": penalty_mode.value,
        },
        violations=tuple(violations),
        details={"witness": witness},
    )


def check_error_awareness(
    spec: DomainSpec,
    action: SensingAction | str,
    formula: Formula,
    max_len: int = 4,
    penalty_mode: PenaltyMode = PenaltyMode.AXIOM,
) -> CheckReport:
    """Whenever a reading of a revision action reverses the agent's belief
    in the formula, the agent must afterwards believe that the formula held
    before while it believed otherwise."""
    act = _require_revision_action(spec, action, formula)
    negated = Not(formula)
    mistaken_before = Prev(And(formula, Bel(negated)))
    violations: list[CheckViolation] = []
    cases = 0
    premise_hits = 0
    for script, trace in reachable_states(spec, max_len, penalty_mode):
        g = trace.last
        if not bel(trace, g, negated):
            continue
        for bit in (False, True):
            cases += 1
            after = apply_sensing(trace, act, bit)
            if not bel(after, g + 1, formula):
                continue
            premise_hits += 1
            if not bel(after, g + 1, mistaken_before):
                violations.append(
                    CheckViolation(
                        description="belief reversal without awareness of the earlier mistake",
                        script=script + (f"sense {act.name} obs={int(bit)}",),
                    )
                )
    return CheckReport(
        check="error-awareness",
        cases=cases,
        bounds={
            "max_script_len": max_len,
            "action": act.name,
            "formula": render(formula),
            "penalty_mode": penalty_mode.value,
        },
        violations=tuple(violations),
        details={"premise_hits": premise_hits},
    )


def random_script(spec: DomainSpec, rng: random.Random, max_len: int = 8) -> list[ScriptStep]:
    """A random action script with channel-resolved sensing."""
    names = [a.name for a in spec.physical_actions] + [a.name for a in spec.sensing_actions]
    return [ScriptStep(rng.choice(names)) for _ in range(rng.randint(0, max_len))]


def check_introspection(
    spec: DomainSpec,
    seed: int,
    scripts: int = 1000,
    probes: list[Formula] | None = None,
    max_script_len: int = 8,
    penalty_mode: PenaltyMode = PenaltyMode.AXIOM,
) -> CheckReport:
    """Across sampled noisy runs and every generation reached: believing a
    probe entails believing that one believes it, disbelieving entails
    believing that one does not believe it, and a contradiction is never
    believed."""
    if probes is None:
        probes = literal_probes(spec)
    violations: list[CheckViolation] = []
    cases = 0
    for i in range(scripts):
        sub_seed = mix_seed(seed, i)
        script = random_script(spec, random.Random(sub_seed), max_script_len)
        script_text = tuple(s.text() if spec.is_sensing(s.action) else f"do {s.action}" for s in script)
        result = run_script(spec, script, seed=sub_seed, penalty_mode=penalty_mode)
        trace = result.trace
        for g in range(trace.num_generations):
            if bel(trace, g, FALSE):
                violations.append(
                    CheckViolation(
                        description=f"contradiction believed at generation {g}",
                        script=script_text,
                        seed=sub_seed,
                    )
                )
            for p in probes:
                cases += 1
                if bel(trace, g, p):
                    ok = bel(trace, g, Bel(p))
                    broken = "believes but does not believe that it believes"
                else:
                    ok = bel(trace, g, Not(Bel(p)))
                    broken = "disbelieves but does not believe that it disbelieves"
                if not ok:
                    violations.append(
                        CheckViolation(
                            description=f"{broken}: {render(p)} at generation {g}",
                            script=script_text,
                            seed=sub_seed,
                        )
                    )
    return CheckReport(
        check="introspection",
        cases=cases,
        bounds={
            "scripts": scripts,
            "max_script_len": max_script_len,
            "probes": len(probes),
            "penalty_mode": penalty_mode.value,
        },
        violations=tuple(violations),
    )


def check_subsumption(
    spec: DomainSpec,
    max_len: int = 5,
    probes: list[Formula] | None = None,
    penalty_mode: PenaltyMode = PenaltyMode.AXIOM,
) -> CheckReport:
    """Enumerate every error-free script up to max_len: wherever the
    baseline still has candidates, anything it believes must also be
    believed by the ranked engine."""
    if probes is None:
        probes = default_probes(spec)
    actions = list(spec.physical_actions) + list(spec.sensing_actions)
    violations: list[CheckViolation] = []
    cases = 0

    def walk(world: World, trace: EpistemicTrace, base, script: tuple[str, ...]) -> None:
        nonlocal cases
        if base.nodes:
            for p in probes:
                cases += 1
                if baseline_bel(base, p) and not bel(trace, trace.last, p):
                    violations.append(
                        CheckViolation(
                            description=f"baseline believes {render(p)} but the ranked engine does not",
                            script=script,
                            actual=dict(world.valuation),
                        )
                    )
        if len(script) >= max_len:
            return
        for act in actions:
            if isinstance(act, PhysicalAction):
                if not eval_static(act.precondition, world.valuation):
                    continue
                walk(
                    world_progress(world, act),
                    apply_physical(trace, act),
                    baseline_apply(base, act),
                    script + (f"do {act.name}",),
                )
            else:
                obs = observe(world, act, Directive.FORCE_ACCURATE)
                walk(
                    world,
                    apply_sensing(trace, act, obs.observed_bit),
                    baseline_apply(base, act, observed=obs.observed_bit),
                    script + (f"sense {act.name} accurate",),
                )

    walk(World(dict(spec.actual_initial)), init_epistemic(spec, penalty_mode), baseline_init(spec), ())
    return CheckReport(
        check="subsumption",
        cases=cases,
        bounds={
            "max_script_len": max_len,
            "probes": len(probes),
            "penalty_mode": penalty_mode.value,
        },
        violations=tuple(violations),
    )
