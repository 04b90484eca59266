"""Domain descriptions: action theory types, validation, and serialization.

A domain declares Boolean fluents, physical actions (simultaneous
assignment effects plus an optional precondition), sensing actions
(guarded sensed formulas with a channel accuracy), a ranked set of initial
candidate situations, the actual initial state, and an optional default
action sequence for experiments.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from noetic.formula import (
    TRUE,
    Atom,
    Formula,
    Not,
    atoms,
    is_domain_dependent,
    render,
)

#: Most fluents a domain may declare; every exhaustive check enumerates all
#: 2**n valuations, so the cap keeps those checks tractable.
MAX_FLUENTS = 20

Valuation = dict[str, bool]


@dataclass(frozen=True)
class PhysicalAction:
    """World-changing action: each effect assigns one fluent a formula of
    the pre-state; unassigned fluents persist."""

    name: str
    effects: tuple[tuple[str, Formula], ...] = ()
    precondition: Formula = TRUE


@dataclass(frozen=True)
class SensingAction:
    """Binary sensor: the first guard formula true in the current state
    selects the sensed formula; `accuracy` is the probability the channel
    reports the true sensed bit."""

    name: str
    guards: tuple[tuple[Formula, Formula], ...]
    accuracy: float = 1.0


@dataclass(frozen=True)
class InitialSituation:
    label: str
    valuation: Valuation
    pl: int


@dataclass(frozen=True)
class DomainSpec:
    fluents: tuple[str, ...]
    physical_actions: tuple[PhysicalAction, ...] = ()
    sensing_actions: tuple[SensingAction, ...] = ()
    initial_situations: tuple[InitialSituation, ...] = ()
    actual_initial: Valuation = field(default_factory=dict)
    seq: tuple[str, ...] | None = None

    def action(self, name: str) -> PhysicalAction | SensingAction:
        for act in self.physical_actions:
            if act.name == name:
                return act
        for act in self.sensing_actions:
            if act.name == name:
                return act
        raise KeyError(f"undeclared action: {name}")

    def is_sensing(self, name: str) -> bool:
        return isinstance(self.action(name), SensingAction)


@dataclass(frozen=True)
class Issue:
    """One validation finding; `witness` is a valuation exhibiting it."""

    code: str
    message: str
    witness: Valuation | None = None


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Issue, ...]
    warnings: tuple[Issue, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _modal_issues(spec: DomainSpec) -> list[Issue]:
    places: list[tuple[Formula, str]] = []
    for act in spec.physical_actions:
        places.append((act.precondition, f"precondition of action '{act.name}'"))
        for fluent, expr in act.effects:
            places.append((expr, f"effect for fluent '{fluent}' in action '{act.name}'"))
    for act in spec.sensing_actions:
        for i, (guard, sensed) in enumerate(act.guards):
            places.append((guard, f"guard {i + 1} condition of sense '{act.name}'"))
            places.append((sensed, f"guard {i + 1} sensed formula of sense '{act.name}'"))
    return [
        Issue("modal-operator", f"modal operator in {where}: {render(f)}")
        for f, where in places
        if not is_domain_dependent(f)
    ]


def _name_issues(spec: DomainSpec) -> tuple[list[Issue], set[str]]:
    declared = set(spec.fluents)
    issues = []
    broken: set[str] = set()
    for act in spec.physical_actions:
        used = atoms(act.precondition)
        for fluent, expr in act.effects:
            used |= atoms(expr) | {fluent}
        for name in sorted(used - declared):
            issues.append(Issue("undeclared-name", f"action '{act.name}' mentions undeclared fluent '{name}'"))
            broken.add(act.name)
    for act in spec.sensing_actions:
        used: set[str] = set()
        for guard, sensed in act.guards:
            used |= atoms(guard) | atoms(sensed)
        for name in sorted(used - declared):
            issues.append(Issue("undeclared-name", f"sense '{act.name}' mentions undeclared fluent '{name}'"))
            broken.add(act.name)
    return issues, broken


def validate_domain(spec: DomainSpec) -> ValidationReport:
    """Check the rules a well-formed theory must satisfy.

    Violations: no rank-0 initial situation, non-exhaustive sensing guards
    (with a witness valuation), modal operators in domain formulas,
    undeclared fluent references, and unknown seq action names. Overlapping
    guards that disagree about the sensed bit somewhere are reported as a
    warning (the first true guard wins at runtime).
    """
    from noetic.core import all_valuations, eval_static

    violations: list[Issue] = []
    warnings: list[Issue] = []

    if not any(init.pl == 0 for init in spec.initial_situations):
        violations.append(Issue("no-zero-pl-initial", "no initial situation with pl = 0"))

    violations.extend(_modal_issues(spec))
    name_issues, broken = _name_issues(spec)
    violations.extend(name_issues)

    if spec.seq:
        known = {a.name for a in spec.physical_actions} | {a.name for a in spec.sensing_actions}
        for name in spec.seq:
            if name not in known:
                violations.append(Issue("unknown-seq-action", f"seq references undeclared action '{name}'"))

    if len(spec.fluents) <= MAX_FLUENTS:
        for act in spec.sensing_actions:
            if act.name in broken or not all(
                is_domain_dependent(g) and is_domain_dependent(s) for g, s in act.guards
            ):
                continue
            for v in all_valuations(spec.fluents):
                fired = [eval_static(sensed, v) for guard, sensed in act.guards if eval_static(guard, v)]
                if not fired:
                    violations.append(
                        Issue(
                            "guards-not-exhaustive",
                            f"guards of sense '{act.name}' cover no case for some state",
                            witness=dict(v),
                        )
                    )
                    break
                if any(bit != fired[0] for bit in fired[1:]):
                    warnings.append(
                        Issue(
                            "ambiguous-guards",
                            f"sense '{act.name}' has simultaneously true guards that disagree",
                            witness=dict(v),
                        )
                    )
                    break

    return ValidationReport(tuple(violations), tuple(warnings))


def _bool(value: bool) -> str:
    return "true" if value else "false"


def serialize_domain(spec: DomainSpec) -> str:
    """Render the domain in its textual format; parsing the result yields a
    structurally equal DomainSpec."""
    lines: list[str] = []
    if spec.fluents:
        lines.append("fluent " + ", ".join(spec.fluents) + ";")
    for act in spec.physical_actions:
        parts = []
        if act.precondition != TRUE:
            parts.append(f"poss {render(act.precondition)};")
        parts.extend(f"{fluent} := {render(expr)};" for fluent, expr in act.effects)
        body = " ".join(parts)
        lines.append(f"action {act.name} {{ {body} }}" if body else f"action {act.name} {{ }}")
    for act in spec.sensing_actions:
        guards = " ".join(
            f"guard {render(guard)} senses {render(sensed)};" for guard, sensed in act.guards
        )
        lines.append(f"sense {act.name} accuracy={act.accuracy!r} {{ {guards} }}")
    for init in spec.initial_situations:
        assigns = " ".join(f"{f}={_bool(init.valuation[f])};" for f in spec.fluents)
        body = f"pl={init.pl};" + (" " + assigns if assigns else "")
        lines.append(f"init {init.label} {{ {body} }}")
    assigns = " ".join(f"{f}={_bool(spec.actual_initial[f])};" for f in spec.fluents)
    lines.append(f"actual {{ {assigns} }}" if assigns else "actual { }")
    if spec.seq:
        lines.append("seq " + ", ".join(spec.seq) + ";")
    return "\n".join(lines) + "\n"


def domain_digest(spec: DomainSpec) -> str:
    """Stable content hash of the domain (over its canonical text)."""
    return hashlib.sha256(serialize_domain(spec).encode()).hexdigest()


def literal_probes(spec: DomainSpec) -> list[Formula]:
    """Positive and negative literals for every declared fluent."""
    probes: list[Formula] = []
    for f in spec.fluents:
        probes.append(Atom(f))
        probes.append(Not(Atom(f)))
    return probes
