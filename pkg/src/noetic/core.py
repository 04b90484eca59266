"""State progression, sensed bits, and formula evaluation.

A situation is a snapshot of the world: one node in the forest grown from
the initial candidate situations, carrying a total fluent valuation and a
plausibility rank (0 = most plausible). Physical actions progress
valuations via simultaneous per-fluent assignments; sensing actions leave
valuations untouched and only produce a bit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterator

from noetic.formula import And, Atom, Bel, Const, Formula, Iff, Implies, Not, Or, Prev

if TYPE_CHECKING:  # pragma: no cover
    from noetic.dsl import PhysicalAction, SensingAction
    from noetic.engine import EpistemicTrace

Valuation = dict[str, bool]


class PreconditionError(RuntimeError):
    """A physical action's precondition is false in the given state."""


class NoGuardError(RuntimeError):
    """No guard of a sensing action fired; the spec failed validation."""


def all_valuations(fluents: tuple[str, ...] | list[str]) -> Iterator[Valuation]:
    """Every total Boolean valuation of the given fluents, in a fixed order
    (last fluent varies fastest)."""
    for bits in itertools.product((False, True), repeat=len(fluents)):
        yield dict(zip(fluents, bits))


def eval_static(formula: Formula, valuation: Valuation) -> bool:
    """Classical truth value of a domain-dependent formula in one state."""
    match formula:
        case Const(value):
            return value
        case Atom(name):
            return valuation[name]
        case Not(operand):
            return not eval_static(operand, valuation)
        case And(l, r):
            return eval_static(l, valuation) and eval_static(r, valuation)
        case Or(l, r):
            return eval_static(l, valuation) or eval_static(r, valuation)
        case Implies(l, r):
            return not eval_static(l, valuation) or eval_static(r, valuation)
        case Iff(l, r):
            return eval_static(l, valuation) == eval_static(r, valuation)
        case Bel() | Prev():
            raise ValueError(f"modal operator in state formula: {formula}")
    raise TypeError(f"not a formula node: {formula!r}")


def progress(valuation: Valuation, action: "PhysicalAction", check_precondition: bool = True) -> Valuation:
    """Apply a physical action: every effect's right-hand side reads the
    pre-state, assigned fluents update simultaneously, the rest persist."""
    if check_precondition and not eval_static(action.precondition, valuation):
        raise PreconditionError(f"precondition of '{action.name}' is false in {valuation}")
    updated = dict(valuation)
    for fluent, expr in action.effects:
        updated[fluent] = eval_static(expr, valuation)
    return updated


def sf(action: "SensingAction", valuation: Valuation) -> bool:
    """Sensed bit of the action in this state: the sensed formula of the
    first guard whose condition holds."""
    for guard, sensed in action.guards:
        if eval_static(guard, valuation):
            return eval_static(sensed, valuation)
    raise NoGuardError(f"no guard of '{action.name}' fires in {valuation}")


@dataclass(frozen=True, slots=True)
class SituationNode:
    """One situation in the forest.

    `lineage` is the node's column: generation g's node k descends from
    generation g-1's node k, so each initial situation heads one unbroken
    lineage. Ranks (`pl`) are natural numbers; 0 marks the most plausible
    candidates.
    """

    id: int
    generation: int
    lineage: int
    parent: int | None
    generating_action: str | None
    valuation: Valuation
    pl: int
    initial_label: str


@dataclass(frozen=True, slots=True)
class Observation:
    """Outcome of one sensing execution: the bit the world produced and the
    bit the agent received."""

    action: str
    true_bit: bool
    observed_bit: bool
    accurate: bool

    def __post_init__(self) -> None:
        if self.accurate != (self.true_bit == self.observed_bit):
            raise ValueError("accurate flag inconsistent with bits")


def eval_modal(formula: Formula, node: SituationNode, trace: "EpistemicTrace") -> bool:
    """Evaluate a (possibly modal) formula at one situation node.

    Bel(f) holds iff f holds at every rank-0 node of the same generation
    (all same-generation nodes are mutually epistemically accessible).
    Prev(f) holds iff the node has a predecessor and f holds there; at
    generation 0 it is false.
    """
    match formula:
        case Const(value):
            return value
        case Atom(name):
            return node.valuation[name]
        case Not(operand):
            return not eval_modal(operand, node, trace)
        case And(l, r):
            return eval_modal(l, node, trace) and eval_modal(r, node, trace)
        case Or(l, r):
            return eval_modal(l, node, trace) or eval_modal(r, node, trace)
        case Implies(l, r):
            return not eval_modal(l, node, trace) or eval_modal(r, node, trace)
        case Iff(l, r):
            return eval_modal(l, node, trace) == eval_modal(r, node, trace)
        case Bel(body):
            peers = trace.generation(node.generation)
            return all(eval_modal(body, p, trace) for p in peers if p.pl == 0)
        case Prev(body):
            if node.generation == 0:
                return False
            parent = trace.generation(node.generation - 1)[node.lineage]
            return eval_modal(body, parent, trace)
    raise TypeError(f"not a formula node: {formula!r}")
