"""Ranked situation forest: the agent's evolving belief state.

The primary engine never discards a candidate situation. Every action maps
the whole current generation forward, one child per node. Physical actions
progress valuations and keep ranks. A sensing action with observed bit b
re-ranks the children: nodes whose sensed bit equals b drop by the minimum
rank among such matching nodes (so the best matcher lands at 0), nodes that
contradict b are pushed up by a penalty derived from the largest initial
rank. If nothing matches, every child is penalized and the generation is
shifted back down so that rank 0 stays inhabited. Consequence: the agent
always believes something consistent, even after contradictory readings.

The baseline engine implements the classical alternative for comparison:
ranks are frozen and sensing simply discards contradicting candidates,
which can leave the agent with no candidates at all (Inconsistent).

Both engines are values: apply_* functions return new states and never
mutate their inputs, so states can be shared freely across threads and
reused as branch points when enumerating action sequences.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from noetic.core import (
    PreconditionError,
    SituationNode,
    eval_modal,
    eval_static,
    progress,
    sf,
)
from noetic.dsl import DomainSpec, PhysicalAction, SensingAction
from noetic.formula import Formula


class PenaltyMode(enum.Enum):
    """Rank increment for candidates contradicting an observation.

    AXIOM adds one more than the largest initial rank; COMPAT adds exactly
    the largest initial rank. AXIOM is the default; COMPAT exists because
    the two conventions produce different (both defensible) rank
    trajectories and downstream tooling may expect either.
    """

    AXIOM = "axiom"
    COMPAT = "compat"


@dataclass(frozen=True, slots=True)
class _Link:
    """Persistent cons cell: one generation plus the chain before it."""

    nodes: tuple[SituationNode, ...]
    prev: "_Link | None"


@dataclass(frozen=True, eq=False)
class EpistemicTrace:
    """Immutable forest of candidate situations, one generation per action
    performed. All nodes of a generation are mutually accessible; beliefs
    quantify over its rank-0 nodes."""

    spec: DomainSpec
    penalty_mode: PenaltyMode
    max_initial_pl: int
    width: int
    num_generations: int
    _head: _Link

    @property
    def last(self) -> int:
        """Index of the newest generation."""
        return self.num_generations - 1

    def current(self) -> tuple[SituationNode, ...]:
        return self._head.nodes

    def generation(self, g: int) -> tuple[SituationNode, ...]:
        if not 0 <= g < self.num_generations:
            raise IndexError(f"no generation {g} (trace has {self.num_generations})")
        link = self._head
        for _ in range(self.num_generations - 1 - g):
            assert link.prev is not None
            link = link.prev
        return link.nodes

    def all_generations(self) -> list[tuple[SituationNode, ...]]:
        out: list[tuple[SituationNode, ...]] = []
        link: _Link | None = self._head
        while link is not None:
            out.append(link.nodes)
            link = link.prev
        out.reverse()
        return out

    def _extend(self, nodes: tuple[SituationNode, ...]) -> "EpistemicTrace":
        return EpistemicTrace(
            spec=self.spec,
            penalty_mode=self.penalty_mode,
            max_initial_pl=self.max_initial_pl,
            width=self.width,
            num_generations=self.num_generations + 1,
            _head=_Link(nodes, self._head),
        )


def init_epistemic(spec: DomainSpec, penalty_mode: PenaltyMode = PenaltyMode.AXIOM) -> EpistemicTrace:
    """Generation 0: the declared initial situations with their declared
    ranks. The mismatch penalty base is fixed here as the largest initial
    rank and never recomputed."""
    if not any(init.pl == 0 for init in spec.initial_situations):
        raise ValueError("no initial situation with pl = 0")
    nodes = tuple(
        SituationNode(
            id=k,
            generation=0,
            lineage=k,
            parent=None,
            generating_action=None,
            valuation=dict(init.valuation),
            pl=init.pl,
            initial_label=init.label,
        )
        for k, init in enumerate(spec.initial_situations)
    )
    return EpistemicTrace(
        spec=spec,
        penalty_mode=penalty_mode,
        max_initial_pl=max(init.pl for init in spec.initial_situations),
        width=len(nodes),
        num_generations=1,
        _head=_Link(nodes, None),
    )


def _resolve_physical(spec: DomainSpec, action: PhysicalAction | str) -> PhysicalAction:
    act = spec.action(action) if isinstance(action, str) else action
    if not isinstance(act, PhysicalAction):
        raise TypeError(f"'{act.name}' is not a physical action")
    return act


def _resolve_sensing(spec: DomainSpec, action: SensingAction | str) -> SensingAction:
    act = spec.action(action) if isinstance(action, str) else action
    if not isinstance(act, SensingAction):
        raise TypeError(f"'{act.name}' is not a sensing action")
    return act


def _children(
    trace_width: int,
    parents: tuple[SituationNode, ...],
    action_name: str,
    valuations: list[dict],
    ranks: list[int],
) -> tuple[SituationNode, ...]:
    g = parents[0].generation + 1
    base = g * trace_width
    return tuple(
        SituationNode(
            id=base + k,
            generation=g,
            lineage=k,
            parent=p.id,
            generating_action=action_name,
            valuation=valuations[k],
            pl=ranks[k],
            initial_label=p.initial_label,
        )
        for k, p in enumerate(parents)
    )


def apply_physical(trace: EpistemicTrace, action: PhysicalAction | str, strict: bool = False) -> EpistemicTrace:
    """Progress every candidate by the action; ranks carry over unchanged.

    Candidates where the precondition fails still progress by the effect
    rule (the agent entertains them regardless); pass strict=True to raise
    instead.
    """
    act = _resolve_physical(trace.spec, action)
    parents = trace.current()
    if strict:
        for node in parents:
            if not eval_static(act.precondition, node.valuation):
                raise PreconditionError(
                    f"precondition of '{act.name}' is false in candidate '{node.initial_label}'"
                )
    valuations = [progress(n.valuation, act, check_precondition=False) for n in parents]
    ranks = [n.pl for n in parents]
    return trace._extend(_children(trace.width, parents, act.name, valuations, ranks))


def _rank_after_match(pl: int, min_matching: int) -> int:
    # Matching candidates drop together; the best matcher lands at rank 0.
    return pl - min_matching


def _normalize(ranks: list[int]) -> list[int]:
    # Keep rank 0 inhabited. A no-op whenever at least one candidate
    # matched the observation.
    base = min(ranks)
    return [r - base for r in ranks] if base else ranks


def apply_sensing(trace: EpistemicTrace, action: SensingAction | str, observed: bool) -> EpistemicTrace:
    """Re-rank candidates against an observed bit; no candidate is dropped.

    A candidate matches when its sensed bit equals the observed bit.
    Matching candidates drop by the minimum rank among matchers;
    contradicting ones are penalized by the largest initial rank (plus one
    in AXIOM mode). When no candidate matches, all are penalized and the
    generation is renormalized so the minimum rank is 0 again.
    """
    act = _resolve_sensing(trace.spec, action)
    parents = trace.current()
    penalty = trace.max_initial_pl + (1 if trace.penalty_mode is PenaltyMode.AXIOM else 0)
    matches = [sf(act, n.valuation) == observed for n in parents]
    if any(matches):
        min_matching = min(n.pl for n, m in zip(parents, matches) if m)
        raw = [
            _rank_after_match(n.pl, min_matching) if m else n.pl + penalty
            for n, m in zip(parents, matches)
        ]
    else:
        raw = [n.pl + penalty for n in parents]
    ranks = _normalize(raw)
    valuations = [n.valuation for n in parents]  # sensing changes no fluents
    return trace._extend(_children(trace.width, parents, act.name, valuations, ranks))


def most_plausible(trace: EpistemicTrace, generation: int) -> tuple[SituationNode, ...]:
    """All rank-0 nodes of the generation; never empty."""
    return tuple(n for n in trace.generation(generation) if n.pl == 0)


def bel(trace: EpistemicTrace, generation: int, formula: Formula) -> bool:
    """True iff the formula holds at every rank-0 node of the generation.
    Accepts modal formulas (Bel/Prev) as well as plain state formulas."""
    return all(eval_modal(formula, n, trace) for n in most_plausible(trace, generation))


# --------------------------------------------------------------------------
# Baseline engine: frozen ranks, sensing discards contradicting candidates.
# --------------------------------------------------------------------------


class BaselineStatus(enum.Enum):
    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"


@dataclass(frozen=True, eq=False)
class BaselineState:
    """Surviving candidates under discard-on-mismatch sensing. Ranks are
    inherited down each lineage and never change."""

    spec: DomainSpec
    nodes: tuple[SituationNode, ...]
    generation: int
    width: int

    @property
    def status(self) -> BaselineStatus:
        return BaselineStatus.CONSISTENT if self.nodes else BaselineStatus.INCONSISTENT


def baseline_init(spec: DomainSpec) -> BaselineState:
    nodes = tuple(
        SituationNode(
            id=k,
            generation=0,
            lineage=k,
            parent=None,
            generating_action=None,
            valuation=dict(init.valuation),
            pl=init.pl,
            initial_label=init.label,
        )
        for k, init in enumerate(spec.initial_situations)
    )
    return BaselineState(spec=spec, nodes=nodes, generation=0, width=len(nodes))


def baseline_apply(
    state: BaselineState,
    action: PhysicalAction | SensingAction | str,
    observed: bool | None = None,
) -> BaselineState:
    """Step the baseline: physical actions progress all survivors; a sensing
    action discards survivors whose sensed bit differs from the observed
    bit. An empty survivor set is a state (Inconsistent), not an error."""
    act = state.spec.action(action) if isinstance(action, str) else action
    g = state.generation + 1
    base = g * state.width
    survivors: list[SituationNode] = []
    for node in state.nodes:
        if isinstance(act, PhysicalAction):
            valuation = progress(node.valuation, act, check_precondition=False)
        else:
            if observed is None:
                raise ValueError(f"sensing action '{act.name}' needs an observed bit")
            if sf(act, node.valuation) != observed:
                continue
            valuation = node.valuation
        survivors.append(
            SituationNode(
                id=base + node.lineage,
                generation=g,
                lineage=node.lineage,
                parent=node.id,
                generating_action=act.name,
                valuation=valuation,
                pl=node.pl,
                initial_label=node.initial_label,
            )
        )
    return BaselineState(spec=state.spec, nodes=tuple(survivors), generation=g, width=state.width)


def baseline_bel(state: BaselineState, formula: Formula) -> bool | None:
    """True/False per the minimal-rank survivors; None when the state is
    Inconsistent (every query would be vacuously true)."""
    if not state.nodes:
        return None
    min_pl = min(n.pl for n in state.nodes)
    return all(eval_static(formula, n.valuation) for n in state.nodes if n.pl == min_pl)
