"""World simulation and the noisy sensing channel.

The actual world progresses only under physical actions; sensing reads a
bit off it and pushes that bit (possibly flipped, per the channel's
accuracy) into the agent's engine. Everything stochastic is driven by
explicit seeds: a run consumes one generator, an experiment derives one
sub-seed per cycle with a SplitMix64-style mixer so results are identical
no matter how cycles are scheduled.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field

from noetic.core import Observation, Valuation, eval_static, progress, sf
from noetic.dsl import (
    DomainSpec,
    PhysicalAction,
    SensingAction,
    domain_digest,
    literal_probes,
)
from noetic.engine import (
    BaselineState,
    EpistemicTrace,
    PenaltyMode,
    apply_physical,
    apply_sensing,
    baseline_apply,
    baseline_init,
    bel,
    init_epistemic,
)
from noetic.formula import Formula, is_domain_dependent, render
from noetic.parser import ParseError

_GAMMA = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1


def mix_seed(master: int, index: int) -> int:
    """Derive a 64-bit sub-seed from (master seed, unit index).

    SplitMix64 finalizer applied to master advanced by (index+1) increments
    of the golden-gamma constant; adjacent indices give statistically
    independent streams.
    """
    z = (master + (index + 1) * _GAMMA) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class Directive(enum.Enum):
    """How a script step resolves the observed bit of a sensing action."""

    CHANNEL = "channel"  # draw accuracy from the action's channel
    FORCE_ACCURATE = "accurate"
    FORCE_FLIP = "flip"
    FORCE_OBSERVED = "observed"  # deliver a literal bit


@dataclass(frozen=True, slots=True)
class ScriptStep:
    action: str
    directive: Directive = Directive.CHANNEL
    observed: bool | None = None  # only with FORCE_OBSERVED

    def text(self) -> str:
        """The step in script-file syntax."""
        if self.directive is Directive.FORCE_OBSERVED:
            return f"sense {self.action} obs={int(bool(self.observed))}"
        if self.directive is Directive.CHANNEL:
            return f"sense {self.action}"
        return f"sense {self.action} {self.directive.value}"


@dataclass(frozen=True, slots=True)
class World:
    """The actual state of the environment, unknown to the agent."""

    valuation: Valuation
    step: int = 0


def world_progress(world: World, action: PhysicalAction) -> World:
    """Execute a physical action for real; the precondition must hold."""
    return World(progress(world.valuation, action, check_precondition=True), world.step + 1)


def observe(
    world: World,
    action: SensingAction,
    directive: Directive = Directive.CHANNEL,
    rng: random.Random | None = None,
    accuracy: float | None = None,
    forced_bit: bool | None = None,
) -> Observation:
    """One sensing execution against the actual world.

    CHANNEL delivers the true bit with the action's accuracy (or the given
    override) using `rng`; the forcing directives bypass the channel.
    """
    true_bit = sf(action, world.valuation)
    if directive is Directive.CHANNEL:
        if rng is None:
            raise ValueError("channel sensing needs an rng")
        p = action.accuracy if accuracy is None else accuracy
        observed = true_bit if rng.random() < p else not true_bit
    elif directive is Directive.FORCE_ACCURATE:
        observed = true_bit
    elif directive is Directive.FORCE_FLIP:
        observed = not true_bit
    else:
        if forced_bit is None:
            raise ValueError("FORCE_OBSERVED needs a bit")
        observed = forced_bit
    return Observation(action.name, true_bit, observed, observed == true_bit)


def parse_script(text: str) -> list[ScriptStep]:
    """Parse a script file: one step per line, either `do <action>` or
    `sense <action> [accurate|flip|obs=0|obs=1]`; `#` comments."""
    steps: list[ScriptStep] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "do" and len(parts) == 2:
            steps.append(ScriptStep(parts[1]))
        elif parts[0] == "sense" and len(parts) in (2, 3):
            if len(parts) == 2:
                steps.append(ScriptStep(parts[1], Directive.CHANNEL))
            elif parts[2] == "accurate":
                steps.append(ScriptStep(parts[1], Directive.FORCE_ACCURATE))
            elif parts[2] == "flip":
                steps.append(ScriptStep(parts[1], Directive.FORCE_FLIP))
            elif parts[2] in ("obs=0", "obs=1"):
                steps.append(ScriptStep(parts[1], Directive.FORCE_OBSERVED, parts[2] == "obs=1"))
            else:
                raise ParseError(f"unknown sensing directive {parts[2]!r}", lineno, 1)
        else:
            raise ParseError(f"malformed script step {line!r}", lineno, 1)
    return steps


@dataclass(frozen=True)
class StepRecord:
    index: int
    action: str | None
    kind: str  # "init" | "physical" | "sensing"
    observation: Observation | None
    world: Valuation
    ranks: dict[str, int]  # initial label -> rank, current generation
    beliefs: dict[str, bool]  # probe text -> believed
    baseline_status: str | None
    baseline_survivors: tuple[str, ...] | None


@dataclass
class RunTrace:
    """Full record of one scripted run, replayable bit for bit from
    (domain, script, seed)."""

    seed: int
    penalty_mode: PenaltyMode
    domain_hash: str
    steps: list[StepRecord]
    trace: EpistemicTrace = field(repr=False)
    world: World = field(repr=False)
    baseline: BaselineState | None = field(default=None, repr=False)


def _record(
    index: int,
    action: str | None,
    kind: str,
    obs: Observation | None,
    world: World,
    trace: EpistemicTrace,
    baseline: BaselineState | None,
    probes: list[Formula],
) -> StepRecord:
    nodes = trace.current()
    return StepRecord(
        index=index,
        action=action,
        kind=kind,
        observation=obs,
        world=dict(world.valuation),
        ranks={n.initial_label: n.pl for n in nodes},
        beliefs={render(p): bel(trace, trace.last, p) for p in probes},
        baseline_status=None if baseline is None else baseline.status.value,
        baseline_survivors=None if baseline is None else tuple(n.initial_label for n in baseline.nodes),
    )


def run_script(
    spec: DomainSpec,
    script: list[ScriptStep],
    seed: int = 0,
    penalty_mode: PenaltyMode = PenaltyMode.AXIOM,
    compare: bool = False,
    probes: list[Formula] | None = None,
) -> RunTrace:
    """Step the world and the engine (plus, optionally, the baseline) in
    lockstep through the script. Deterministic given the seed."""
    if probes is None:
        probes = literal_probes(spec)
    rng = random.Random(mix_seed(seed, 0))
    trace = init_epistemic(spec, penalty_mode)
    baseline = baseline_init(spec) if compare else None
    world = World(dict(spec.actual_initial))
    steps = [_record(0, None, "init", None, world, trace, baseline, probes)]
    for i, step in enumerate(script, start=1):
        act = spec.action(step.action)
        if isinstance(act, PhysicalAction):
            world = world_progress(world, act)
            trace = apply_physical(trace, act)
            if baseline is not None:
                baseline = baseline_apply(baseline, act)
            steps.append(_record(i, act.name, "physical", None, world, trace, baseline, probes))
        else:
            obs = observe(world, act, step.directive, rng, forced_bit=step.observed)
            trace = apply_sensing(trace, act, obs.observed_bit)
            if baseline is not None:
                baseline = baseline_apply(baseline, act, observed=obs.observed_bit)
            steps.append(_record(i, act.name, "sensing", obs, world, trace, baseline, probes))
    return RunTrace(
        seed=seed,
        penalty_mode=penalty_mode,
        domain_hash=domain_digest(spec),
        steps=steps,
        trace=trace,
        world=world,
        baseline=baseline,
    )


def detection(trace: EpistemicTrace, generation: int, world: World) -> bool:
    """True iff every rank-0 candidate of the generation agrees with the
    actual world on every fluent."""
    return all(
        n.valuation == world.valuation for n in trace.generation(generation) if n.pl == 0
    )


class Scope(enum.Enum):
    """Candidate pool for the sensing-sensitivity check."""

    ALL_VALUATIONS = "all"
    DECLARED_INITIALS = "initials"


def check_sensing_sensitive(
    spec: DomainSpec,
    seq: tuple[str, ...] | list[str],
    scope: Scope = Scope.ALL_VALUATIONS,
) -> tuple[bool, Valuation | None]:
    """Would an error-free execution of `seq` pin down the actual state?

    Runs the sequence from every candidate initial state, collecting the
    bits each sensing action would return. True iff the actual state's bit
    trace is unique to states equal to it; otherwise returns a confounding
    witness valuation.
    """
    from noetic.core import all_valuations

    actions = [spec.action(name) for name in seq]

    def bit_trace(start: Valuation) -> tuple[bool, ...]:
        v = dict(start)
        bits = []
        for act in actions:
            if isinstance(act, SensingAction):
                bits.append(sf(act, v))
            else:
                v = progress(v, act, check_precondition=False)
        return tuple(bits)

    reference = bit_trace(spec.actual_initial)
    if scope is Scope.ALL_VALUATIONS:
        candidates = all_valuations(spec.fluents)
    else:
        candidates = (init.valuation for init in spec.initial_situations)
    for candidate in candidates:
        if candidate == spec.actual_initial:
            continue
        if bit_trace(candidate) == reference:
            return False, dict(candidate)
    return True, None


@dataclass
class ExperimentStats:
    """Aggregated results of a repeated-sequence run."""

    cycles: int
    seq: tuple[str, ...]
    accuracies: dict[str, float]  # effective accuracy per sensing action
    seed: int
    penalty_mode: PenaltyMode
    sensing_sensitive: bool
    bound: float  # product of accuracies over sensing steps of seq
    detections: list[bool]  # one per cycle end
    detection_fraction: float
    flips: int  # noisy sensing executions that occurred
    probe_agreement: dict[str, float]
    forced_flips: int = 0
    first_permanent_cycle: int | None = None
    per_step_detections: list[bool] | None = None
    step_fraction_all: float | None = None
    step_fraction_sensing: float | None = None


def _effective_accuracy(action: SensingAction, overrides: dict[str, float] | None) -> float:
    if overrides:
        if action.name in overrides:
            return overrides[action.name]
        if "all" in overrides:
            return overrides["all"]
    return action.accuracy


def _first_permanent(detections: list[bool]) -> int | None:
    if not detections or not detections[-1]:
        return None
    idx = len(detections) - 1
    while idx > 0 and detections[idx - 1]:
        idx -= 1
    return idx


def convergence_experiment(
    spec: DomainSpec,
    seq: tuple[str, ...] | list[str],
    cycles: int,
    seed: int,
    accuracy_overrides: dict[str, float] | None = None,
    probes: list[Formula] | None = None,
    penalty_mode: PenaltyMode = PenaltyMode.AXIOM,
    per_step: bool = False,
    force_flips: int = 0,
) -> ExperimentStats:
    """Run `seq` repeatedly against a noisy channel and measure how often
    the agent has detected the actual state at each cycle end.

    With force_flips=k the channel is replaced by a deterministic schedule:
    the first k sensing executions flip, all later ones are accurate; the
    run then also reports the first cycle index from which detection holds
    through the end of the horizon.
    """
    if cycles <= 0:
        raise ValueError("cycles must be positive")
    seq = tuple(seq)
    actions = [spec.action(name) for name in seq]
    sensing_in_seq = [a for a in actions if isinstance(a, SensingAction)]
    if probes is None:
        probes = literal_probes(spec)
    for p in probes:
        if not is_domain_dependent(p):
            raise ValueError(f"experiment probes must be domain-dependent: {render(p)}")

    bound = 1.0
    for act in sensing_in_seq:
        bound *= _effective_accuracy(act, accuracy_overrides)
    sensitive, _ = check_sensing_sensitive(spec, seq)

    trace = init_epistemic(spec, penalty_mode)
    world = World(dict(spec.actual_initial))
    detections: list[bool] = []
    step_dets: list[bool] = []
    step_is_sensing: list[bool] = []
    agree = {render(p): 0 for p in probes}
    flips = 0
    sensing_done = 0

    for cycle in range(cycles):
        rng = random.Random(mix_seed(seed, cycle))
        for act in actions:
            if isinstance(act, PhysicalAction):
                world = world_progress(world, act)
                trace = apply_physical(trace, act)
            else:
                if force_flips:
                    directive = (
                        Directive.FORCE_FLIP if sensing_done < force_flips else Directive.FORCE_ACCURATE
                    )
                    obs = observe(world, act, directive)
                else:
                    obs = observe(
                        world, act, Directive.CHANNEL, rng,
                        accuracy=_effective_accuracy(act, accuracy_overrides),
                    )
                sensing_done += 1
                flips += 0 if obs.accurate else 1
                trace = apply_sensing(trace, act, obs.observed_bit)
            if per_step:
                step_dets.append(detection(trace, trace.last, world))
                step_is_sensing.append(isinstance(act, SensingAction))
        detections.append(detection(trace, trace.last, world))
        for p in probes:
            if bel(trace, trace.last, p) == eval_static(p, world.valuation):
                agree[render(p)] += 1

    stats = ExperimentStats(
        cycles=cycles,
        seq=seq,
        accuracies={a.name: _effective_accuracy(a, accuracy_overrides) for a in spec.sensing_actions},
        seed=seed,
        penalty_mode=penalty_mode,
        sensing_sensitive=sensitive,
        bound=bound,
        detections=detections,
        detection_fraction=sum(detections) / cycles,
        flips=flips,
        probe_agreement={k: v / cycles for k, v in agree.items()},
        forced_flips=force_flips,
        first_permanent_cycle=_first_permanent(detections),
    )
    if per_step:
        stats.per_step_detections = step_dets
        stats.step_fraction_all = sum(step_dets) / len(step_dets) if step_dets else 0.0
        sensing_only = [d for d, s in zip(step_dets, step_is_sensing) if s]
        stats.step_fraction_sensing = (
            sum(sensing_only) / len(sensing_only) if sensing_only else 0.0
        )
    return stats


def accuracy_sweep(
    spec: DomainSpec,
    seq: tuple[str, ...] | list[str],
    accuracies: list[float],
    cycles: int,
    seed: int,
    probes: list[Formula] | None = None,
    penalty_mode: PenaltyMode = PenaltyMode.AXIOM,
) -> list[ExperimentStats]:
    """One experiment per accuracy level, every sensing action overridden to
    that level. The same master seed is reused so levels share channel
    draws (common random numbers)."""
    return [
        convergence_experiment(
            spec,
            seq,
            cycles=cycles,
            seed=seed,
            accuracy_overrides={"all": a},
            probes=probes,
            penalty_mode=penalty_mode,
        )
        for a in accuracies
    ]
