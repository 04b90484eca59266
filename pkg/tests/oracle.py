"""Independent naive re-derivation of engine behavior, used as a test oracle.

Everything is recomputed from scratch with plain loops and full scans: the
penalty base is re-scanned from generation 0 at every sensing step, the
minimum matching rank by a pass over the whole generation, and formulas are
evaluated by a separate recursive walker. Only the data types (DomainSpec,
the formula AST) are shared with the package; none of the engine logic is.
"""

from __future__ import annotations

from noetic import formula as F
from noetic.dsl import DomainSpec, PhysicalAction, SensingAction


def evaluate(f, valuation):
    if isinstance(f, F.Const):
        return f.value
    if isinstance(f, F.Atom):
        return valuation[f.name]
    if isinstance(f, F.Not):
        return not evaluate(f.operand, valuation)
    if isinstance(f, F.And):
        return evaluate(f.left, valuation) and evaluate(f.right, valuation)
    if isinstance(f, F.Or):
        return evaluate(f.left, valuation) or evaluate(f.right, valuation)
    if isinstance(f, F.Implies):
        return (not evaluate(f.left, valuation)) or evaluate(f.right, valuation)
    if isinstance(f, F.Iff):
        return evaluate(f.left, valuation) == evaluate(f.right, valuation)
    raise TypeError(f"cannot evaluate {f!r} against a single valuation")


def find_action(spec: DomainSpec, name: str):
    for act in list(spec.physical_actions) + list(spec.sensing_actions):
        if act.name == name:
            return act
    raise KeyError(name)


def progress_valuation(valuation, action: PhysicalAction):
    assignments = {fluent: expr for fluent, expr in action.effects}
    out = {}
    for fluent in valuation:
        if fluent in assignments:
            out[fluent] = evaluate(assignments[fluent], valuation)
        else:
            out[fluent] = valuation[fluent]
    return out


def sensed_bit(action: SensingAction, valuation):
    for guard, sensed in action.guards:
        if evaluate(guard, valuation):
            return evaluate(sensed, valuation)
    raise RuntimeError(f"no guard of {action.name} fired")


def replay(spec: DomainSpec, steps, penalty_mode="axiom"):
    """Re-derive the whole forest for a list of (action name, observed bit
    or None) steps. Returns a list of generations; each generation is a list
    of {label, valuation, pl} dicts in lineage order."""
    generations = [
        [
            {"label": init.label, "valuation": dict(init.valuation), "pl": init.pl}
            for init in spec.initial_situations
        ]
    ]
    for name, observed in steps:
        action = find_action(spec, name)
        previous = generations[-1]
        if isinstance(action, PhysicalAction):
            generations.append(
                [
                    {
                        "label": e["label"],
                        "valuation": progress_valuation(e["valuation"], action),
                        "pl": e["pl"],
                    }
                    for e in previous
                ]
            )
            continue
        # penalty base: full scan of generation 0 every time
        largest_initial = 0
        for entry in generations[0]:
            if entry["pl"] > largest_initial:
                largest_initial = entry["pl"]
        bump = largest_initial + 1 if penalty_mode == "axiom" else largest_initial
        matching = [
            e["pl"] for e in previous if sensed_bit(action, e["valuation"]) == observed
        ]
        nxt = []
        for e in previous:
            if sensed_bit(action, e["valuation"]) == observed:
                pl = e["pl"] - min(matching)
            else:
                pl = e["pl"] + bump
            nxt.append({"label": e["label"], "valuation": dict(e["valuation"]), "pl": pl})
        lowest = nxt[0]["pl"]
        for entry in nxt:
            if entry["pl"] < lowest:
                lowest = entry["pl"]
        for entry in nxt:
            entry["pl"] -= lowest
        generations.append(nxt)
    return generations


def holds_at(f, generations, g, k):
    entry = generations[g][k]
    if isinstance(f, F.Const):
        return f.value
    if isinstance(f, F.Atom):
        return entry["valuation"][f.name]
    if isinstance(f, F.Not):
        return not holds_at(f.operand, generations, g, k)
    if isinstance(f, F.And):
        return holds_at(f.left, generations, g, k) and holds_at(f.right, generations, g, k)
    if isinstance(f, F.Or):
        return holds_at(f.left, generations, g, k) or holds_at(f.right, generations, g, k)
    if isinstance(f, F.Implies):
        return (not holds_at(f.left, generations, g, k)) or holds_at(f.right, generations, g, k)
    if isinstance(f, F.Iff):
        return holds_at(f.left, generations, g, k) == holds_at(f.right, generations, g, k)
    if isinstance(f, F.Bel):
        return believes(generations, g, f.body)
    if isinstance(f, F.Prev):
        return g > 0 and holds_at(f.body, generations, g - 1, k)
    raise TypeError(f"not a formula node: {f!r}")


def believes(generations, g, f):
    return all(
        holds_at(f, generations, g, k)
        for k, entry in enumerate(generations[g])
        if entry["pl"] == 0
    )


def baseline_replay(spec: DomainSpec, steps):
    """Survivor sets of the discard-based engine, one list of entries per
    step (index 0 = initial)."""
    current = [
        {"label": init.label, "valuation": dict(init.valuation), "pl": init.pl}
        for init in spec.initial_situations
    ]
    states = [current]
    for name, observed in steps:
        action = find_action(spec, name)
        if isinstance(action, PhysicalAction):
            current = [
                {
                    "label": e["label"],
                    "valuation": progress_valuation(e["valuation"], action),
                    "pl": e["pl"],
                }
                for e in current
            ]
        else:
            current = [
                dict(e) for e in current if sensed_bit(action, e["valuation"]) == observed
            ]
        states.append(current)
    return states


def baseline_believes(entries, f):
    if not entries:
        return None
    lowest = min(e["pl"] for e in entries)
    return all(evaluate(f, e["valuation"]) for e in entries if e["pl"] == lowest)


def forced_run_detections(spec: DomainSpec, seq, force_flips, cycles, penalty_mode="axiom"):
    """Replay the deterministic forced-flip experiment: the first
    `force_flips` sensing executions report the flipped bit, all later ones
    the true bit. Returns the per-cycle-end detection list."""
    world = dict(spec.actual_initial)
    generations = replay(spec, [], penalty_mode)
    sensing_done = 0
    detections = []
    steps = []
    for _ in range(cycles):
        for name in seq:
            action = find_action(spec, name)
            if isinstance(action, PhysicalAction):
                world = progress_valuation(world, action)
                steps.append((name, None))
            else:
                true_bit = sensed_bit(action, world)
                observed = (not true_bit) if sensing_done < force_flips else true_bit
                sensing_done += 1
                steps.append((name, observed))
        generations = replay(spec, steps, penalty_mode)
        detections.append(
            all(e["valuation"] == world for e in generations[-1] if e["pl"] == 0)
        )
    return detections


def first_permanent_index(detections):
    if not detections or not detections[-1]:
        return None
    idx = len(detections) - 1
    while idx > 0 and detections[idx - 1]:
        idx -= 1
    return idx
