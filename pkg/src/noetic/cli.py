"""Command-line interface.

Commands: validate | run | experiment | check | compare. Every stochastic
command takes a 64-bit seed (flag `--seed`, fallback env NOETIC_SEED) and
produces byte-identical artifacts for identical inputs, flags, and seed.
Exit codes: 0 success; 1 validation or property-check failure; 2 usage,
IO, or parse errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from noetic.core import PreconditionError, Valuation
from noetic.dsl import DomainSpec, ValidationReport, domain_digest, validate_domain
from noetic.engine import PenaltyMode
from noetic.formula import Formula, render
from noetic.parser import ParseError, parse_domain, parse_formula
from noetic.sim import (
    ExperimentStats,
    RunTrace,
    ScriptStep,
    accuracy_sweep,
    check_sensing_sensitive,
    convergence_experiment,
    parse_script,
    run_script,
)
from noetic.theorems import (
    CheckReport,
    CheckViolation,
    check_error_awareness,
    check_introspection,
    check_revision,
    check_subsumption,
    find_revision_action,
)

SEED_ENV = "NOETIC_SEED"


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="noetic", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, seed: bool = True) -> None:
        p.add_argument("domain", help="domain description file")
        p.add_argument("--penalty-mode", choices=["axiom", "compat"], default="axiom",
                       help="mismatch penalty convention (default: axiom)")
        if seed:
            p.add_argument("--seed", type=int, default=None,
                           help=f"64-bit seed (default: ${SEED_ENV})")
        p.add_argument("--json", metavar="PATH", default=None, help="write JSON artifact")
        p.add_argument("--csv", metavar="PATH", default=None, help="write CSV artifact")

    p = sub.add_parser("validate", help="check a domain description")
    p.add_argument("domain")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="run a script against a domain")
    common(p)
    p.add_argument("--script", metavar="PATH", help="script file")
    p.add_argument("--seq", metavar="A,B,C", help="inline action sequence (channel sensing)")
    p.add_argument("--compare", action="store_true", help="also run the discard-based baseline")
    p.add_argument("--probe", action="append", default=[], metavar="FORMULA",
                   help="belief probe (repeatable; default: fluent literals)")
    p.set_defaults(func=cmd_run, side_by_side=False)

    p = sub.add_parser("compare", help="side-by-side run of both engines")
    common(p)
    p.add_argument("--script", metavar="PATH")
    p.add_argument("--seq", metavar="A,B,C")
    p.add_argument("--probe", action="append", default=[], metavar="FORMULA")
    p.set_defaults(func=cmd_run, compare=True, side_by_side=True)

    p = sub.add_parser("experiment", help="repeated-sequence convergence experiment")
    common(p)
    p.add_argument("--seq", metavar="A,B,C", help="cycle sequence (default: the domain's seq)")
    p.add_argument("--cycles", type=int, default=10000)
    p.add_argument("--accuracy", action="append", default=[], metavar="NAME=P",
                   help="override sensing accuracy ('all=0.9' for every action)")
    p.add_argument("--sweep", metavar="P1,P2,...", help="run once per accuracy level")
    p.add_argument("--per-step", action="store_true", help="record detection at every step")
    p.add_argument("--corollary-flips", type=int, default=0, metavar="K",
                   help="force the first K sensing executions to flip, all later accurate")
    p.add_argument("--probe", action="append", default=[], metavar="FORMULA")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("check", help="run the property-check suite")
    common(p)
    p.add_argument("--scripts", type=int, default=1000, help="sampled scripts for introspection")
    p.add_argument("--max-len", type=int, default=4, help="script bound for revision checks")
    p.add_argument("--subsumption-len", type=int, default=5, help="script bound for subsumption")
    p.add_argument("--formula", action="append", default=[], metavar="FORMULA",
                   help="revision target (repeatable; default: literals with a matching sensor)")
    p.set_defaults(func=cmd_check)

    return top


# -- helpers ----------------------------------------------------------------


class CliError(Exception):
    def __init__(self, message: str, code: int = 2):
        super().__init__(message)
        self.code = code


def _load_domain(path: str) -> DomainSpec:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise CliError(f"{path}: {e.strerror or e}") from e
    try:
        return parse_domain(text)
    except ParseError as e:
        raise CliError(f"{path}:{e.line}:{e.column}: {e.message}") from e


def _require_valid(path: str, spec: DomainSpec) -> None:
    report = validate_domain(spec)
    if not report.ok:
        print(_validation_text(path, report), end="")
        raise CliError(f"{path}: domain failed validation", code=1)


def _resolve_seed(args, required: bool) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise CliError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    if required:
        raise CliError(f"this command is stochastic: pass --seed or set ${SEED_ENV}")
    return 0


def _parse_probes(args, spec: DomainSpec) -> list[Formula] | None:
    if not args.probe:
        return None
    try:
        return [parse_formula(text, spec.fluents) for text in args.probe]
    except ParseError as e:
        raise CliError(f"--probe: {e}") from e


def _script_steps(args, spec: DomainSpec, path: str) -> list[ScriptStep]:
    if bool(args.script) == bool(args.seq):
        raise CliError("exactly one of --script and --seq is required")
    if args.script:
        try:
            return parse_script(Path(args.script).read_text())
        except OSError as e:
            raise CliError(f"{args.script}: {e.strerror or e}") from e
        except ParseError as e:
            raise CliError(f"{args.script}:{e.line}: {e.message}") from e
    steps = []
    for name in args.seq.split(","):
        name = name.strip()
        if not name:
            raise CliError("--seq has an empty action name")
        steps.append(ScriptStep(name))
    return steps


def _meta(seed: int | None, spec: DomainSpec, mode: PenaltyMode) -> dict:
    return {"seed": seed, "domain_hash": domain_digest(spec), "mode": mode.value}


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _csv_text(header: list[str], rows: list[list[object]]) -> str:
    def cell(v: object) -> str:
        if v is None:
            return ""
        if isinstance(v, bool):
            return str(int(v))
        return str(v)

    lines = [",".join(header)]
    lines.extend(",".join(cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _fmt_valuation(v: Valuation) -> str:
    return " ".join(f"{name}={int(value)}" for name, value in v.items())


# -- validate ----------------------------------------------------------------


def _validation_text(path: str, report: ValidationReport) -> str:
    lines = []
    for issue in report.violations:
        suffix = f" (witness: {_fmt_valuation(issue.witness)})" if issue.witness else ""
        lines.append(f"{path}: violation[{issue.code}] {issue.message}{suffix}")
    for issue in report.warnings:
        suffix = f" (witness: {_fmt_valuation(issue.witness)})" if issue.witness else ""
        lines.append(f"{path}: warning[{issue.code}] {issue.message}{suffix}")
    verdict = "OK" if report.ok else "INVALID"
    lines.append(f"{path}: {verdict} ({len(report.violations)} violations, {len(report.warnings)} warnings)")
    return "\n".join(lines) + "\n"


def cmd_validate(args) -> int:
    spec = _load_domain(args.domain)
    report = validate_domain(spec)
    print(_validation_text(args.domain, report), end="")
    return 0 if report.ok else 1


# -- run / compare -----------------------------------------------------------


def _trace_json(result: RunTrace) -> dict:
    steps = []
    for rec in result.steps:
        nodes = result.trace.generation(rec.index)
        steps.append(
            {
                "i": rec.index,
                "action": rec.action,
                "kind": rec.kind,
                "observed": None if rec.observation is None else rec.observation.observed_bit,
                "accurate": None if rec.observation is None else rec.observation.accurate,
                "world": rec.world,
                "situations": [
                    {"id": n.id, "parent": n.parent, "pl": n.pl, "valuation": n.valuation}
                    for n in nodes
                ],
                "beliefs": rec.beliefs,
                "baseline": None
                if rec.baseline_status is None
                else {"status": rec.baseline_status, "survivors": list(rec.baseline_survivors or ())},
            }
        )
    return {"meta": _meta(result.seed, result.trace.spec, result.penalty_mode), "steps": steps}


def _trace_csv(result: RunTrace) -> str:
    spec = result.trace.spec
    labels = [init.label for init in spec.initial_situations]
    probes = list(result.steps[0].beliefs) if result.steps else []
    header = (
        ["i", "action", "kind", "observed", "accurate"]
        + [f"world_{f}" for f in spec.fluents]
        + [f"pl_{label}" for label in labels]
        + [f"belief_{p}" for p in probes]
        + ["baseline_status"]
    )
    rows = []
    for rec in result.steps:
        rows.append(
            [rec.index, rec.action or "", rec.kind]
            + ([rec.observation.observed_bit, rec.observation.accurate] if rec.observation else [None, None])
            + [rec.world[f] for f in spec.fluents]
            + [rec.ranks[label] for label in labels]
            + [rec.beliefs[p] for p in probes]
            + [rec.baseline_status or ""]
        )
    return _csv_text(header, rows)


def _trace_text(result: RunTrace, side_by_side: bool) -> str:
    lines = [
        f"seed={result.seed} mode={result.penalty_mode.value} domain={result.domain_hash[:12]}"
    ]
    for rec in result.steps:
        action = rec.action or "(init)"
        obs = "      "
        if rec.observation is not None:
            obs = f"obs={int(rec.observation.observed_bit)} {'ok  ' if rec.observation.accurate else 'flip'}"
        ranks = " ".join(f"{label}={pl}" for label, pl in rec.ranks.items())
        believed = ",".join(label for label, pl in rec.ranks.items() if pl == 0)
        line = f"{rec.index:3d} {action:<12} {obs}  ranks[{ranks}]  believes[{believed}]"
        if rec.baseline_status is not None:
            survivors = ",".join(rec.baseline_survivors or ())
            line += f"  baseline[{survivors or '-'} {rec.baseline_status}]"
        lines.append(line)
    final = result.steps[-1]
    beliefs = " ".join(f"{probe}={int(value)}" for probe, value in final.beliefs.items())
    lines.append(f"final beliefs: {beliefs}")
    if side_by_side and final.baseline_status == "inconsistent":
        lines.append("baseline ended inconsistent; the ranked engine kept a consistent belief state")
    return "\n".join(lines) + "\n"


def cmd_run(args) -> int:
    spec = _load_domain(args.domain)
    _require_valid(args.domain, spec)
    script = _script_steps(args, spec, args.domain)
    try:
        for step in script:
            spec.action(step.action)
    except KeyError as e:
        raise CliError(f"script: {e.args[0]}") from e
    stochastic = any(
        step.directive.value == "channel" and spec.is_sensing(step.action) for step in script
    )
    seed = _resolve_seed(args, required=stochastic)
    probes = _parse_probes(args, spec)
    mode = PenaltyMode(args.penalty_mode)
    try:
        result = run_script(
            spec, script, seed=seed, penalty_mode=mode,
            compare=getattr(args, "compare", False), probes=probes,
        )
    except PreconditionError as e:
        raise CliError(f"run: {e}") from e
    print(_trace_text(result, args.side_by_side), end="")
    _write(args.json, _json_text(_trace_json(result)))
    _write(args.csv, _trace_csv(result))
    return 0


# -- experiment ----------------------------------------------------------------


def _parse_accuracy(args, spec: DomainSpec) -> dict[str, float] | None:
    if not args.accuracy:
        return None
    overrides: dict[str, float] = {}
    names = {a.name for a in spec.sensing_actions}
    for item in args.accuracy:
        name, _, value = item.partition("=")
        if not value:
            raise CliError(f"--accuracy expects NAME=P, got {item!r}")
        if name != "all" and name not in names:
            raise CliError(f"--accuracy: '{name}' is not a sensing action")
        try:
            p = float(value)
        except ValueError:
            raise CliError(f"--accuracy: bad probability {value!r}") from None
        if not 0.0 <= p <= 1.0:
            raise CliError(f"--accuracy: {p} outside [0, 1]")
        overrides[name] = p
    return overrides


def _stats_dict(stats: ExperimentStats) -> dict:
    out = {
        "cycles": stats.cycles,
        "seq": list(stats.seq),
        "accuracies": stats.accuracies,
        "seed": stats.seed,
        "mode": stats.penalty_mode.value,
        "sensing_sensitive": stats.sensing_sensitive,
        "bound": stats.bound,
        "detection_fraction": stats.detection_fraction,
        "flips": stats.flips,
        "forced_flips": stats.forced_flips,
        "first_permanent_cycle": stats.first_permanent_cycle,
        "probe_agreement": stats.probe_agreement,
        "detections": [int(d) for d in stats.detections],
    }
    if stats.per_step_detections is not None:
        out["step_fraction_all"] = stats.step_fraction_all
        out["step_fraction_sensing"] = stats.step_fraction_sensing
    return out


def _stats_text(stats: ExperimentStats) -> str:
    lines = [
        f"cycles={stats.cycles} seq={','.join(stats.seq)} seed={stats.seed} mode={stats.penalty_mode.value}",
        f"sensing-sensitive: {'yes' if stats.sensing_sensitive else 'NO (results not meaningful)'}",
        f"bound={stats.bound:.6f} detection-fraction={stats.detection_fraction:.6f} flips={stats.flips}",
    ]
    if stats.forced_flips:
        lines.append(f"forced-flips={stats.forced_flips} first-permanent-cycle={stats.first_permanent_cycle}")
    if stats.per_step_detections is not None:
        lines.append(
            f"step-fraction all={stats.step_fraction_all:.6f} sensing-only={stats.step_fraction_sensing:.6f}"
        )
    if stats.probe_agreement:
        agreement = " ".join(f"{probe}={value:.4f}" for probe, value in stats.probe_agreement.items())
        lines.append(f"agreement: {agreement}")
    return "\n".join(lines) + "\n"


def cmd_experiment(args) -> int:
    spec = _load_domain(args.domain)
    _require_valid(args.domain, spec)
    if args.cycles <= 0:
        raise CliError("--cycles must be positive")
    seq = tuple(s.strip() for s in args.seq.split(",")) if args.seq else spec.seq
    if not seq:
        raise CliError("no sequence: pass --seq or declare `seq` in the domain")
    try:
        for name in seq:
            spec.action(name)
    except KeyError as e:
        raise CliError(f"--seq: {e.args[0]}") from e
    seed = _resolve_seed(args, required=True)
    probes = _parse_probes(args, spec)
    overrides = _parse_accuracy(args, spec)
    mode = PenaltyMode(args.penalty_mode)

    if args.sweep:
        try:
            levels = [float(x) for x in args.sweep.split(",")]
        except ValueError:
            raise CliError(f"--sweep: bad accuracy list {args.sweep!r}") from None
        results = accuracy_sweep(spec, seq, levels, cycles=args.cycles, seed=seed,
                                 probes=probes, penalty_mode=mode)
        for stats in results:
            print(f"accuracy={stats.accuracies[next(iter(stats.accuracies))]}")
            print(_stats_text(stats), end="")
        _write(args.json, _json_text({
            "meta": _meta(seed, spec, mode),
            "sweep": [{"accuracy": lv, "stats": _stats_dict(st)} for lv, st in zip(levels, results)],
        }))
        rows = [
            [lv, cycle, det]
            for lv, st in zip(levels, results)
            for cycle, det in enumerate(st.detections)
        ]
        _write(args.csv, _csv_text(["accuracy", "cycle", "detected"], rows))
        return 0

    try:
        stats = convergence_experiment(
            spec, seq, cycles=args.cycles, seed=seed, accuracy_overrides=overrides,
            probes=probes, penalty_mode=mode, per_step=args.per_step,
            force_flips=args.corollary_flips,
        )
    except ValueError as e:
        raise CliError(f"experiment: {e}") from e
    print(_stats_text(stats), end="")
    _write(args.json, _json_text({"meta": _meta(seed, spec, mode), "stats": _stats_dict(stats)}))
    _write(args.csv, _csv_text(
        ["cycle", "detected"], [[cycle, det] for cycle, det in enumerate(stats.detections)]
    ))
    return 0


# -- check ----------------------------------------------------------------


def cmd_check(args) -> int:
    spec = _load_domain(args.domain)
    _require_valid(args.domain, spec)
    seed = _resolve_seed(args, required=True)
    mode = PenaltyMode(args.penalty_mode)

    targets: list[Formula] = []
    if args.formula:
        try:
            targets = [parse_formula(text, spec.fluents) for text in args.formula]
        except ParseError as e:
            raise CliError(f"--formula: {e}") from e
    else:
        from noetic.formula import Atom

        targets = [Atom(f) for f in spec.fluents if find_revision_action(spec, Atom(f))]

    reports: list[CheckReport] = []
    reports.append(check_subsumption(spec, max_len=args.subsumption_len, penalty_mode=mode))
    reports.append(check_introspection(spec, seed=seed, scripts=args.scripts, penalty_mode=mode))
    for target in targets:
        action = find_revision_action(spec, target)
        if action is None:
            raise CliError(f"no declared sensing action senses exactly {render(target)}")
        reports.append(check_revision(spec, action, target, max_len=args.max_len, penalty_mode=mode))
        reports.append(
            check_error_awareness(spec, action, target, max_len=args.max_len, penalty_mode=mode)
        )
    if spec.seq:
        sensitive, witness = check_sensing_sensitive(spec, spec.seq)
        violations = ()
        if not sensitive:
            violations = (
                CheckViolation(
                    description="declared seq cannot distinguish the actual state",
                    script=tuple(f"do {n}" if not spec.is_sensing(n) else f"sense {n} accurate" for n in spec.seq),
                    actual=witness,
                ),
            )
        reports.append(
            CheckReport(
                check="sensing-sensitivity",
                cases=2 ** len(spec.fluents),
                bounds={"seq": ",".join(spec.seq), "scope": "all-valuations"},
                violations=violations,
            )
        )

    for report in reports:
        print(report.summary())
    ok = all(r.passed for r in reports)
    print("all checks passed" if ok else "CHECKS FAILED")
    _write(args.json, _json_text({
        "meta": _meta(seed, spec, mode),
        "reports": [r.to_dict() for r in reports],
    }))
    _write(args.csv, _csv_text(
        ["check", "cases", "violations", "passed"],
        [[r.check, r.cases, len(r.violations), r.passed] for r in reports],
    ))
    return 0 if ok else 1


# -- entry point ----------------------------------------------------------------


def execute(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except CliError as e:
        print(f"noetic: {e}", file=sys.stderr)
        return e.code
    except ParseError as e:
        print(f"noetic: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"noetic: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(execute(sys.argv[1:]))


if __name__ == "__main__":
    main()
