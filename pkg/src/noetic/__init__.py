"""noetic: iterated belief change with noisy sensing over finite action domains.

An agent tracks a ranked set of candidate situations. Physical actions
progress every candidate; sensing actions re-rank them against the
observed bit instead of discarding contradicting ones, so noisy readings
never strand the agent in an inconsistent state. The package bundles the
engine, a textual domain language, a discard-based baseline engine for
comparison, a seeded simulation harness, and executable property checks.
"""

from noetic.core import (
    NoGuardError,
    Observation,
    PreconditionError,
    SituationNode,
    Valuation,
    all_valuations,
    eval_modal,
    eval_static,
    progress,
    sf,
)
from noetic.dsl import (
    DomainSpec,
    InitialSituation,
    Issue,
    PhysicalAction,
    SensingAction,
    ValidationReport,
    domain_digest,
    literal_probes,
    serialize_domain,
    validate_domain,
)
from noetic.engine import (
    BaselineState,
    BaselineStatus,
    EpistemicTrace,
    PenaltyMode,
    apply_physical,
    apply_sensing,
    baseline_apply,
    baseline_bel,
    baseline_init,
    bel,
    init_epistemic,
    most_plausible,
)
from noetic.formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    Bel,
    Const,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Prev,
    atoms,
    is_domain_dependent,
    render,
)
from noetic.parser import ParseError, parse_domain, parse_formula
from noetic.sim import (
    Directive,
    ExperimentStats,
    RunTrace,
    Scope,
    ScriptStep,
    StepRecord,
    World,
    accuracy_sweep,
    check_sensing_sensitive,
    convergence_experiment,
    detection,
    mix_seed,
    observe,
    parse_script,
    run_script,
    world_progress,
)
from noetic.theorems import (
    CheckReport,
    CheckViolation,
    check_error_awareness,
    check_introspection,
    check_revision,
    check_subsumption,
    default_probes,
    find_revision_action,
    reachable_states,
)

__version__ = "0.1.0"
