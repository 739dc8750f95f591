"""Command-line front door.

Subcommands::

    foilscope explain --map M --plan P --foil F [flags]
    foilscope curves --map M --plan P --foil F --seeds N [flags]
    foilscope assumption-report --map M [flags]
    foilscope validate --map M [--radius R]
    foilscope serve [--port P] [--data-dir D]

``--serve PORT`` at the top level is shorthand for the ``serve`` subcommand.
Every command is deterministic under ``--seed`` (environment variable
``FOILSCOPE_SEED`` fills in when the flag is omitted). CSV schemas are
documented in ``docs/csv-schemas.md``.

Exit codes: 0 success; 1 explanation-level failure under ``--strict``
(vocabulary insufficiency or a below-threshold result) and failed
validations; 2 usage, file, or query errors.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .concepts import (
    ManifestError,
    ObservationModel,
    estimate_marginals,
    evaluate_concepts,
    parse_manifest,
)
from .dialogue import (
    DialogueConfig,
    Session,
    VocabularyInsufficientExplanation,
)
from .environments import MapError, load_actions, load_map, vocabulary_for
from .model import (
    ContractViolation,
    ContrastiveQuery,
    InvalidFoil,
    InvalidPlanError,
    classify_query,
    compile_goal_action,
    simulate,
)
from .oracle import (
    construct_trivial_approximation,
    enumerate_local_states,
    verify_local_approximation,
    with_goal_mask,
)
from .precondition import run_probabilistic_precondition_search, trace_for_concept
from .sampler import SamplerConfig, derive_seed, anchors_from_trajectories, sample_states

__all__ = ["main"]


class _CliError(Exception):
    def __init__(self, message: str, code: int = 2):
        super().__init__(message)
        self.code = code


def _resolve_seed(value) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get("FOILSCOPE_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise _CliError(f"FOILSCOPE_SEED must be an integer, got {env!r}")
    return 0


def _load_environment(args):
    try:
        return load_map(args.map)
    except MapError as exc:
        raise _CliError(f"cannot load map: {exc}")
    except OSError as exc:
        raise _CliError(f"cannot read map: {exc}")


def _load_action_file(env, source, what):
    try:
        return load_actions(env, source)
    except MapError as exc:
        raise _CliError(f"cannot load {what}: {exc}")
    except OSError as exc:
        raise _CliError(f"cannot read {what}: {exc}")


def _vocab_and_obs(env, args):
    """Vocabulary and observation model for a run.

    ``--vocab`` restricts the environment's vocabulary to the manifest's
    concepts and supplies per-concept detector rates; explicit ``--obs-tp``
    / ``--obs-fp`` flags override the manifest with uniform rates.
    """
    vocab = vocabulary_for(env)
    override = None
    manifest = getattr(args, "vocab", None)
    if manifest:
        try:
            with open(manifest, encoding="utf-8") as handle:
                spec = parse_manifest(handle.read())
        except OSError as exc:
            raise _CliError(f"cannot read vocabulary manifest: {exc}")
        except ManifestError as exc:
            raise _CliError(f"bad vocabulary manifest: {exc}")
        known = set(vocab.names)
        missing = [n for n in spec.names if n not in known]
        if missing:
            raise _CliError(f"manifest names unknown to this map: {', '.join(missing)}")
        vocab = vocab.restricted(spec.names)
        by_name = {e.name: e for e in spec.entries}
        override = ObservationModel(
            np.array([by_name[n].tp for n in vocab.names]),
            np.array([by_name[n].fp for n in vocab.names]),
        )
    if args.obs_tp is not None or args.obs_fp is not None:
        override = None  # explicit flags win over any manifest rates
    return vocab, override


def _dialogue_config(args) -> DialogueConfig:
    base = DialogueConfig()
    try:
        return DialogueConfig(
            budget=args.budget if args.budget is not None else base.budget,
            walk_length=args.walk_length if args.walk_length is not None else base.walk_length,
            kappa=args.kappa if args.kappa is not None else base.kappa,
            threshold=getattr(args, "threshold", None) or base.threshold,
            obs_tp=args.obs_tp if args.obs_tp is not None else base.obs_tp,
            obs_fp=args.obs_fp if args.obs_fp is not None else base.obs_fp,
        )
    except ContractViolation as exc:
        raise _CliError(str(exc))


def _write_out(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as exc:
        raise _CliError(f"cannot write {path}: {exc}")


# --- explain -----------------------------------------------------------------


def _cmd_explain(args) -> int:
    env = _load_environment(args)
    plan = _load_action_file(env, args.plan, "plan")
    foil = _load_action_file(env, args.foil, "foil")
    vocab, override = _vocab_and_obs(env, args)
    config = _dialogue_config(args)
    seed = _resolve_seed(args.seed)
    try:
        session = Session(
            env, vocab, plan, seed=seed, config=config, map_id=args.map, obs_model=override
        )
        explanation = session.explain(foil)
    except InvalidPlanError as exc:
        raise _CliError(f"invalid plan: {exc}")
    except ContractViolation as exc:
        raise _CliError(str(exc))
    print(session.history[-1].rendered_text)
    if args.out:
        _write_out(args.out, session.serialize() + "\n")
    if args.strict:
        if isinstance(explanation, VocabularyInsufficientExplanation):
            return 1
        if not explanation.threshold_met:
            return 1
    return 0


# --- curves ------------------------------------------------------------------


def _curve_target(env, vocab, outcome, args) -> int:
    fail_vec = evaluate_concepts(vocab, outcome.fail_state)
    if args.concept:
        try:
            idx = vocab.index_of(args.concept)
        except Exception:
            raise _CliError(f"unknown concept {args.concept!r}")
        if idx in fail_vec.true_set():
            raise _CliError(
                f"concept {args.concept!r} is true in the failure state; it is not a hypothesis"
            )
        return idx
    gt = getattr(env, "ground_truth", None)
    if gt is None:
        raise _CliError("map has no ground truth; pass --concept")
    truth = gt()
    names = truth.preconditions.get(outcome.fail_action.label)
    if not names:
        raise _CliError(
            f"no recorded preconditions for action {outcome.fail_action.label!r}; pass --concept"
        )
    candidates = [
        n for n in names if n in set(vocab.names) and vocab.index_of(n) not in fail_vec.true_set()
    ]
    if len(candidates) != 1:
        raise _CliError(
            f"ambiguous curve target {sorted(candidates)!r} for action "
            f"{outcome.fail_action.label!r}; pass --concept"
        )
    return vocab.index_of(candidates[0])


def _cmd_curves(args) -> int:
    env = _load_environment(args)
    plan = _load_action_file(env, args.plan, "plan")
    foil = _load_action_file(env, args.foil, "foil")
    vocab, override = _vocab_and_obs(env, args)
    config = _dialogue_config(args)
    if args.seeds < 1:
        raise _CliError("--seeds must be at least 1")
    if config.budget < 1:
        raise _CliError("curves need a positive --budget")
    base_seed = _resolve_seed(args.seed)

    query = ContrastiveQuery(initial=env.initial_state(), plan=plan, foil=foil, goal=env.goal)
    try:
        wrapped, _ = compile_goal_action(env, query)
        outcome = classify_query(env, query)
    except InvalidPlanError as exc:
        raise _CliError(f"invalid plan: {exc}")
    if not isinstance(outcome, InvalidFoil):
        raise _CliError(
            f"curves need a failing foil; this one classifies as {type(outcome).__name__}"
        )
    target = _curve_target(env, vocab, outcome, args)
    obs = (
        override
        if override is not None
        else config.observation_model(len(vocab))
    )
    anchors = anchors_from_trajectories(wrapped, outcome.plan_trajectory, outcome.foil_trajectory)

    traces = []
    for i in range(args.seeds):
        foil_seed = derive_seed(base_seed + i, 0)
        marginal_cfg = SamplerConfig(
            anchors=anchors,
            walk_length=config.walk_length,
            budget=config.budget,
            seed=derive_seed(foil_seed, 0),
        )
        marginals = estimate_marginals(vocab, sample_states(wrapped, marginal_cfg))
        run = run_probabilistic_precondition_search(
            outcome.fail_state,
            outcome.fail_action,
            marginal_cfg.with_seed(derive_seed(foil_seed, 1)),
            vocab,
            obs,
            marginals,
            wrapped,
            priors=None,
            kappa=config.kappa,
        )
        traces.append(trace_for_concept(run, target))

    matrix = np.vstack(traces)
    means = matrix.mean(axis=0)
    stds = matrix.std(axis=0, ddof=0)
    lines = ["budget_step,mean_posterior,std"]
    for step in range(matrix.shape[1]):
        lines.append(f"{step},{float(means[step])!r},{float(stds[step])!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        _write_out(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


# --- assumption report ---------------------------------------------------------


def _negation_partner(name: str) -> str:
    return name[4:] if name.startswith("not_") else f"not_{name}"


def _excluded_concepts(env, vocab, action_label: str) -> set:
    """Concepts whose dependence on executability is expected, per the
    recorded model: the action's preconditions and every cost-rule concept,
    together with their negation partners."""
    gt = getattr(env, "ground_truth", None)
    if gt is None:
        return set()
    truth = gt()
    base = set(truth.preconditions.get(action_label, ()))
    for rule in truth.cost_rules:
        base |= set(rule.concepts)
    out = set()
    for name in base:
        out.add(name)
        out.add(_negation_partner(name))
    return out & set(vocab.names)


def _cmd_assumption_report(args) -> int:
    env = _load_environment(args)
    vocab = vocabulary_for(env)
    if args.plant_dependent:
        if args.plant_dependent not in {a.label for a in env.actions()}:
            raise _CliError(f"unknown action {args.plant_dependent!r} for --plant-dependent")
        planted_action = env.action(args.plant_dependent)
        planted_name = f"executable_{args.plant_dependent}"
        from .concepts import ConceptVocabulary

        vocab = ConceptVocabulary(
            names=list(vocab.names) + [planted_name],
            detectors=[vocab.detector(i) for i in range(len(vocab))]
            + [lambda s, _a=planted_action: not simulate(env, s, _a).failed],
        )
    seed = _resolve_seed(args.seed)
    budget = args.budget if args.budget is not None else 4000
    walk_length = args.walk_length if args.walk_length is not None else 10
    radius = args.radius if args.radius is not None else 12
    # Walks from the initial state alone die on the first failed step and
    # cover almost nothing; anchoring them across the local region gives the
    # gap estimates an actual distribution to work with.
    anchors = enumerate_local_states(env, (env.initial_state(),), radius=radius)
    cfg = SamplerConfig(anchors=anchors, walk_length=walk_length, budget=budget, seed=seed)
    states = list(sample_states(env, cfg))
    truth_table = np.zeros((len(states), len(vocab)), dtype=bool)
    for row, state in enumerate(states):
        for i in evaluate_concepts(vocab, state).true_indices():
            truth_table[row, i] = True
    overall = truth_table.mean(axis=0)

    lines = ["action,concept,p_overall,p_given_executable,abs_gap,status"]
    summary = {}
    for action in env.actions():
        executable = np.array([not simulate(env, s, action).failed for s in states])
        n_exec = int(executable.sum())
        excluded = _excluded_concepts(env, vocab, action.label)
        gaps = []
        for i, name in enumerate(vocab.names):
            p_all = float(overall[i])
            if n_exec == 0:
                lines.append(f"{action.label},{name},{p_all!r},,,no-support")
                continue
            p_exec = float(truth_table[executable, i].mean())
            gap = abs(p_exec - p_all)
            if name in excluded:
                status = "excluded"
            elif gap > 0.3:
                status = "flagged"
            else:
                status = "ok"
                gaps.append(gap)
            lines.append(f"{action.label},{name},{p_all!r},{p_exec!r},{gap!r},{status}")
        if gaps:
            summary[action.label] = (max(gaps), sum(gaps) / len(gaps))
    text = "\n".join(lines) + "\n"
    if args.out:
        _write_out(args.out, text)
        print("action,max_gap,avg_gap")
        for label, (mx, avg) in summary.items():
            print(f"{label},{mx:.6f},{avg:.6f}")
    else:
        sys.stdout.write(text)
    return 0


# --- validate -------------------------------------------------------------------


def _cmd_validate(args) -> int:
    try:
        env = load_map(args.map)
    except MapError as exc:
        if not os.path.isfile(args.map):
            raise _CliError(f"cannot load map: {exc}")
        # an existing file that fails to parse is a finding, not a usage error
        print("region: 0 states, 0 pairs")
        print("violations: 1")
        print(f"  map: {exc}")
        return 1
    except OSError as exc:
        raise _CliError(f"cannot read map: {exc}")
    radius = args.radius if args.radius is not None else 12
    if radius < 0:
        raise _CliError("--radius must be nonnegative")
    if radius == 0:
        print("region: 0 states, 0 pairs")
        print("violations: 0")
        return 0
    try:
        region = enumerate_local_states(env, (env.initial_state(),), radius=radius)
    except ContractViolation as exc:
        raise _CliError(str(exc))
    symbolic = with_goal_mask(construct_trivial_approximation(env, region), env.goal, region)
    report = verify_local_approximation(symbolic, env, region, symbolic.vocab, goal=env.goal)
    print(f"region: {report.states_checked} states, {report.pairs_checked} pairs")
    print(f"violations: {len(report.violations)}")
    for v in report.violations:
        print(f"  condition {v.condition}: {v.detail}")
    return 0 if report.ok else 1


# --- serve ----------------------------------------------------------------------


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=args.data_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# --- parser ---------------------------------------------------------------------


def _add_run_flags(parser, *, threshold: bool = True) -> None:
    parser.add_argument("--map", required=True, help="bundled map id or map file path")
    parser.add_argument("--plan", required=True, help="plan action file (bundled name or path)")
    parser.add_argument("--foil", required=True, help="foil action file (bundled name or path)")
    parser.add_argument("--vocab", help="vocabulary manifest restricting concepts and rates")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--budget", type=int, default=None, help="sampling budget (default 500)")
    parser.add_argument("--kappa", type=float, default=None, help="pruning threshold (default 0.01)")
    parser.add_argument("--walk-length", type=int, default=None, help="random-walk episode cap (default 10)")
    if threshold:
        parser.add_argument("--threshold", type=float, default=None, help="reporting confidence threshold (default 0.5)")
    parser.add_argument("--obs-tp", type=float, default=None, help="detector true-positive rate (default 1.0)")
    parser.add_argument("--obs-fp", type=float, default=None, help="detector false-positive rate (default 0.0)")
    parser.add_argument("--out", help="write the machine-readable output here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="foilscope",
        description="Contrastive plan explanations from a black-box simulator.",
    )
    sub = parser.add_subparsers(dest="command")

    p_explain = sub.add_parser("explain", help="explain one foil against one plan")
    _add_run_flags(p_explain)
    p_explain.add_argument(
        "--strict",
        action="store_true",
        help="exit 1 when the answer is insufficient or below threshold",
    )
    p_explain.set_defaults(func=_cmd_explain)

    p_curves = sub.add_parser("curves", help="posterior-vs-budget CSV across seeds")
    _add_run_flags(p_curves, threshold=False)
    p_curves.add_argument("--seeds", type=int, default=10, help="number of runs (default 10)")
    p_curves.add_argument("--concept", help="concept to trace (default: the recorded precondition)")
    p_curves.set_defaults(func=_cmd_curves)

    p_report = sub.add_parser(
        "assumption-report", help="per-(action, concept) executability/marginal gaps"
    )
    p_report.add_argument("--map", required=True)
    p_report.add_argument("--seed", type=int, default=None)
    p_report.add_argument("--budget", type=int, default=None, help="sample size (default 4000)")
    p_report.add_argument("--walk-length", type=int, default=None)
    p_report.add_argument("--radius", type=int, default=None, help="anchor region radius (default 12)")
    p_report.add_argument(
        "--plant-dependent",
        metavar="ACTION",
        help="inject a concept that is true exactly when ACTION is executable",
    )
    p_report.add_argument("--out")
    p_report.set_defaults(func=_cmd_assumption_report)

    p_validate = sub.add_parser("validate", help="check the symbolic tables against the map")
    p_validate.add_argument("--map", required=True)
    p_validate.add_argument("--radius", type=int, default=None, help="region radius (default 12)")
    p_validate.set_defaults(func=_cmd_validate)

    p_serve = sub.add_parser("serve", help="run the HTTP session service")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--data-dir", default=None, help="session persistence directory")
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "--serve":
        if len(argv) < 2:
            print("--serve needs a port", file=sys.stderr)
            return 2
        argv = ["serve", "--port", argv[1], *argv[2:]]
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "command", None):
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
