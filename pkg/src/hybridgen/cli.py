"""Command-line entry point: validate, decompose, skeleton, run, eval."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .ablation import AblationFlags
from .backend import BackendError, UnannotatedOperation
from .config import ConfigError, RunConfig, load_config
from .decompose import EmptyRequirement, decompose, passthrough_annotation
from .evaluation import (
    APPROACH_KINDS,
    IECOREGEN,
    ApproachConfig,
    BenchError,
    RunSettings,
    emit_report,
    load_bench,
    load_problem,
    provider_failures,
    run_eval,
    run_sample,
)
from .llm import LLMError
from .model import InvalidModel, ModelError, parse_model, read_model_file, serialize_model, validate_model
from .session import ArtifactSink, Session

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PROVIDER = 2

log = logging.getLogger("hybridgen")


def _global_options(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("global options")
    g.add_argument("--config", type=Path, help="INI-style configuration file")
    g.add_argument("--workspace", type=Path, help="root directory for artifacts")
    g.add_argument("--provider-mode", choices=("live", "record", "replay"))
    g.add_argument("--transcripts", type=Path, help="transcript file or directory (replay/record)")
    g.add_argument("--model", dest="model_name", help="model name sent to the provider")
    g.add_argument("--temperature", type=float)
    g.add_argument("--backend", choices=("minioo", "external"))
    g.add_argument("--jobs", type=int)
    g.add_argument("--no-decompose", action="store_true", default=None)
    g.add_argument("--no-compress", action="store_true", default=None)
    g.add_argument("--no-context", action="store_true", default=None)
    g.add_argument("--no-fix", action="store_true", default=None)
    g.add_argument("--max-fix-iterations", type=int)
    g.add_argument("-v", "--verbose", action="count", default=None)


def build_parser() -> argparse.ArgumentParser:
    # global options are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS, allow_abbrev=False)
    _global_options(common)
    parser = argparse.ArgumentParser(prog="hybridgen", parents=[common], description=__doc__, allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], allow_abbrev=False, help="parse and validate a class model")
    p.add_argument("model", type=Path)

    p = sub.add_parser("decompose", parents=[common], allow_abbrev=False, help="annotate a model with per-operation specs")
    p.add_argument("model", type=Path)
    p.add_argument("requirement", type=Path)
    p.add_argument("-o", "--output", type=Path, help="annotated model file (default: stdout)")

    p = sub.add_parser("skeleton", parents=[common], allow_abbrev=False, help="generate skeleton source units")
    p.add_argument("model", type=Path, help="annotated model")
    p.add_argument("-o", "--output", type=Path, help="output directory (default: <workspace>/skeleton)")

    p = sub.add_parser("run", parents=[common], allow_abbrev=False, help="run one sample of one problem")
    p.add_argument("problem", type=Path)
    p.add_argument("--sample", type=int, default=0)
    p.add_argument("--approach", default=IECOREGEN, choices=APPROACH_KINDS)

    p = sub.add_parser("eval", parents=[common], allow_abbrev=False, help="evaluate approaches over a benchmark")
    p.add_argument("bench", type=Path)
    p.add_argument("--approach", action="append", choices=APPROACH_KINDS, dest="approaches")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int, action="append", dest="ks")
    p.add_argument("--format", choices=("text", "jsonl"), default="text")
    return parser


def _config(args) -> RunConfig:
    get = lambda name: getattr(args, name, None)  # noqa: E731
    overrides = {
        ("provider", "mode"): get("provider_mode"),
        ("provider", "transcripts"): get("transcripts"),
        ("provider", "model"): get("model_name"),
        ("provider", "temperature"): get("temperature"),
        ("backend", "name"): get("backend"),
        ("eval", "jobs"): get("jobs"),
        ("eval", "workspace"): get("workspace"),
        ("eval", "n"): get("n"),
        ("eval", "k"): get("ks"),
        ("pipeline", "no_decompose"): get("no_decompose"),
        ("pipeline", "no_compress"): get("no_compress"),
        ("pipeline", "no_context"): get("no_context"),
        ("pipeline", "no_fix"): get("no_fix"),
        ("pipeline", "max_fix_iterations"): get("max_fix_iterations"),
    }
    return load_config(get("config"), overrides=overrides)


def _settings(cfg: RunConfig) -> RunSettings:
    return RunSettings(
        backend=cfg.backend(),
        provider=cfg.provider(),
        llm=cfg.llm_settings(),
        templates=cfg.templates(),
        max_fix_iterations=cfg.max_fix_iterations,
        context_budget=cfg.context_budget,
        test_source=cfg.test_source,
        provider_mode=cfg.mode,
    )


def cmd_validate(args) -> int:
    try:
        model = parse_model(args.model.read_text(encoding="utf-8"))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ModelError as exc:
        print(f"{args.model}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    violations = validate_model(model)
    for v in violations:
        print(v)
    if not violations:
        print(f"{args.model}: ok")
    return EXIT_OK


def cmd_decompose(args) -> int:
    cfg = _config(args)
    model = read_model_file(args.model)
    requirement = args.requirement.read_text(encoding="utf-8")
    if cfg.flags.no_decompose:
        annotated = passthrough_annotation(model, requirement)
    else:
        sink = ArtifactSink(cfg.workspace / "decompose")
        session = Session(cfg.provider(), cfg.llm_settings(), 0, sink, cfg.templates())
        annotated, result = decompose(model, requirement, session)
        for w in result.warnings:
            log.warning(w)
    text = serialize_model(annotated)
    if args.output:
        args.output.parent.mkdir(parents=True, exist_ok=True)
        args.output.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_skeleton(args) -> int:
    cfg = _config(args)
    model = read_model_file(args.model)
    units = cfg.backend().generate_skeleton(model)
    out = args.output or cfg.workspace / "skeleton"
    ArtifactSink(out).write_units("", units)
    for u in units:
        print(out / u.path)
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _config(args)
    problem = load_problem(args.problem)
    flags = cfg.flags if args.approach == IECOREGEN else AblationFlags()
    root = cfg.workspace / problem.id / str(args.sample)
    record = run_sample(problem, ApproachConfig(args.approach, flags), _settings(cfg), args.sample, root)
    print(json.dumps(record.to_dict(), sort_keys=True))
    if provider_failures([record]):
        return EXIT_PROVIDER
    return EXIT_OK


def cmd_eval(args) -> int:
    cfg = _config(args)
    problems = load_bench(args.bench)
    kinds = args.approaches or [IECOREGEN]
    approaches = []
    for kind in dict.fromkeys(kinds):
        approaches.append(ApproachConfig(kind, cfg.flags if kind == IECOREGEN else AblationFlags()))
    report = run_eval(problems, approaches, cfg.n, cfg.ks, _settings(cfg), cfg.workspace, cfg.jobs)
    for key, reason in provider_failures(report.records).items():
        log.warning("%s: %s", key, reason)
    sys.stdout.write(emit_report(report, args.format, cfg.workspace / "report"))
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "decompose": cmd_decompose,
    "skeleton": cmd_skeleton,
    "run": cmd_run,
    "eval": cmd_eval,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    verbose = getattr(args, "verbose", None) or 0
    logging.basicConfig(
        level=logging.DEBUG if verbose > 1 else logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
    except LLMError as exc:
        print(f"provider failure: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except (InvalidModel, ModelError, UnannotatedOperation, EmptyRequirement, BenchError, BackendError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
