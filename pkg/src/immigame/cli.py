"""Command-line interface: classify rules, play games, run and report evolution.

Every command is deterministic once a ``--seed`` is given; omitting it draws
one from system entropy and reports it so the run stays reproducible.
Checkpoints are written after every generation of an ``evolve`` run, and
``--resume`` continues from them with bit-identical final outputs.
"""
from __future__ import annotations

import argparse
import json
import os
import secrets
import sys
from concurrent.futures import ProcessPoolExecutor

from . import analysis, classifier
from .engine import MatchRunner, game_trace
from .evolution import EvolutionConfig, EvolutionRun, runlog_csv
from .patterns import PatternFormatError, load_seed
from .rules import RuleError, enumerate_immigration_rules, format_rule, parse_rule

CHECKPOINT_NAME = "checkpoint.json"
RUNLOG_NAME = "runlog.csv"
CURVE_NAME = "fitness_curve.csv"
VERDICT_NAME = "verdict.txt"

CLASSIFY_HEADER = "rule,shrink_pct,stable_pct,grow_pct,trials,density,seed"

CONFIG_KEYS = {
    "rule": str,
    "master_seed": int,
    "capacity": int,
    "generations": int,
    "mutation_rate": float,
    "initial_seed_box": int,
    "initial_density": float,
    "n_opponents": int,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RuleError, PatternFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _density_spec(text: str):
    """Parse ``0.5`` or a ``0.15-0.9`` range from the command line."""
    if "-" in text:
        low, _, high = text.partition("-")
        return (float(low), float(high))
    return float(text)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="immigame",
        description="Immigration Game simulation, rule classification, and coevolution",
    )
    sub = parser.add_subparsers(required=True)

    classify = sub.add_parser("classify", help="shrink/stable/grow triple of one rule")
    classify.add_argument("rule", help="rule string such as B3/S23")
    classify.add_argument("--trials", type=int, default=classifier.DEFAULT_TRIALS)
    classify.add_argument("--density", type=_density_spec, default=classifier.DEFAULT_DENSITY)
    classify.add_argument("--seed", type=int, default=None)
    classify.add_argument("--parallelism", type=int, default=1)
    classify.set_defaults(func=cmd_classify)

    classify_all = sub.add_parser("classify-all", help="triples for all 8,192 rules")
    classify_all.add_argument("--output", required=True, help="CSV path to write")
    classify_all.add_argument("--trials", type=int, default=classifier.DEFAULT_TRIALS)
    classify_all.add_argument(
        "--density", type=_density_spec, default=classifier.DEFAULT_DENSITY
    )
    classify_all.add_argument("--seed", type=int, default=None)
    classify_all.add_argument("--parallelism", type=int, default=1)
    classify_all.set_defaults(func=cmd_classify_all)

    play = sub.add_parser("play", help="play one game between two seed files")
    play.add_argument("red", help="red seed file")
    play.add_argument("blue", help="blue seed file")
    play.add_argument("rule", help="rule string such as B3/S23")
    play.add_argument("--variant", type=int, default=0, help="placement variant 0..7")
    play.set_defaults(func=cmd_play)

    evolve = sub.add_parser("evolve", help="run a steady-state evolution")
    evolve.add_argument("--config", required=True, help="key=value config file")
    evolve.add_argument("--output", required=True, help="run directory")
    evolve.add_argument("--resume", action="store_true", help="continue from a checkpoint")
    evolve.add_argument("--seed", type=int, default=None, help="overrides master_seed")
    evolve.add_argument("--parallelism", type=int, default=1)
    evolve.add_argument(
        "--stop-after",
        type=int,
        default=None,
        metavar="N",
        help="stop after N generations this invocation (for interruption drills)",
    )
    evolve.set_defaults(func=cmd_evolve)

    report = sub.add_parser("report", help="combine finished runs into a summary CSV")
    report.add_argument("run_dirs", nargs="+", help="directories written by evolve")
    report.add_argument("--output", required=True, help="CSV path to write")
    report.add_argument("--trials", type=int, default=classifier.DEFAULT_TRIALS)
    report.add_argument("--density", type=_density_spec, default=classifier.DEFAULT_DENSITY)
    report.add_argument("--seed", type=int, default=None)
    report.add_argument("--parallelism", type=int, default=1)
    report.set_defaults(func=cmd_report)

    return parser


def _resolve_seed(seed: int | None) -> int:
    if seed is None:
        seed = secrets.randbits(63)
        print(f"seed={seed}", file=sys.stderr)
    return seed


def _triple_row(rule_str: str, trials: int, density, seed: int, workers: int) -> str:
    triple = classifier.classify_rule(
        parse_rule(rule_str), trials=trials, density=density, seed=seed, workers=workers
    )
    return (
        f"{rule_str},{triple.shrink:.1f},{triple.stable:.1f},{triple.grow:.1f},"
        f"{triple.trials},{classifier.density_label(density)},{seed}"
    )


def cmd_classify(args) -> int:
    seed = _resolve_seed(args.seed)
    rule = parse_rule(args.rule)  # fail before any work
    print(_triple_row(format_rule(rule), args.trials, args.density, seed, args.parallelism))
    return 0


def _classify_one(task) -> str:
    rule_str, trials, density, seed = task
    return _triple_row(rule_str, trials, density, seed, workers=1)


def cmd_classify_all(args) -> int:
    seed = _resolve_seed(args.seed)
    rules = [format_rule(r) for r in enumerate_immigration_rules()]
    tasks = [(r, args.trials, args.density, seed) for r in rules]
    with open(args.output, "w", encoding="utf-8", newline="\n") as out:
        out.write(CLASSIFY_HEADER + "\n")
        if args.parallelism > 1:
            with ProcessPoolExecutor(max_workers=args.parallelism) as pool:
                for row in pool.map(_classify_one, tasks, chunksize=8):
                    out.write(row + "\n")
        else:
            for task in tasks:
                out.write(_classify_one(task) + "\n")
    return 0


def cmd_play(args) -> int:
    red = load_seed(args.red)
    blue = load_seed(args.blue)
    rule = parse_rule(args.rule)
    initial, final, outcome = game_trace(red, blue, rule, args.variant)
    print("initial:")
    print(initial.to_text(), end="")
    print("final:")
    print(final.to_text(), end="")
    print(f"red_score={outcome.red_score}")
    print(f"blue_score={outcome.blue_score}")
    print(f"winner={outcome.winner}")
    return 0


def parse_config_file(path: str) -> dict:
    """Flat key=value config; blank lines and # comments are skipped."""
    raw: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {stripped!r}")
            key, _, value = stripped.partition("=")
            key = key.strip()
            value = value.strip()
            if key == "operator_weights":
                raw[key] = tuple(float(v) for v in value.split(","))
            elif key in CONFIG_KEYS:
                raw[key] = CONFIG_KEYS[key](value)
            else:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
    if "rule" not in raw:
        raise ValueError(f"{path}: missing required key 'rule'")
    return raw


def _load_checkpoint(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"corrupt checkpoint {path}: {exc}") from exc


def _save_checkpoint(path: str, state: dict) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(state, fh)
    os.replace(tmp, path)


def cmd_evolve(args) -> int:
    raw = parse_config_file(args.config)
    if args.seed is not None:
        raw["master_seed"] = args.seed
    if "master_seed" not in raw:
        raw["master_seed"] = secrets.randbits(63)
        print(f"master_seed={raw['master_seed']}", file=sys.stderr)
    rule = parse_rule(raw.pop("rule"))
    config = EvolutionConfig(rule=rule, **raw)

    os.makedirs(args.output, exist_ok=True)
    checkpoint_path = os.path.join(args.output, CHECKPOINT_NAME)
    runner = MatchRunner(args.parallelism)
    try:
        if args.resume:
            if not os.path.exists(checkpoint_path):
                raise ValueError(f"no checkpoint to resume in {args.output}")
            state = _load_checkpoint(checkpoint_path)
            if state["config"] != config.to_dict():
                raise ValueError(
                    f"checkpoint in {args.output} was written with a different config"
                )
            run = EvolutionRun.from_state(state, runner=runner)
        else:
            run = EvolutionRun.fresh(config, runner=runner)
            _save_checkpoint(checkpoint_path, run.to_state())

        executed = 0
        while not run.finished:
            if args.stop_after is not None and executed >= args.stop_after:
                print(
                    f"stopping after {executed} generation(s); resume with --resume",
                    file=sys.stderr,
                )
                return 0
            record = run.run_generation()
            executed += 1
            _save_checkpoint(checkpoint_path, run.to_state())
            print(
                f"generation {record.generation}: "
                f"external fitness {record.external_fitness_pct:.1f}%",
                file=sys.stderr,
            )

        _write(os.path.join(args.output, RUNLOG_NAME), runlog_csv(run.log))
        _write(os.path.join(args.output, CURVE_NAME), analysis.curve_csv(run.log.generations))
        curve = run.log.curve()
        if len(curve) >= 4:
            _write(os.path.join(args.output, VERDICT_NAME), analysis.classify_run(curve) + "\n")
        else:
            print("run too short to classify (needs 4 generations)", file=sys.stderr)
    finally:
        runner.close()
    return 0


def _write(path: str, content: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(content)


def cmd_report(args) -> int:
    seed = _resolve_seed(args.seed)
    rules = []
    verdicts = []
    fitnesses = []
    for run_dir in args.run_dirs:
        for name in (CHECKPOINT_NAME, CURVE_NAME, VERDICT_NAME):
            if not os.path.exists(os.path.join(run_dir, name)):
                raise ValueError(f"incomplete run directory {run_dir}: missing {name}")
        state = _load_checkpoint(os.path.join(run_dir, CHECKPOINT_NAME))
        rules.append(parse_rule(state["config"]["rule"]))
        with open(os.path.join(run_dir, VERDICT_NAME), encoding="utf-8") as fh:
            verdicts.append(fh.read().strip())
        with open(os.path.join(run_dir, CURVE_NAME), encoding="utf-8") as fh:
            data_rows = fh.read().strip().split("\n")[1:]
        if not data_rows:
            raise ValueError(f"incomplete run directory {run_dir}: empty fitness curve")
        fitnesses.append(float(data_rows[-1].split(",")[1]))
    triples = [
        classifier.classify_rule(
            rule, trials=args.trials, density=args.density, seed=seed, workers=args.parallelism
        )
        for rule in rules
    ]
    _write(args.output, analysis.emit_table1_report(rules, verdicts, fitnesses, triples))
    return 0
