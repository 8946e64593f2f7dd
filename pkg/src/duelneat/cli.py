"""Operator command line: evolve, duel, tournament, compare, report.

Exit codes: 0 success, 1 usage error, 2 data error. The duel subcommand
additionally reports its outcome through the exit code: 0 robot A wins,
3 robot B wins, 4 draw.
"""

import argparse
import os
import sys

from .archive import (
    ArchiveError,
    config_from_values,
    load_archive,
    parse_config_text,
    save_archive,
)
from .coevolution import Evaluator, run_coevolution
from .dominance import (
    DominanceHierarchy,
    performance_score,
    update_dominance,
)
from .duel import DuelConfig, evaluation_configs, format_replay, run_duel
from .genome_io import GenomeParseError, read_genome
from .reporting import write_report

USAGE_ERROR = 1
DATA_ERROR = 2


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load_config_file(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as err:
        raise ArchiveError(str(err))
    values = parse_config_text(text, "duelneat-config 1")
    out_dir = values.pop("out_dir", "duelneat_run")
    params, mode, duel_cfg, seed, generations = config_from_values(values)
    return params, mode, duel_cfg, seed, generations, out_dir


def cmd_evolve(args) -> int:
    try:
        params, mode, duel_cfg, seed, generations, out_dir = _load_config_file(
            args.config
        )
    except ArchiveError as err:
        return _fail(str(err), USAGE_ERROR)
    except GenomeParseError as err:
        return _fail(str(err), DATA_ERROR)

    def progress(record):
        print(
            f"gen {record.generation:4d}  "
            f"best {record.best_fitness_a:5.1f}/{record.best_fitness_b:5.1f}  "
            f"species {len(record.species_a)}/{len(record.species_b)}  "
            f"dt {record.delta_t_a:.2f}/{record.delta_t_b:.2f}  "
            f"dominance {record.dominance_level}"
        )

    archive = run_coevolution(
        params,
        mode,
        generations,
        seed,
        duel_cfg=duel_cfg,
        workers=args.workers,
        progress=progress,
    )
    save_archive(archive, out_dir)
    print(f"archive written to {out_dir}")
    return 0


def cmd_duel(args) -> int:
    try:
        genome_a = read_genome(args.genome_a)
        genome_b = read_genome(args.genome_b)
    except OSError as err:
        return _fail(str(err), USAGE_ERROR)
    except GenomeParseError as err:
        return _fail(str(err), DATA_ERROR)
    duel_cfg = DuelConfig()
    slope = 4.9
    if args.config:
        try:
            params, _mode, duel_cfg, _seed, _gens, _out = _load_config_file(
                args.config
            )
            slope = params.sigmoid_slope
        except ArchiveError as err:
            return _fail(str(err), USAGE_ERROR)
    outcome = run_duel(genome_a, genome_b, duel_cfg, record=True, slope=slope)
    print(
        f"winner: {outcome.winner}  reason: {outcome.reason}  steps: {outcome.steps}"
    )
    if args.replay:
        with open(args.replay, "w", newline="\n") as fh:
            fh.write(format_replay(outcome))
        print(f"replay written to {args.replay}")
    return {"robot_a": 0, "robot_b": 3, "draw": 4}[outcome.winner]


def _tournament_report(hierarchy: DominanceHierarchy) -> str:
    lines = [
        "# duelneat-dominance-report 1",
        "level\tgeneration\tnodes\tconnections\twins_vs_prior",
    ]
    for entry in hierarchy.entries:
        wins = " ".join(
            f"d{level}:{res.wins_a}-{res.wins_b}-{res.draws}"
            for level, res in sorted(entry.records.items())
        )
        lines.append(
            f"{entry.level}\t{entry.generation}\t{len(entry.genome.nodes)}\t"
            f"{len(entry.genome.connections)}\t{wins}"
        )
    return "\n".join(lines) + "\n"


def cmd_tournament(args) -> int:
    try:
        archive = load_archive(args.archive)
    except (ArchiveError, GenomeParseError, OSError) as err:
        return _fail(str(err), DATA_ERROR)
    configs = evaluation_configs(archive.duel_cfg)
    comparisons = 0
    with Evaluator(args.workers, archive.params.sigmoid_slope) as evaluator:

        def compare_fn(a, b):
            nonlocal comparisons
            comparisons += 1
            return evaluator.compare(a, b, configs)

        hierarchy = DominanceHierarchy()
        for gen, champion in archive.hall:
            update_dominance(hierarchy, champion, gen, compare_fn)
    report = _tournament_report(hierarchy)
    out_path = args.out or os.path.join(args.archive, "dominance_report.txt")
    with open(out_path, "w", newline="\n") as fh:
        fh.write(report)
    print(report, end="")
    print(f"levels: {len(hierarchy)}  comparisons: {comparisons}")
    print(f"report written to {out_path}")
    return 0


def cmd_compare(args) -> int:
    try:
        champion = read_genome(args.genome)
    except (OSError, GenomeParseError) as err:
        return _fail(str(err), DATA_ERROR)
    scores = []
    print("archive\tlevels\tscore")
    for archive_dir in args.archives:
        try:
            archive = load_archive(archive_dir)
        except (ArchiveError, GenomeParseError, OSError) as err:
            return _fail(str(err), DATA_ERROR)
        if not archive.hierarchy.entries:
            return _fail(f"{archive_dir} has an empty dominance hierarchy", DATA_ERROR)
        configs = evaluation_configs(archive.duel_cfg)
        with Evaluator(args.workers, archive.params.sigmoid_slope) as evaluator:
            score = performance_score(
                champion,
                archive.hierarchy,
                lambda a, b: evaluator.compare(a, b, configs),
            )
        scores.append(score)
        print(f"{archive_dir}\t{len(archive.hierarchy)}\t{score * 100:.1f}%")
    mean = sum(scores) / len(scores)
    print(f"mean\t\t{mean * 100:.1f}%")
    return 0


def cmd_report(args) -> int:
    try:
        archive = load_archive(args.archive)
    except (ArchiveError, GenomeParseError, OSError) as err:
        return _fail(str(err), DATA_ERROR)
    written = write_report(archive, args.out)
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="duelneat",
        description="Complexifying coevolution in the robot duel arena",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="run a coevolution experiment from a config")
    p.add_argument("config", help="key=value config file (see README)")
    p.add_argument("--workers", type=int, default=1, help="game evaluation processes")
    p.set_defaults(fn=cmd_evolve)

    p = sub.add_parser("duel", help="play one duel between two genome files")
    p.add_argument("genome_a")
    p.add_argument("genome_b")
    p.add_argument("--config", help="config file for duel constants")
    p.add_argument("--replay", help="write the step-by-step replay here")
    p.set_defaults(fn=cmd_duel)

    p = sub.add_parser("tournament", help="recompute an archive's dominance ranking")
    p.add_argument("archive")
    p.add_argument("--out", help="report path (default: <archive>/dominance_report.txt)")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=cmd_tournament)

    p = sub.add_parser(
        "compare", help="score a champion against archives' dominance rankings"
    )
    p.add_argument("genome")
    p.add_argument("archives", nargs="+")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("report", help="emit CSV and SVG charts for an archive")
    p.add_argument("archive")
    p.add_argument("out")
    p.set_defaults(fn=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
