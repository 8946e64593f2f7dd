"""On-disk run archive: run.meta, stats.csv, per-generation directories.

Layout:

    out_dir/
      run.meta            key=value config snapshot behind a magic line
      stats.csv           one row per generation (schema below)
      dominance.csv       the incrementally built dominance hierarchy
      seed.genome         only for seeded fixed-topology runs
      gen_0000/
        gen.meta          per-generation scalars
        champion.genome   the generation champion (hall of fame entry)
        champion_a.genome population A champion
        champion_b.genome population B champion
        species.csv       per-species rows for both populations

Every file starts with a versioned magic line and everything is written
with fixed float formatting, so identical runs produce identical bytes.
The stats.csv delta_t / species_count columns describe population A; the
full per-population detail lives in the generation directories.
"""

import os

from .coevolution import (
    EvolutionMode,
    GenerationRecord,
    RunArchive,
    SpeciesStat,
)
from .dominance import ComparisonResult, DominanceEntry, DominanceHierarchy
from .duel import DuelConfig
from .genome_io import read_genome, write_genome
from .params import CompatibilityCoeffs, EvolutionParams

RUN_MAGIC = "duelneat-run 1"
STATS_MAGIC = "# duelneat-stats 1"
SPECIES_MAGIC = "# duelneat-species 1"
GEN_MAGIC = "duelneat-gen 1"
DOMINANCE_MAGIC = "# duelneat-dominance 1"

STATS_COLUMNS = (
    "generation",
    "dominance_level",
    "champion_nodes",
    "champion_connections",
    "pop_min_connections",
    "pop_max_connections",
    "delta_t",
    "species_count",
)


class ArchiveError(ValueError):
    pass


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _write_text(path, text: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def config_items(
    params: EvolutionParams, mode: EvolutionMode, duel_cfg: DuelConfig, seed: int
) -> list[tuple[str, str]]:
    """The flat key=value view of a run configuration, in canonical order."""
    c = params.coeffs
    return [
        ("seed", _fmt(seed)),
        ("mode", mode.kind),
        ("population_size", _fmt(params.population_size)),
        ("excess_coeff", _fmt(c.excess_coeff)),
        ("disjoint_coeff", _fmt(c.disjoint_coeff)),
        ("weight_coeff", _fmt(c.weight_coeff)),
        ("normalize_distance", _fmt(c.normalize)),
        ("compat_threshold", _fmt(params.compat_threshold)),
        ("threshold_step", _fmt(params.threshold_step)),
        ("threshold_floor", _fmt(params.threshold_floor)),
        ("target_species", _fmt(params.target_species)),
        ("stagnation_limit", _fmt(params.stagnation_limit)),
        ("elitism_threshold", _fmt(params.elitism_threshold)),
        ("survival_fraction", _fmt(params.survival_fraction)),
        ("weight_mutation_rate", _fmt(params.weight_mutation_rate)),
        ("weight_perturb_prob", _fmt(params.weight_perturb_prob)),
        ("weight_init_range", _fmt(params.weight_init_range)),
        ("weight_perturb_range", _fmt(params.weight_perturb_range)),
        ("weight_cap", _fmt(params.weight_cap)),
        ("disable_inherit_prob", _fmt(params.disable_inherit_prob)),
        ("weight_average_rate", _fmt(params.weight_average_rate)),
        ("mutation_only_rate", _fmt(params.mutation_only_rate)),
        ("interspecies_mating_rate", _fmt(params.interspecies_mating_rate)),
        ("add_node_prob", _fmt(params.add_node_prob)),
        ("add_link_prob", _fmt(params.add_link_prob)),
        ("remove_link_prob", _fmt(params.remove_link_prob)),
        ("sigmoid_slope", _fmt(params.sigmoid_slope)),
        ("parasite_species_count", _fmt(params.parasite_species_count)),
        ("parasite_hall_count", _fmt(params.parasite_hall_count)),
        ("fixed_hidden", _fmt(mode.hidden_count)),
        ("simplify_hidden", _fmt(mode.simplify_hidden)),
        ("max_steps", _fmt(duel_cfg.max_steps)),
        ("initial_energy", _fmt(duel_cfg.initial_energy)),
        ("food_energy", _fmt(duel_cfg.food_energy)),
        ("collision_radius", _fmt(duel_cfg.collision_radius)),
        ("pickup_radius", _fmt(duel_cfg.pickup_radius)),
        ("sensor_range", _fmt(duel_cfg.sensor_range)),
        ("wall_sensor_range", _fmt(duel_cfg.wall_sensor_range)),
    ]


def save_archive(archive: RunArchive, out_dir) -> None:
    os.makedirs(out_dir, exist_ok=True)
    meta_lines = [RUN_MAGIC]
    meta_lines += [
        f"{key} = {value}"
        for key, value in config_items(
            archive.params, archive.mode, archive.duel_cfg, archive.seed
        )
    ]
    meta_lines.append(f"generations = {len(archive.generations)}")
    has_seed_genome = (
        archive.mode.kind == "fixed_topology" and archive.mode.seed_genome is not None
    )
    meta_lines.append(f"seed_genome = {'seed.genome' if has_seed_genome else ''}")
    _write_text(os.path.join(out_dir, "run.meta"), "\n".join(meta_lines) + "\n")
    if has_seed_genome:
        write_genome(archive.mode.seed_genome, os.path.join(out_dir, "seed.genome"))

    stats_lines = [STATS_MAGIC, ",".join(STATS_COLUMNS)]
    for r in archive.generations:
        stats_lines.append(
            ",".join(
                (
                    str(r.generation),
                    str(r.dominance_level),
                    str(r.champion_nodes),
                    str(r.champion_connections),
                    str(r.pop_min_connections),
                    str(r.pop_max_connections),
                    _fmt(r.delta_t_a),
                    str(len(r.species_a)),
                )
            )
        )
    _write_text(os.path.join(out_dir, "stats.csv"), "\n".join(stats_lines) + "\n")

    dom_lines = [
        DOMINANCE_MAGIC,
        "level,generation,nodes,connections,records",
    ]
    for entry in archive.hierarchy.entries:
        records = "|".join(
            f"{level}:{res.wins_a}:{res.wins_b}:{res.draws}"
            for level, res in sorted(entry.records.items())
        )
        dom_lines.append(
            f"{entry.level},{entry.generation},{len(entry.genome.nodes)},"
            f"{len(entry.genome.connections)},{records}"
        )
    _write_text(os.path.join(out_dir, "dominance.csv"), "\n".join(dom_lines) + "\n")

    for r in archive.generations:
        gen_dir = os.path.join(out_dir, f"gen_{r.generation:04d}")
        os.makedirs(gen_dir, exist_ok=True)
        gen_lines = [
            GEN_MAGIC,
            f"generation = {r.generation}",
            f"champion_side = {r.champion_side}",
            f"best_fitness_a = {_fmt(r.best_fitness_a)}",
            f"best_fitness_b = {_fmt(r.best_fitness_b)}",
            f"delta_t_a = {_fmt(r.delta_t_a)}",
            f"delta_t_b = {_fmt(r.delta_t_b)}",
            f"dominance_level = {r.dominance_level}",
            f"pop_min_connections = {r.pop_min_connections}",
            f"pop_max_connections = {r.pop_max_connections}",
        ]
        _write_text(os.path.join(gen_dir, "gen.meta"), "\n".join(gen_lines) + "\n")
        write_genome(r.generation_champion, os.path.join(gen_dir, "champion.genome"))
        write_genome(r.champion_a, os.path.join(gen_dir, "champion_a.genome"))
        write_genome(r.champion_b, os.path.join(gen_dir, "champion_b.genome"))
        sp_lines = [
            SPECIES_MAGIC,
            "population,species_id,size,best_fitness,age,last_improvement",
        ]
        for label, stats in (("a", r.species_a), ("b", r.species_b)):
            for s in stats:
                sp_lines.append(
                    f"{label},{s.id},{s.size},{_fmt(s.best_fitness)},"
                    f"{s.age},{s.last_improvement}"
                )
        _write_text(os.path.join(gen_dir, "species.csv"), "\n".join(sp_lines) + "\n")


def parse_config_text(text: str, magic: str | None = None) -> dict[str, str]:
    """Parse flat key=value text (blank lines and # comments ignored)."""
    lines = text.splitlines()
    start = 0
    if magic is not None:
        if not lines or lines[0].strip() != magic:
            raise ArchiveError(f"missing magic line {magic!r}")
        start = 1
    values: dict[str, str] = {}
    for line_no, raw in enumerate(lines[start:], start=start + 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ArchiveError(f"line {line_no}: expected key = value")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _parse_bool(token: str) -> bool:
    if token.lower() in ("true", "1", "yes"):
        return True
    if token.lower() in ("false", "0", "no"):
        return False
    raise ArchiveError(f"not a boolean: {token!r}")


def config_from_values(values: dict[str, str]):
    """Build (params, mode, duel_cfg, seed, generations) from key=value data."""
    defaults = dict(
        config_items(EvolutionParams(), EvolutionMode.complexifying(), DuelConfig(), 0)
    )
    defaults["generations"] = "100"
    defaults["seed_genome"] = ""
    unknown = set(values) - set(defaults) - {"out_dir"}
    if unknown:
        raise ArchiveError(f"unknown config key: {sorted(unknown)[0]}")
    if "seed" not in values:
        raise ArchiveError("config must set a seed (reproducibility is mandatory)")
    merged = dict(defaults)
    merged.update(values)

    def fval(key):
        try:
            return float(merged[key])
        except ValueError:
            raise ArchiveError(f"config key {key} is not a number: {merged[key]!r}")

    def ival(key):
        try:
            return int(merged[key])
        except ValueError:
            raise ArchiveError(f"config key {key} is not an integer: {merged[key]!r}")

    params = EvolutionParams(
        population_size=ival("population_size"),
        coeffs=CompatibilityCoeffs(
            excess_coeff=fval("excess_coeff"),
            disjoint_coeff=fval("disjoint_coeff"),
            weight_coeff=fval("weight_coeff"),
            normalize=_parse_bool(merged["normalize_distance"]),
        ),
        compat_threshold=fval("compat_threshold"),
        threshold_step=fval("threshold_step"),
        threshold_floor=fval("threshold_floor"),
        target_species=ival("target_species"),
        stagnation_limit=ival("stagnation_limit"),
        elitism_threshold=ival("elitism_threshold"),
        survival_fraction=fval("survival_fraction"),
        weight_mutation_rate=fval("weight_mutation_rate"),
        weight_perturb_prob=fval("weight_perturb_prob"),
        weight_init_range=fval("weight_init_range"),
        weight_perturb_range=fval("weight_perturb_range"),
        weight_cap=fval("weight_cap"),
        disable_inherit_prob=fval("disable_inherit_prob"),
        weight_average_rate=fval("weight_average_rate"),
        mutation_only_rate=fval("mutation_only_rate"),
        interspecies_mating_rate=fval("interspecies_mating_rate"),
        add_node_prob=fval("add_node_prob"),
        add_link_prob=fval("add_link_prob"),
        remove_link_prob=fval("remove_link_prob"),
        sigmoid_slope=fval("sigmoid_slope"),
        parasite_species_count=ival("parasite_species_count"),
        parasite_hall_count=ival("parasite_hall_count"),
    )
    duel_cfg = DuelConfig(
        max_steps=ival("max_steps"),
        initial_energy=fval("initial_energy"),
        food_energy=fval("food_energy"),
        collision_radius=fval("collision_radius"),
        pickup_radius=fval("pickup_radius"),
        sensor_range=fval("sensor_range"),
        wall_sensor_range=fval("wall_sensor_range"),
    )
    kind = merged["mode"]
    seed_genome = None
    if merged["seed_genome"]:
        seed_genome = read_genome(merged["seed_genome"])
    if kind == "complexifying":
        mode = EvolutionMode.complexifying()
    elif kind == "fixed_topology":
        mode = EvolutionMode.fixed_topology(ival("fixed_hidden"), seed_genome)
    elif kind == "simplifying":
        mode = EvolutionMode.simplifying(ival("simplify_hidden"))
    elif kind == "random_fitness":
        mode = EvolutionMode.random_fitness()
    else:
        raise ArchiveError(f"unknown mode {kind!r}")
    return params, mode, duel_cfg, ival("seed"), ival("generations")


def load_archive(out_dir) -> RunArchive:
    """Reconstruct a RunArchive from disk; inverse of save_archive."""
    meta_path = os.path.join(out_dir, "run.meta")
    if not os.path.exists(meta_path):
        raise ArchiveError(f"{out_dir} is not a run archive (no run.meta)")
    with open(meta_path) as fh:
        values = parse_config_text(fh.read(), RUN_MAGIC)
    generations = int(values.pop("generations", "0"))
    seed_genome_name = values.pop("seed_genome", "")
    if seed_genome_name:
        values["seed_genome"] = os.path.join(out_dir, seed_genome_name)
    params, mode, duel_cfg, seed, _ = config_from_values(
        {**values, "generations": str(generations)}
    )
    archive = RunArchive(seed=seed, mode=mode, params=params, duel_cfg=duel_cfg)

    for gen in range(generations):
        gen_dir = os.path.join(out_dir, f"gen_{gen:04d}")
        with open(os.path.join(gen_dir, "gen.meta")) as fh:
            gm = parse_config_text(fh.read(), GEN_MAGIC)
        champion = read_genome(os.path.join(gen_dir, "champion.genome"))
        champion_a = read_genome(os.path.join(gen_dir, "champion_a.genome"))
        champion_b = read_genome(os.path.join(gen_dir, "champion_b.genome"))
        species_a: list[SpeciesStat] = []
        species_b: list[SpeciesStat] = []
        with open(os.path.join(gen_dir, "species.csv")) as fh:
            sp_lines = fh.read().splitlines()
        if not sp_lines or sp_lines[0] != SPECIES_MAGIC:
            raise ArchiveError(f"bad species.csv in {gen_dir}")
        for row in sp_lines[2:]:
            if not row.strip():
                continue
            pop, sid, size, best, age, last = row.split(",")
            stat = SpeciesStat(int(sid), int(size), float(best), int(age), int(last))
            (species_a if pop == "a" else species_b).append(stat)
        archive.generations.append(
            GenerationRecord(
                generation=gen,
                champion_a=champion_a,
                champion_b=champion_b,
                generation_champion=champion,
                champion_side=gm["champion_side"],
                best_fitness_a=float(gm["best_fitness_a"]),
                best_fitness_b=float(gm["best_fitness_b"]),
                species_a=species_a,
                species_b=species_b,
                delta_t_a=float(gm["delta_t_a"]),
                delta_t_b=float(gm["delta_t_b"]),
                dominance_level=int(gm["dominance_level"]),
                champion_nodes=len(champion.nodes),
                champion_connections=len(champion.connections),
                pop_min_connections=int(gm["pop_min_connections"]),
                pop_max_connections=int(gm["pop_max_connections"]),
            )
        )
        archive.hall.append((gen, champion))

    dom_path = os.path.join(out_dir, "dominance.csv")
    if os.path.exists(dom_path):
        with open(dom_path) as fh:
            lines = fh.read().splitlines()
        if not lines or lines[0] != DOMINANCE_MAGIC:
            raise ArchiveError("bad dominance.csv")
        hierarchy = DominanceHierarchy()
        for row in lines[2:]:
            if not row.strip():
                continue
            level, gen, _nodes, _conns, records_text = row.split(",", 4)
            records = {}
            if records_text:
                for part in records_text.split("|"):
                    lvl, wa, wb, d = part.split(":")
                    records[int(lvl)] = ComparisonResult(int(wa), int(wb), int(d))
            genome = archive.generations[int(gen)].generation_champion
            hierarchy.entries.append(
                DominanceEntry(int(level), int(gen), genome, records)
            )
        archive.hierarchy = hierarchy
    return archive
