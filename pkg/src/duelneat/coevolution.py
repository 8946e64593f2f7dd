"""Two-population host/parasite coevolution loop.

Both populations advance together: each generation every member of one
population (the hosts) is evaluated in 24 games against a sample of
opponents from the other (the parasites): the champions of the best
opposing species plus random draws from a Hall of Fame holding every
generation champion. The winner of a full 288-game comparison between the
two population champions becomes the generation champion, enters the hall
and plays the incremental dominance tournament.

Four modes share this loop: complexifying (minimal start, growing
structure), fixed topology (no structural mutation), simplifying
(complex start, connections only removed), and the random-fitness control
where every game is a coin flip.
"""

import math
import multiprocessing
from dataclasses import dataclass, field

from .dominance import ComparisonResult, DominanceHierarchy, update_dominance
from .duel import DUEL_IO_SPEC, DuelConfig, evaluation_configs, run_duel
from .genome import (
    Genome,
    InnovationRegistry,
    fully_connected_genome,
    minimal_genome,
)
from .params import EvolutionParams
from .rng import stream
from .speciation import (
    SpeciesSet,
    adjust_threshold,
    allocate_offspring,
    assign_species,
    reproduce,
    reseat_representatives,
    share_fitness,
    update_stagnation,
)

COMPLEXIFYING = "complexifying"
FIXED_TOPOLOGY = "fixed_topology"
SIMPLIFYING = "simplifying"
RANDOM_FITNESS = "random_fitness"


@dataclass(frozen=True)
class EvolutionMode:
    """Which of the four evolution regimes a run uses."""

    kind: str
    hidden_count: int = 10  # fixed topology without a seed genome
    seed_genome: Genome | None = None
    simplify_hidden: int = 12

    @classmethod
    def complexifying(cls) -> "EvolutionMode":
        return cls(COMPLEXIFYING)

    @classmethod
    def fixed_topology(
        cls, hidden_count: int = 10, seed: Genome | None = None
    ) -> "EvolutionMode":
        return cls(FIXED_TOPOLOGY, hidden_count=hidden_count, seed_genome=seed)

    @classmethod
    def simplifying(cls, initial_hidden: int = 12) -> "EvolutionMode":
        return cls(SIMPLIFYING, simplify_hidden=initial_hidden)

    @classmethod
    def random_fitness(cls) -> "EvolutionMode":
        return cls(RANDOM_FITNESS)

    @property
    def structural(self) -> str:
        if self.kind in (COMPLEXIFYING, RANDOM_FITNESS):
            return "grow"
        if self.kind == SIMPLIFYING:
            return "shrink"
        return "frozen"

    def initial_genome(self, rng, params: EvolutionParams) -> Genome:
        if self.kind in (COMPLEXIFYING, RANDOM_FITNESS):
            return minimal_genome(DUEL_IO_SPEC, rng, params)
        if self.kind == SIMPLIFYING:
            return fully_connected_genome(
                DUEL_IO_SPEC, self.simplify_hidden, rng, params
            )
        if self.seed_genome is not None:
            return _reweighted(self.seed_genome, rng, params)
        return fully_connected_genome(DUEL_IO_SPEC, self.hidden_count, rng, params)


def _reweighted(seed: Genome, rng, params: EvolutionParams) -> Genome:
    """Seed topology (enabled genes only) with fresh random weights."""
    from dataclasses import replace as dc_replace

    connections = [
        dc_replace(
            c,
            weight=rng.uniform(-params.weight_init_range, params.weight_init_range),
        )
        for c in seed.connections
        if c.enabled
    ]
    referenced = set()
    for c in connections:
        referenced.add(c.in_node)
        referenced.add(c.out_node)
    io_ids = {n.id for n in seed.io_spec.io_nodes()}
    nodes = [
        n for n in seed.nodes if n.id in io_ids or n.id in referenced
    ]
    return Genome(nodes, connections, seed.io_spec)


@dataclass(frozen=True)
class SpeciesStat:
    id: int
    size: int
    best_fitness: float
    age: int
    last_improvement: int


@dataclass
class GenerationRecord:
    generation: int
    champion_a: Genome
    champion_b: Genome
    generation_champion: Genome
    champion_side: str  # a | b
    best_fitness_a: float
    best_fitness_b: float
    species_a: list[SpeciesStat]
    species_b: list[SpeciesStat]
    delta_t_a: float
    delta_t_b: float
    dominance_level: int
    champion_nodes: int
    champion_connections: int
    pop_min_connections: int
    pop_max_connections: int


@dataclass
class RunArchive:
    """Everything a finished run produced, reproducible from the seed."""

    seed: int
    mode: EvolutionMode
    params: EvolutionParams
    duel_cfg: DuelConfig
    generations: list[GenerationRecord] = field(default_factory=list)
    hall: list[tuple[int, Genome]] = field(default_factory=list)
    hierarchy: DominanceHierarchy = field(default_factory=DominanceHierarchy)


def _fitness_task(args):
    host, parasites, cfg, slope = args
    wins = 0
    for parasite in parasites:
        if run_duel(host, parasite, cfg, slope=slope).winner == "robot_a":
            wins += 1
        if run_duel(parasite, host, cfg, slope=slope).winner == "robot_b":
            wins += 1
    return wins


def _pair_chunk_task(args):
    a, b, configs, slope = args
    wins_a = wins_b = draws = 0
    for cfg in configs:
        for first, second in ((a, b), (b, a)):
            outcome = run_duel(first, second, cfg, slope=slope)
            if outcome.winner == "draw":
                draws += 1
            elif (outcome.winner == "robot_a") == (first is a):
                wins_a += 1
            else:
                wins_b += 1
    return wins_a, wins_b, draws


class Evaluator:
    """Runs duels, optionally across a worker pool.

    Results are reduced by task index, so they are identical for any
    worker count.
    """

    def __init__(self, workers: int = 1, slope: float = 4.9):
        self.slope = slope
        self.workers = max(1, workers)
        self._pool = None
        if self.workers > 1:
            self._pool = multiprocessing.Pool(self.workers)

    def close(self) -> None:
        if self._pool is not None:
            self._pool.close()
            self._pool.join()
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _map(self, fn, tasks):
        if self._pool is None:
            return [fn(t) for t in tasks]
        chunk = max(1, len(tasks) // (self.workers * 4))
        return self._pool.map(fn, tasks, chunksize=chunk)

    def fitness(
        self, hosts: list[Genome], parasites: list[Genome], cfg: DuelConfig
    ) -> list[int]:
        tasks = [(host, parasites, cfg, self.slope) for host in hosts]
        return self._map(_fitness_task, tasks)

    def compare(
        self, a: Genome, b: Genome, configs: list[DuelConfig]
    ) -> ComparisonResult:
        chunks = []
        n = max(1, self.workers * 2)
        size = max(1, math.ceil(len(configs) / n))
        for i in range(0, len(configs), size):
            chunks.append((a, b, configs[i : i + size], self.slope))
        wins_a = wins_b = draws = 0
        for wa, wb, d in self._map(_pair_chunk_task, chunks):
            wins_a += wa
            wins_b += wb
            draws += d
        return ComparisonResult(wins_a, wins_b, draws)


def select_parasites(
    parasite_species: SpeciesSet | None,
    hall: list[tuple[int, Genome]],
    rng,
    params: EvolutionParams,
    fallback_population: list[Genome] | None = None,
) -> list[Genome]:
    """Sample the opponents one host population is evaluated against.

    The champions of the highest-performing opposing species (padded with
    next-best members of the largest species when there are too few of
    them) plus uniform draws from the Hall of Fame. At generation zero,
    with neither evaluated species nor hall available, all slots are
    uniform draws from the opposing population.
    """
    n_champs = params.parasite_species_count
    n_hall = params.parasite_hall_count
    total = n_champs + n_hall
    if parasite_species is None or not parasite_species.species:
        if fallback_population is None:
            raise ValueError("generation-zero selection needs a fallback population")
        return [
            fallback_population[rng.randrange(len(fallback_population))]
            for _ in range(total)
        ]
    ranked = sorted(
        parasite_species.species, key=lambda s: (-s.best_fitness(), s.id)
    )
    chosen = [s.best_member().genome for s in ranked[:n_champs]]
    if len(chosen) < n_champs:
        largest = sorted(
            parasite_species.species, key=lambda s: (-s.size(), s.id)
        )[0]
        members = sorted(largest.members, key=lambda m: (-m.fitness, m.index))
        i = 1  # position 0 is the champion, already selected
        while len(chosen) < n_champs:
            chosen.append(members[i % len(members)].genome)
            i += 1
    if n_hall > 0:
        if not hall:
            if fallback_population is None:
                raise ValueError("empty hall needs a fallback population")
            chosen += [
                fallback_population[rng.randrange(len(fallback_population))]
                for _ in range(n_hall)
            ]
        elif len(hall) >= n_hall:
            chosen += [genome for _, genome in rng.sample(hall, n_hall)]
        else:
            chosen += [hall[rng.randrange(len(hall))][1] for _ in range(n_hall)]
    return chosen


def evaluate_host_population(
    hosts: list[Genome],
    parasites: list[Genome],
    cfg: DuelConfig,
    mode: EvolutionMode,
    evaluator: Evaluator | None = None,
    flip_rng=None,
) -> list[int]:
    """Raw fitness per host: wins over two games against every parasite.

    One game from each starting side, on the standard training layout;
    timeouts and losses score nothing. The random-fitness control decides
    every game with a fair coin flip instead of simulation.
    """
    if mode.kind == RANDOM_FITNESS:
        if flip_rng is None:
            raise ValueError("random-fitness evaluation needs a flip stream")
        return [
            sum(
                1
                for _ in range(2 * len(parasites))
                if flip_rng.random() < 0.5
            )
            for _ in hosts
        ]
    if evaluator is None:
        evaluator = Evaluator()
    return evaluator.fitness(hosts, parasites, cfg)


def generation_champion(
    host_champ: Genome, parasite_champ: Genome, compare_fn
) -> tuple[Genome, str, ComparisonResult]:
    """Winner of the full comparison between the population champions.

    An exact tie goes to the host-side champion.
    """
    result = compare_fn(host_champ, parasite_champ)
    if result.superior == "b":
        return parasite_champ, "b", result
    return host_champ, "a", result


def _population_champion(
    genomes: list[Genome], fitness: list[int]
) -> tuple[Genome, float]:
    best = 0
    for i in range(1, len(genomes)):
        if fitness[i] > fitness[best]:
            best = i
    return genomes[best], fitness[best]


def run_coevolution(
    params: EvolutionParams,
    mode: EvolutionMode,
    generations: int,
    seed: int,
    duel_cfg: DuelConfig | None = None,
    workers: int = 1,
    progress=None,
) -> RunArchive:
    """Run the full coevolution experiment; byte-reproducible from seed."""
    if generations < 1:
        raise ValueError("generations must be >= 1")
    if duel_cfg is None:
        duel_cfg = DuelConfig()
    archive = RunArchive(seed=seed, mode=mode, params=params, duel_cfg=duel_cfg)
    eval_configs = evaluation_configs(duel_cfg)

    pops: list[list[Genome]] = []
    registries: list[InnovationRegistry] = []
    species_sets: list[SpeciesSet] = []
    prev_eval: list[SpeciesSet | None] = [None, None]
    for side in range(2):
        init_rng = stream(seed, "init", side)
        pops.append(
            [mode.initial_genome(init_rng, params) for _ in range(params.population_size)]
        )
        registries.append(InnovationRegistry.from_genome(pops[side][0]))
        species_sets.append(
            SpeciesSet(
                params.compat_threshold,
                params.target_species,
                params.threshold_step,
                params.threshold_floor,
            )
        )

    with Evaluator(workers, params.sigmoid_slope) as evaluator:
        for gen in range(generations):
            flip_rng = (
                stream(seed, "flips", gen) if mode.kind == RANDOM_FITNESS else None
            )
            if mode.kind == RANDOM_FITNESS:
                def compare_fn(a, b, _rng=flip_rng):
                    wins_a = wins_b = 0
                    for _ in range(2 * len(eval_configs)):
                        if _rng.random() < 0.5:
                            wins_a += 1
                        else:
                            wins_b += 1
                    return ComparisonResult(wins_a, wins_b, 0)
            else:
                def compare_fn(a, b):
                    return evaluator.compare(a, b, eval_configs)

            assigned = [
                assign_species(pops[side], species_sets[side], params.coeffs)
                for side in range(2)
            ]
            parasites = [
                select_parasites(
                    prev_eval[1 - side],
                    archive.hall,
                    stream(seed, "parasites", side, gen),
                    params,
                    fallback_population=pops[1 - side],
                )
                for side in range(2)
            ]
            fitness = [
                evaluate_host_population(
                    pops[side], parasites[side], duel_cfg, mode, evaluator, flip_rng
                )
                for side in range(2)
            ]
            for side in range(2):
                for s in assigned[side].species:
                    for m in s.members:
                        m.fitness = float(fitness[side][m.index])
                update_stagnation(assigned[side])

            champ_a, best_a = _population_champion(pops[0], fitness[0])
            champ_b, best_b = _population_champion(pops[1], fitness[1])
            champion, side_label, _ = generation_champion(
                champ_a, champ_b, compare_fn
            )
            archive.hall.append((gen, champion))
            update_dominance(archive.hierarchy, champion, gen, compare_fn)

            all_genomes = pops[0] + pops[1]
            conn_counts = [len(g.connections) for g in all_genomes]
            record = GenerationRecord(
                generation=gen,
                champion_a=champ_a,
                champion_b=champ_b,
                generation_champion=champion,
                champion_side=side_label,
                best_fitness_a=best_a,
                best_fitness_b=best_b,
                species_a=[
                    SpeciesStat(
                        s.id, s.size(), s.best_fitness(), s.age, s.last_improvement
                    )
                    for s in assigned[0].species
                ],
                species_b=[
                    SpeciesStat(
                        s.id, s.size(), s.best_fitness(), s.age, s.last_improvement
                    )
                    for s in assigned[1].species
                ],
                delta_t_a=assigned[0].threshold,
                delta_t_b=assigned[1].threshold,
                dominance_level=len(archive.hierarchy),
                champion_nodes=len(champion.nodes),
                champion_connections=len(champion.connections),
                pop_min_connections=min(conn_counts),
                pop_max_connections=max(conn_counts),
            )
            archive.generations.append(record)
            if progress is not None:
                progress(record)

            for side in range(2):
                sset = assigned[side]
                share_fitness(sset)
                counts = allocate_offspring(
                    sset, params.population_size, params.stagnation_limit
                )
                reseat_representatives(sset, stream(seed, "speciate", side, gen))
                pops[side] = reproduce(
                    sset,
                    counts,
                    registries[side],
                    stream(seed, "reproduce", side, gen),
                    params,
                    mode.structural,
                )
                registries[side].end_generation()
                adjust_threshold(sset)
                species_sets[side] = sset
                prev_eval[side] = sset
    return archive
