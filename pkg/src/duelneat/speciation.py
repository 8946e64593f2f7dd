"""Species partitioning, fitness sharing, and reproduction.

The population is split into species by compatibility distance against
per-species representatives from the previous generation. Raw fitness is
shared within each species (divided by species size), offspring counts
are proportional to the shared sums, and each species breeds its quota
from its top performers with elitism for large species.
"""

import math
from fractions import Fraction

from .genome import (
    Genome,
    InnovationRegistry,
    compatibility_distance,
    crossover,
    mutate_add_connection,
    mutate_add_node,
    mutate_remove_connection,
    mutate_weights,
)
from .params import CompatibilityCoeffs, EvolutionParams


class SpeciesMember:
    __slots__ = ("index", "genome", "fitness", "adjusted")

    def __init__(self, index: int, genome: Genome):
        self.index = index
        self.genome = genome
        self.fitness: float | None = None
        self.adjusted: float | None = None


class Species:
    """One niche: a representative, its members, and stagnation history."""

    def __init__(self, species_id: int, representative: Genome):
        self.id = species_id
        self.representative = representative
        self.members: list[SpeciesMember] = []
        self.age = 0
        self.last_improvement = 0
        self.best_fitness_ever = -math.inf

    def size(self) -> int:
        return len(self.members)

    def best_member(self) -> SpeciesMember:
        return min(self.members, key=lambda m: (-m.fitness, m.index))

    def best_fitness(self) -> float:
        return max(m.fitness for m in self.members)


class SpeciesSet:
    """All species of one population plus the dynamic threshold."""

    def __init__(
        self,
        threshold: float = 3.0,
        target_species: int = 10,
        threshold_step: float = 0.3,
        threshold_floor: float = 0.1,
    ):
        self.species: list[Species] = []
        self.threshold = threshold
        self.target_species = target_species
        self.threshold_step = threshold_step
        self.threshold_floor = threshold_floor
        self.next_species_id = 1

    def population(self) -> list[SpeciesMember]:
        return [m for s in self.species for m in s.members]


def assign_species(
    genomes: list[Genome],
    previous: SpeciesSet,
    coeffs: CompatibilityCoeffs,
) -> SpeciesSet:
    """Place each genome into the first compatible previous species.

    A genome joins the first previous-generation species whose
    representative lies within the compatibility threshold; unmatched
    genomes found a new species and represent it themselves. Species left
    empty are dropped. Surviving species age by one generation.
    """
    result = SpeciesSet(
        previous.threshold,
        previous.target_species,
        previous.threshold_step,
        previous.threshold_floor,
    )
    result.next_species_id = previous.next_species_id
    shells: list[Species] = []
    for old in previous.species:
        shell = Species(old.id, old.representative)
        shell.age = old.age + 1
        shell.last_improvement = old.last_improvement
        shell.best_fitness_ever = old.best_fitness_ever
        shells.append(shell)
    new_species: list[Species] = []
    for index, genome in enumerate(genomes):
        placed = False
        for shell in shells:
            if (
                compatibility_distance(genome, shell.representative, coeffs)
                < result.threshold
            ):
                shell.members.append(SpeciesMember(index, genome))
                placed = True
                break
        if not placed:
            for fresh in new_species:
                if (
                    compatibility_distance(genome, fresh.representative, coeffs)
                    < result.threshold
                ):
                    fresh.members.append(SpeciesMember(index, genome))
                    placed = True
                    break
        if not placed:
            fresh = Species(result.next_species_id, genome)
            result.next_species_id += 1
            fresh.members.append(SpeciesMember(index, genome))
            new_species.append(fresh)
    result.species = [s for s in shells if s.members] + new_species
    return result


def reseat_representatives(species_set: SpeciesSet, rng) -> None:
    """Pick each species' next-generation representative at random."""
    for s in species_set.species:
        s.representative = s.members[rng.randrange(len(s.members))].genome


def adjust_threshold(species_set: SpeciesSet) -> SpeciesSet:
    """Steer the species count toward the target by moving the threshold."""
    count = len(species_set.species)
    if count > species_set.target_species:
        species_set.threshold += species_set.threshold_step
    elif count < species_set.target_species:
        species_set.threshold = max(
            species_set.threshold_floor,
            species_set.threshold - species_set.threshold_step,
        )
    return species_set


def share_fitness(species_set: SpeciesSet) -> SpeciesSet:
    """Adjusted fitness: raw divided by species size (niche sharing)."""
    for s in species_set.species:
        n = len(s.members)
        for m in s.members:
            if m.fitness is None:
                raise ValueError("fitness must be assigned before sharing")
            m.adjusted = m.fitness / n
    return species_set


def update_stagnation(species_set: SpeciesSet) -> None:
    """Track per-species best fitness to detect stagnant species."""
    for s in species_set.species:
        best = s.best_fitness()
        if best > s.best_fitness_ever:
            s.best_fitness_ever = best
            s.last_improvement = 0
        else:
            s.last_improvement += 1


def _stagnant_species_id(species_set: SpeciesSet, limit: int) -> int | None:
    if len(species_set.species) < 2:
        return None
    over_age = [s for s in species_set.species if s.age > limit]
    if not over_age:
        return None
    worst = min(over_age, key=lambda s: (s.best_fitness(), s.id))
    return worst.id


def allocate_offspring(
    species_set: SpeciesSet,
    pop_size: int,
    stagnation_limit: int = 30,
) -> dict[int, int]:
    """Offspring per species, proportional to summed adjusted fitness.

    Largest-remainder rounding over exact rationals, remainder ties to the
    lowest species id, so counts always total pop_size. The lowest
    performing species past the stagnation age limit is barred (allocated
    zero); with every sum zero the allocation is an equal split.
    """
    barred = _stagnant_species_id(species_set, stagnation_limit)
    sums: dict[int, Fraction] = {}
    for s in species_set.species:
        if s.id == barred:
            sums[s.id] = Fraction(0)
        else:
            total = Fraction(0)
            for m in s.members:
                if m.adjusted is None:
                    raise ValueError("share_fitness must run before allocation")
                total += Fraction(m.adjusted)
            sums[s.id] = total
    grand_total = sum(sums.values())
    if grand_total <= 0:
        eligible = [s.id for s in species_set.species if s.id != barred]
        if not eligible:
            eligible = [s.id for s in species_set.species]
        quotas = {
            sid: (Fraction(pop_size, len(eligible)) if sid in eligible else Fraction(0))
            for sid in sums
        }
    else:
        quotas = {
            sid: total * pop_size / grand_total for sid, total in sums.items()
        }
    counts = {sid: int(quota) for sid, quota in quotas.items()}
    remainders = {sid: quotas[sid] - counts[sid] for sid in quotas}
    missing = pop_size - sum(counts.values())
    for sid in sorted(remainders, key=lambda sid: (-remainders[sid], sid)):
        if missing <= 0:
            break
        counts[sid] += 1
        missing -= 1
    return counts


def _eligible_parents(species: Species, survival_fraction: float, rng):
    # Ties in raw fitness are ordered randomly so that a flat fitness
    # landscape (common early on) does not freeze breeding to an
    # arbitrary fixed subset of each species.
    decorated = [(m, rng.random()) for m in species.members]
    decorated.sort(key=lambda pair: (-pair[0].fitness, pair[1]))
    ranked = [m for m, _ in decorated]
    keep = max(1, math.ceil(survival_fraction * len(ranked)))
    return ranked, ranked[:keep]


def breed_offspring(
    species: Species,
    eligible: list[SpeciesMember],
    other_species: list[Species],
    registry: InnovationRegistry,
    rng,
    params: EvolutionParams,
    structural: str,
) -> tuple[Genome, bool]:
    """Produce one offspring; returns (genome, used_crossover).

    Mutation-only offspring copy one eligible parent; otherwise two
    parents are crossed, the second drawn from another species' champion
    for an interspecies mating. Every offspring then runs the mode's
    mutation pipeline: the gated weight mutation plus at most one
    structural mutation ("grow" adds a node or link, "shrink" removes a
    link, "frozen" leaves structure alone).
    """
    if rng.random() < params.mutation_only_rate:
        child = eligible[rng.randrange(len(eligible))].genome
        crossed = False
    else:
        first = eligible[rng.randrange(len(eligible))]
        if rng.random() < params.interspecies_mating_rate and other_species:
            partner_species = other_species[rng.randrange(len(other_species))]
            second = partner_species.best_member()
        else:
            second = eligible[rng.randrange(len(eligible))]
        child = crossover(
            first.genome,
            first.fitness,
            second.genome,
            second.fitness,
            rng,
            params,
            inherit_both_on_tie=structural != "shrink",
        )
        crossed = True
    child = mutate_weights(child, rng, params)
    if structural == "grow":
        if rng.random() < params.add_node_prob:
            child = mutate_add_node(child, registry, rng)
        elif rng.random() < params.add_link_prob:
            child = mutate_add_connection(child, registry, rng, params)
    elif structural == "shrink":
        if rng.random() < params.remove_link_prob:
            child = mutate_remove_connection(child, rng)
    return child, crossed


def reproduce(
    species_set: SpeciesSet,
    counts: dict[int, int],
    registry: InnovationRegistry,
    rng,
    params: EvolutionParams,
    structural: str = "grow",
) -> list[Genome]:
    """Breed the next generation per species, champions preserved.

    Species are processed in ascending id and offspring in index order, so
    random-stream consumption is reproducible regardless of how fitness
    evaluation was parallelized. A species larger than the elitism
    threshold copies its champion unchanged as its first offspring.
    """
    offspring: list[Genome] = []
    ordered = sorted(species_set.species, key=lambda s: s.id)
    for s in ordered:
        n = counts.get(s.id, 0)
        if n <= 0:
            continue
        ranked, eligible = _eligible_parents(s, params.survival_fraction, rng)
        others = [o for o in ordered if o.id != s.id and o.members]
        produced = 0
        if s.size() > params.elitism_threshold:
            offspring.append(s.best_member().genome)
            produced += 1
        while produced < n:
            child, _ = breed_offspring(
                s, eligible, others, registry, rng, params, structural
            )
            offspring.append(child)
            produced += 1
    return offspring
