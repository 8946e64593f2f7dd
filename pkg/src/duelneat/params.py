"""Evolution parameters and their published default values."""

from dataclasses import dataclass, field


@dataclass(frozen=True)
class CompatibilityCoeffs:
    """Weights of the three terms of the genome compatibility distance."""

    excess_coeff: float = 1.0
    disjoint_coeff: float = 1.0
    weight_coeff: float = 2.0
    # When False the gene-count normalizer is fixed at one, which is the
    # published setting for these population sizes.
    normalize: bool = False


@dataclass(frozen=True)
class EvolutionParams:
    """Full parameter set for a coevolution run.

    Defaults are the published experiment values; the ranges and caps that
    the experiments left unstated (weight ranges, survival fraction,
    threshold floor) are documented project choices.
    """

    population_size: int = 256
    coeffs: CompatibilityCoeffs = field(default_factory=CompatibilityCoeffs)

    # Speciation.
    compat_threshold: float = 3.0
    threshold_step: float = 0.3
    threshold_floor: float = 0.1
    target_species: int = 10
    stagnation_limit: int = 30
    elitism_threshold: int = 5  # champion copied when species size exceeds this
    survival_fraction: float = 0.20

    # Weight mutation.
    weight_mutation_rate: float = 0.80  # per-genome gate
    weight_perturb_prob: float = 0.90  # per weight; else a fresh random value
    weight_init_range: float = 1.0  # fresh weights uniform in [-range, range]
    weight_perturb_range: float = 0.5  # perturbation uniform in [-range, range]
    weight_cap: float = 8.0

    # Mating.
    disable_inherit_prob: float = 0.75
    weight_average_rate: float = 0.40
    mutation_only_rate: float = 0.25
    interspecies_mating_rate: float = 0.05

    # Structural mutation.
    add_node_prob: float = 0.01
    add_link_prob: float = 0.1
    remove_link_prob: float = 0.1  # simplifying mode only

    # Network transfer function steepness.
    sigmoid_slope: float = 4.9

    # Opponent sampling: species champions + hall-of-fame draws per evaluation.
    parasite_species_count: int = 4
    parasite_hall_count: int = 8


DEFAULT_PARAMS = EvolutionParams()
