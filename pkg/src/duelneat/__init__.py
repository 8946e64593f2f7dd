"""Complexifying neuroevolution with a deterministic robot-duel arena."""

from .genome import (
    ConnectionGene,
    Genome,
    InnovationRegistry,
    IoSpec,
    NodeGene,
    compatibility_distance,
    crossover,
    fully_connected_genome,
    minimal_genome,
    mutate_add_connection,
    mutate_add_node,
    mutate_remove_connection,
    mutate_weights,
)
from .genome_io import decode_genome, encode_genome, read_genome, write_genome
from .network import Network, build_phenotype, steep_sigmoid
from .params import DEFAULT_PARAMS, CompatibilityCoeffs, EvolutionParams
from .duel import (
    DUEL_IO_SPEC,
    DuelConfig,
    DuelOutcome,
    SensorFrame,
    WorldState,
    evaluation_configs,
    init_duel,
    mirror_config,
    mirror_genome,
    run_duel,
    sense,
    standard_food_layout,
    step,
)
from .backend import HAVE_COMPILED, default_backend
from .speciation import (
    Species,
    SpeciesSet,
    adjust_threshold,
    allocate_offspring,
    assign_species,
    reproduce,
    share_fitness,
)
from .dominance import (
    ComparisonResult,
    DominanceHierarchy,
    compare,
    complexity_series,
    dominance_gap_curve,
    performance_score,
    update_dominance,
)
from .coevolution import (
    Evaluator,
    EvolutionMode,
    RunArchive,
    evaluate_host_population,
    run_coevolution,
    select_parasites,
)
from .archive import load_archive, save_archive

__version__ = "0.1.0"
