"""Shared builders for the test suite."""

import random

import pytest

from duelneat.duel import DUEL_IO_SPEC
from duelneat.genome import (
    ConnectionGene,
    Genome,
    InnovationRegistry,
    IoSpec,
    minimal_genome,
    mutate_add_connection,
    mutate_add_node,
    mutate_weights,
)

SMALL_IO = IoSpec(sensor_count=2, bias_count=1, output_count=1)


def make_genome(connections, io_spec=SMALL_IO, hidden_ids=()):
    """Genome from (innovation, in, out, weight[, enabled]) tuples."""
    from duelneat.genome import HIDDEN, NodeGene

    nodes = io_spec.io_nodes()
    nodes += [NodeGene(h, HIDDEN) for h in sorted(hidden_ids)]
    genes = []
    for spec in connections:
        innovation, in_node, out_node, weight = spec[:4]
        enabled = spec[4] if len(spec) > 4 else True
        genes.append(ConnectionGene(innovation, in_node, out_node, weight, enabled))
    genes.sort(key=lambda c: c.innovation)
    return Genome(nodes, genes, io_spec)


def grown_duel_genome(seed: int, steps: int = 30) -> Genome:
    """A duel genome grown by a random mutation walk."""
    rng = random.Random(seed)
    genome = minimal_genome(DUEL_IO_SPEC, rng)
    registry = InnovationRegistry.from_genome(genome)
    for _ in range(steps):
        roll = rng.random()
        if roll < 0.15:
            genome = mutate_add_node(genome, registry, rng)
        elif roll < 0.5:
            genome = mutate_add_connection(genome, registry, rng)
        genome = mutate_weights(genome, rng)
        registry.end_generation()
    return genome


@pytest.fixture
def rng():
    return random.Random(1234)
