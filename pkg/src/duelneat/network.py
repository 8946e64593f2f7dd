"""Phenotype construction and synchronous recurrent execution."""

import math

from .genome import BIAS, OUTPUT, SENSOR, Genome


def steep_sigmoid(x: float, slope: float = 4.9) -> float:
    """Steepened logistic transfer function used at every node."""
    z = -slope * x
    if z > 709.0:  # exp would overflow; the true value underflows to 0
        return 0.0
    return 1.0 / (1.0 + math.exp(z))


class Network:
    """Executable network decoded from a genome.

    Activation is one fully synchronous propagation step per call: every
    non-input node reads the previous activations of its sources, with
    sensor and bias values applied before summation. Disabled genes
    contribute no edges. Instances hold mutable activation state and are
    therefore single-threaded; distinct instances are independent.
    """

    __slots__ = (
        "node_index",
        "in_edges",
        "is_input",
        "activations",
        "sensor_slots",
        "bias_slots",
        "output_slots",
        "slope",
    )

    def __init__(self, genome: Genome, slope: float = 4.9):
        self.slope = slope
        self.node_index = {n.id: i for i, n in enumerate(genome.nodes)}
        n = len(genome.nodes)
        self.in_edges: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        for c in genome.connections:
            if c.enabled:
                self.in_edges[self.node_index[c.out_node]].append(
                    (self.node_index[c.in_node], c.weight)
                )
        self.sensor_slots = [
            self.node_index[node.id] for node in genome.nodes if node.kind == SENSOR
        ]
        self.bias_slots = [
            self.node_index[node.id] for node in genome.nodes if node.kind == BIAS
        ]
        self.output_slots = [
            self.node_index[node.id] for node in genome.nodes if node.kind == OUTPUT
        ]
        self.is_input = [node.kind in (SENSOR, BIAS) for node in genome.nodes]
        self.activations = [0.0] * n
        for i in self.bias_slots:
            self.activations[i] = 1.0

    @property
    def size(self) -> int:
        return len(self.activations)

    def edge_count(self) -> int:
        return sum(len(edges) for edges in self.in_edges)

    def reset(self) -> None:
        """Zero all memory; bias stays at 1.0."""
        for i in range(len(self.activations)):
            self.activations[i] = 0.0
        for i in self.bias_slots:
            self.activations[i] = 1.0

    def activate(self, sensors) -> tuple[float, ...]:
        """Run one synchronous step and return the output activations."""
        act = self.activations
        for slot, value in zip(self.sensor_slots, sensors):
            act[slot] = value
        for slot in self.bias_slots:
            act[slot] = 1.0
        nxt = act.copy()
        slope = self.slope
        for i in range(len(act)):
            if self.is_input[i]:
                continue
            total = 0.0
            for src, w in self.in_edges[i]:
                total += w * act[src]
            nxt[i] = steep_sigmoid(total, slope)
        self.activations = nxt
        return tuple(nxt[i] for i in self.output_slots)


def build_phenotype(genome: Genome, slope: float = 4.9) -> Network:
    """Decode a genome into a runnable network (enabled genes only)."""
    return Network(genome, slope)
