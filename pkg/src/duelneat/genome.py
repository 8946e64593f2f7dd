"""Genetic representation and operators for topology-growing networks.

A genome is a list of node genes plus a list of connection genes. Every
connection gene carries an innovation number, a global chronological id
assigned when the structure first appeared. Innovation numbers let
crossover line up genes of structurally different parents without any
topological analysis, and they drive the compatibility distance used for
speciation.
"""

import math
from dataclasses import dataclass, replace

from .params import DEFAULT_PARAMS, CompatibilityCoeffs, EvolutionParams

SENSOR = "sensor"
BIAS = "bias"
HIDDEN = "hidden"
OUTPUT = "output"

NODE_KINDS = (SENSOR, BIAS, HIDDEN, OUTPUT)


@dataclass(frozen=True)
class NodeGene:
    id: int
    kind: str


@dataclass(frozen=True)
class ConnectionGene:
    innovation: int
    in_node: int
    out_node: int
    weight: float
    enabled: bool


@dataclass(frozen=True)
class IoSpec:
    """Fixed sensor/bias/output interface of a genome.

    Node ids are canonical: sensors 1..S, bias S+1..S+B, outputs follow.
    Hidden node ids start after all interface nodes.
    """

    sensor_count: int
    bias_count: int
    output_count: int

    @property
    def input_count(self) -> int:
        return self.sensor_count + self.bias_count

    @property
    def node_count(self) -> int:
        return self.sensor_count + self.bias_count + self.output_count

    def sensor_ids(self):
        return range(1, self.sensor_count + 1)

    def bias_ids(self):
        return range(self.sensor_count + 1, self.input_count + 1)

    def output_ids(self):
        return range(self.input_count + 1, self.node_count + 1)

    def io_nodes(self) -> list[NodeGene]:
        nodes = [NodeGene(i, SENSOR) for i in self.sensor_ids()]
        nodes += [NodeGene(i, BIAS) for i in self.bias_ids()]
        nodes += [NodeGene(i, OUTPUT) for i in self.output_ids()]
        return nodes

    def kind_of(self, node_id: int) -> str:
        if 1 <= node_id <= self.sensor_count:
            return SENSOR
        if node_id <= self.input_count:
            return BIAS
        if node_id <= self.node_count:
            return OUTPUT
        return HIDDEN


@dataclass
class Genome:
    """Immutable-by-convention genome; operators return new instances."""

    nodes: list[NodeGene]
    connections: list[ConnectionGene]  # always sorted by innovation
    io_spec: IoSpec

    def node_ids(self) -> list[int]:
        return [n.id for n in self.nodes]

    def hidden_count(self) -> int:
        return sum(1 for n in self.nodes if n.kind == HIDDEN)

    def innovations(self) -> list[int]:
        return [c.innovation for c in self.connections]

    def pairs(self) -> set[tuple[int, int]]:
        return {(c.in_node, c.out_node) for c in self.connections}

    def max_innovation(self) -> int:
        return self.connections[-1].innovation if self.connections else 0

    def enabled_connections(self) -> list[ConnectionGene]:
        return [c for c in self.connections if c.enabled]

    def validate(self) -> None:
        """Raise ValueError on any violated genome invariant."""
        ids = self.node_ids()
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate node id")
        io = self.io_spec
        expected_io = {n.id: n.kind for n in io.io_nodes()}
        for node_id, kind in expected_io.items():
            if (NodeGene(node_id, kind)) not in self.nodes:
                raise ValueError(f"missing interface node {node_id} ({kind})")
        for n in self.nodes:
            if n.id in expected_io:
                if n.kind != expected_io[n.id]:
                    raise ValueError(f"node {n.id} kind mismatch")
            elif n.kind != HIDDEN:
                raise ValueError(f"node {n.id} outside interface must be hidden")
        id_set = set(ids)
        innovations = self.innovations()
        if len(innovations) != len(set(innovations)):
            raise ValueError("duplicate innovation number")
        if innovations != sorted(innovations):
            raise ValueError("connections not sorted by innovation")
        pairs = [(c.in_node, c.out_node) for c in self.connections]
        if len(pairs) != len(set(pairs)):
            raise ValueError("duplicate connection pair")
        for c in self.connections:
            if c.in_node not in id_set or c.out_node not in id_set:
                raise ValueError(f"gene {c.innovation} references a missing node")
            if io.kind_of(c.out_node) in (SENSOR, BIAS):
                raise ValueError(f"gene {c.innovation} targets an input node")


class InnovationRegistry:
    """Assigns innovation numbers and node ids, deduplicated per generation.

    Identical structural mutations occurring independently within one
    generation receive identical markings; `end_generation` clears the
    memo so later generations get fresh numbers.
    """

    def __init__(self, next_innovation: int = 1, next_node_id: int = 1):
        self.next_innovation = next_innovation
        self.next_node_id = next_node_id
        self._seen: dict[tuple, tuple] = {}

    @classmethod
    def from_genome(cls, genome: Genome) -> "InnovationRegistry":
        """Registry primed to continue after an existing genome's markings."""
        max_node = max(n.id for n in genome.nodes)
        return cls(genome.max_innovation() + 1, max_node + 1)

    def connection_innovation(self, in_node: int, out_node: int) -> int:
        key = ("conn", in_node, out_node)
        if key not in self._seen:
            self._seen[key] = (self.next_innovation,)
            self.next_innovation += 1
        return self._seen[key][0]

    def node_split(self, split_innovation: int) -> tuple[int, int, int]:
        """Markings for splitting a connection: (node id, in gene, out gene)."""
        key = ("node", split_innovation)
        if key not in self._seen:
            self._seen[key] = (
                self.next_node_id,
                self.next_innovation,
                self.next_innovation + 1,
            )
            self.next_node_id += 1
            self.next_innovation += 2
        return self._seen[key]

    def end_generation(self) -> None:
        self._seen.clear()


def _clamp_weight(w: float, params: EvolutionParams) -> float:
    cap = params.weight_cap
    if w > cap:
        return cap
    if w < -cap:
        return -cap
    return w


def minimal_genome(
    io_spec: IoSpec, rng, params: EvolutionParams = DEFAULT_PARAMS
) -> Genome:
    """Fully connected inputs-to-outputs genome with no hidden nodes.

    All genomes built this way share the same structure and the same
    canonical innovation numbering (pairs sorted by (in, out)), so an
    initial population differs only in its random weights.
    """
    if io_spec.sensor_count <= 0 or io_spec.output_count < 1:
        raise ValueError("io spec needs at least one sensor and one output")
    nodes = io_spec.io_nodes()
    pairs = sorted(
        (i, o)
        for i in list(io_spec.sensor_ids()) + list(io_spec.bias_ids())
        for o in io_spec.output_ids()
    )
    connections = [
        ConnectionGene(
            innovation=k,
            in_node=i,
            out_node=o,
            weight=rng.uniform(-params.weight_init_range, params.weight_init_range),
            enabled=True,
        )
        for k, (i, o) in enumerate(pairs, start=1)
    ]
    return Genome(nodes, connections, io_spec)


def fully_connected_genome(
    io_spec: IoSpec,
    hidden_count: int,
    rng,
    params: EvolutionParams = DEFAULT_PARAMS,
) -> Genome:
    """Fully recurrent genome with direct input-output connections.

    Connects every input to every hidden and output node, every hidden
    node to every hidden (self loops included) and output node. Markings
    are canonical ((in, out) sort order), so all genomes built from the
    same shape share them.
    """
    if hidden_count < 0:
        raise ValueError("hidden_count must be >= 0")
    nodes = io_spec.io_nodes()
    hidden_ids = list(
        range(io_spec.node_count + 1, io_spec.node_count + hidden_count + 1)
    )
    nodes += [NodeGene(i, HIDDEN) for i in hidden_ids]
    input_ids = list(io_spec.sensor_ids()) + list(io_spec.bias_ids())
    output_ids = list(io_spec.output_ids())
    pairs = set()
    for i in input_ids:
        for h in hidden_ids:
            pairs.add((i, h))
        for o in output_ids:
            pairs.add((i, o))
    for h in hidden_ids:
        for h2 in hidden_ids:
            pairs.add((h, h2))
        for o in output_ids:
            pairs.add((h, o))
    connections = [
        ConnectionGene(
            innovation=k,
            in_node=i,
            out_node=o,
            weight=rng.uniform(-params.weight_init_range, params.weight_init_range),
            enabled=True,
        )
        for k, (i, o) in enumerate(sorted(pairs), start=1)
    ]
    return Genome(nodes, connections, io_spec)


def mutate_weights(
    genome: Genome, rng, params: EvolutionParams = DEFAULT_PARAMS
) -> Genome:
    """Perturb or replace connection weights behind the per-genome gate.

    With probability `weight_mutation_rate` every weight is independently
    either uniformly perturbed (`weight_perturb_prob`) or assigned a fresh
    uniform random value; otherwise the genome is returned untouched.
    Weights are clamped to the weight cap.
    """
    if rng.random() >= params.weight_mutation_rate:
        return genome
    new_connections = []
    for c in genome.connections:
        if rng.random() < params.weight_perturb_prob:
            w = c.weight + rng.uniform(
                -params.weight_perturb_range, params.weight_perturb_range
            )
        else:
            w = rng.uniform(-params.weight_init_range, params.weight_init_range)
        new_connections.append(replace(c, weight=_clamp_weight(w, params)))
    return Genome(list(genome.nodes), new_connections, genome.io_spec)


def _legal_new_pairs(genome: Genome) -> list[tuple[int, int]]:
    existing = genome.pairs()
    io = genome.io_spec
    targets = [n.id for n in genome.nodes if n.kind in (HIDDEN, OUTPUT)]
    return sorted(
        (i, o)
        for i in genome.node_ids()
        for o in targets
        if (i, o) not in existing
    )


def mutate_add_connection(
    genome: Genome,
    registry: InnovationRegistry,
    rng,
    params: EvolutionParams = DEFAULT_PARAMS,
) -> Genome:
    """Add one new enabled connection between previously unconnected nodes.

    The pair is uniform over all legal ordered pairs: any source node to
    any hidden or output node, recurrent pairs and self loops included,
    duplicates of existing pairs excluded. Returns the input genome object
    unchanged when no legal pair exists (no-op signal).
    """
    pairs = _legal_new_pairs(genome)
    if not pairs:
        return genome
    in_node, out_node = pairs[rng.randrange(len(pairs))]
    innovation = registry.connection_innovation(in_node, out_node)
    gene = ConnectionGene(
        innovation=innovation,
        in_node=in_node,
        out_node=out_node,
        weight=rng.uniform(-params.weight_init_range, params.weight_init_range),
        enabled=True,
    )
    connections = sorted(
        genome.connections + [gene], key=lambda c: c.innovation
    )
    return Genome(list(genome.nodes), connections, genome.io_spec)


def mutate_add_node(
    genome: Genome, registry: InnovationRegistry, rng
) -> Genome:
    """Split a uniformly chosen enabled connection with a new hidden node.

    The old gene is disabled and replaced in the phenotype by
    in -> new (weight 1.0) and new -> out (the old weight), so the
    composed function starts out close to the original connection.
    Returns the input genome unchanged when nothing can be split.
    """
    enabled = genome.enabled_connections()
    if not enabled:
        return genome
    target = enabled[rng.randrange(len(enabled))]
    node_id, innov_in, innov_out = registry.node_split(target.innovation)
    connections = [
        replace(c, enabled=False) if c.innovation == target.innovation else c
        for c in genome.connections
    ]
    connections.append(
        ConnectionGene(innov_in, target.in_node, node_id, 1.0, True)
    )
    connections.append(
        ConnectionGene(innov_out, node_id, target.out_node, target.weight, True)
    )
    connections.sort(key=lambda c: c.innovation)
    nodes = list(genome.nodes) + [NodeGene(node_id, HIDDEN)]
    return Genome(nodes, connections, genome.io_spec)


def mutate_remove_connection(genome: Genome, rng) -> Genome:
    """Delete a uniformly chosen connection gene (simplifying evolution).

    A hidden node left without any attached connection is deleted with it.
    Interface nodes are never removed. Returns the input genome unchanged
    when there is nothing to remove.
    """
    if not genome.connections:
        return genome
    idx = rng.randrange(len(genome.connections))
    connections = genome.connections[:idx] + genome.connections[idx + 1 :]
    referenced = set()
    for c in connections:
        referenced.add(c.in_node)
        referenced.add(c.out_node)
    nodes = [
        n
        for n in genome.nodes
        if n.kind != HIDDEN or n.id in referenced
    ]
    return Genome(nodes, connections, genome.io_spec)


def crossover(
    parent_a: Genome,
    fit_a: float,
    parent_b: Genome,
    fit_b: float,
    rng,
    params: EvolutionParams = DEFAULT_PARAMS,
    inherit_both_on_tie: bool = True,
) -> Genome:
    """Recombine two parents by lining genes up on innovation numbers.

    Matching genes come from either parent at random, or carry the mean of
    the two weights for an averaging mating (rate `weight_average_rate`).
    Disjoint and excess genes come from the fitter parent; on a fitness
    tie each is inherited with probability 1/2 from its owner (or, with
    `inherit_both_on_tie` False, only from `parent_a`, which keeps
    offspring size bounded by a parent in simplifying runs). A gene
    disabled in either parent stays disabled with probability
    `disable_inherit_prob`.
    """
    if parent_a.io_spec != parent_b.io_spec:
        raise ValueError("cannot cross genomes with different io specs")
    genes_a = {c.innovation: c for c in parent_a.connections}
    genes_b = {c.innovation: c for c in parent_b.connections}
    averaging = rng.random() < params.weight_average_rate
    if fit_a > fit_b:
        source = "a"
    elif fit_b > fit_a:
        source = "b"
    else:
        source = "tie"

    offspring: list[ConnectionGene] = []
    used_pairs: set[tuple[int, int]] = set()
    for innovation in sorted(set(genes_a) | set(genes_b)):
        ga = genes_a.get(innovation)
        gb = genes_b.get(innovation)
        if ga is not None and gb is not None:
            if averaging:
                weight = (ga.weight + gb.weight) / 2.0
            else:
                weight = ga.weight if rng.random() < 0.5 else gb.weight
            template = ga
            disabled_in_parent = not (ga.enabled and gb.enabled)
        else:
            gene = ga if ga is not None else gb
            owner = "a" if ga is not None else "b"
            if source == "tie":
                if inherit_both_on_tie:
                    if not rng.random() < 0.5:
                        continue
                elif owner != "a":
                    continue
            elif owner != source:
                continue
            template = gene
            weight = gene.weight
            disabled_in_parent = not gene.enabled
        pair = (template.in_node, template.out_node)
        if pair in used_pairs:
            continue
        used_pairs.add(pair)
        enabled = True
        if disabled_in_parent and rng.random() < params.disable_inherit_prob:
            enabled = False
        offspring.append(replace(template, weight=weight, enabled=enabled))

    io = parent_a.io_spec
    node_kinds = {n.id: n.kind for n in parent_a.nodes}
    node_kinds.update({n.id: n.kind for n in parent_b.nodes})
    referenced = set()
    for c in offspring:
        referenced.add(c.in_node)
        referenced.add(c.out_node)
    nodes = io.io_nodes()
    io_ids = {n.id for n in nodes}
    for node_id in sorted(referenced - io_ids):
        nodes.append(NodeGene(node_id, node_kinds[node_id]))
    return Genome(nodes, offspring, io)


def compatibility_distance(
    a: Genome, b: Genome, coeffs: CompatibilityCoeffs
) -> float:
    """Linear combination of excess genes, disjoint genes and weight drift.

    A gene is excess when its innovation number lies strictly beyond the
    other genome's highest marking, disjoint when it is unmatched inside
    that range. The weight term is the mean absolute weight difference
    over matching genes (zero when nothing matches).
    """
    innov_a = {c.innovation: c for c in a.connections}
    innov_b = {c.innovation: c for c in b.connections}
    max_a = a.max_innovation()
    max_b = b.max_innovation()
    excess = 0
    disjoint = 0
    diff_sum = 0.0
    matching = 0
    for innovation in sorted(set(innov_a) | set(innov_b)):
        in_a = innovation in innov_a
        in_b = innovation in innov_b
        if in_a and in_b:
            matching += 1
            diff_sum += math.fabs(
                innov_a[innovation].weight - innov_b[innovation].weight
            )
        elif in_a:
            if innovation > max_b:
                excess += 1
            else:
                disjoint += 1
        else:
            if innovation > max_a:
                excess += 1
            else:
                disjoint += 1
    mean_diff = diff_sum / matching if matching else 0.0
    if coeffs.normalize:
        n = max(len(a.connections), len(b.connections), 1)
    else:
        n = 1
    return (
        coeffs.excess_coeff * excess / n
        + coeffs.disjoint_coeff * disjoint / n
        + coeffs.weight_coeff * mean_diff
    )
