"""Line-oriented, versioned text format for genomes.

Layout:

    duelneat-genome 1 <sensors> <bias> <outputs>
    node <id> <kind>
    conn <innovation> <in> <out> <weight> <0|1>

Weights are written with 17 significant digits, which round-trips IEEE
doubles exactly, so decode(encode(g)) is field-for-field identical to g.
"""

from .genome import NODE_KINDS, ConnectionGene, Genome, IoSpec, NodeGene

GENOME_MAGIC = "duelneat-genome"
GENOME_VERSION = 1


class GenomeParseError(ValueError):
    """Malformed genome text; message names the line and field."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnsupportedVersionError(GenomeParseError):
    pass


def encode_genome(genome: Genome) -> str:
    io = genome.io_spec
    lines = [
        f"{GENOME_MAGIC} {GENOME_VERSION} "
        f"{io.sensor_count} {io.bias_count} {io.output_count}"
    ]
    for n in genome.nodes:
        lines.append(f"node {n.id} {n.kind}")
    for c in genome.connections:
        enabled = 1 if c.enabled else 0
        lines.append(
            f"conn {c.innovation} {c.in_node} {c.out_node} {c.weight:.17g} {enabled}"
        )
    return "\n".join(lines) + "\n"


def _parse_int(token: str, field: str, line_no: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise GenomeParseError(f"field '{field}' is not an integer: {token!r}", line_no)


def _parse_float(token: str, field: str, line_no: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise GenomeParseError(f"field '{field}' is not a number: {token!r}", line_no)


def decode_genome(text) -> Genome:
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    lines = text.splitlines()
    if not lines:
        raise GenomeParseError("empty input", 1)
    header = lines[0].split()
    if len(header) != 5 or header[0] != GENOME_MAGIC:
        raise GenomeParseError(
            f"expected '{GENOME_MAGIC} <version> <sensors> <bias> <outputs>' header", 1
        )
    version = _parse_int(header[1], "version", 1)
    if version != GENOME_VERSION:
        raise UnsupportedVersionError(f"unknown format version {version}", 1)
    io = IoSpec(
        _parse_int(header[2], "sensors", 1),
        _parse_int(header[3], "bias", 1),
        _parse_int(header[4], "outputs", 1),
    )
    nodes: list[NodeGene] = []
    connections: list[ConnectionGene] = []
    seen_nodes: set[int] = set()
    seen_innovations: set[int] = set()
    for line_no, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        fields = raw.split()
        if fields[0] == "node":
            if len(fields) != 3:
                raise GenomeParseError("node line needs 'node <id> <kind>'", line_no)
            node_id = _parse_int(fields[1], "id", line_no)
            kind = fields[2]
            if kind not in NODE_KINDS:
                raise GenomeParseError(f"field 'kind' unknown: {kind!r}", line_no)
            if node_id in seen_nodes:
                raise GenomeParseError(f"duplicate node id {node_id}", line_no)
            seen_nodes.add(node_id)
            nodes.append(NodeGene(node_id, kind))
        elif fields[0] == "conn":
            if len(fields) != 6:
                raise GenomeParseError(
                    "conn line needs 'conn <innovation> <in> <out> <weight> <0|1>'",
                    line_no,
                )
            innovation = _parse_int(fields[1], "innovation", line_no)
            if innovation in seen_innovations:
                raise GenomeParseError(
                    f"duplicate innovation number {innovation}", line_no
                )
            seen_innovations.add(innovation)
            enabled_token = fields[5]
            if enabled_token not in ("0", "1"):
                raise GenomeParseError(
                    f"field 'enabled' must be 0 or 1: {enabled_token!r}", line_no
                )
            connections.append(
                ConnectionGene(
                    innovation=innovation,
                    in_node=_parse_int(fields[2], "in", line_no),
                    out_node=_parse_int(fields[3], "out", line_no),
                    weight=_parse_float(fields[4], "weight", line_no),
                    enabled=enabled_token == "1",
                )
            )
        else:
            raise GenomeParseError(f"unknown record type {fields[0]!r}", line_no)
    connections.sort(key=lambda c: c.innovation)
    genome = Genome(nodes, connections, io)
    try:
        genome.validate()
    except ValueError as err:
        raise GenomeParseError(str(err), len(lines)) from err
    return genome


def write_genome(genome: Genome, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(encode_genome(genome))


def read_genome(path) -> Genome:
    with open(path) as fh:
        return decode_genome(fh.read())
