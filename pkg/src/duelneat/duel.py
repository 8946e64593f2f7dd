"""Deterministic two-robot duel simulation.

Two wheeled robots forage for food and try to collide with the opponent
while holding more energy. Each robot carries five food rangefinders and
five opponent rangefinders spread over the frontal 180 degree arc, one
wall proximity sensor and one energy difference sensor; its three network
outputs encode left turn, right turn and forward power.

Coordinates in configs, replays and all file formats live on the
[0, 600] x [0, 600] board. Internally the simulation stores positions
relative to the board center and headings as unit vectors: negation is
exact in floating point, which makes self play on the rotationally
symmetric standard layout exactly symmetric, and duels bit-reproducible
across runs and backends.
"""

import math
from dataclasses import dataclass, field, replace

from .genome import ConnectionGene, Genome, IoSpec, NodeGene
from .network import Network

BOARD_SIZE = 600.0
HALF_BOARD = 300.0

# The duel interface: 5 food + 5 robot + wall + energy difference sensors,
# one bias, and left/right/forward outputs.
DUEL_IO_SPEC = IoSpec(sensor_count=12, bias_count=1, output_count=3)

TURN_COEFF = 0.24
FORWARD_COEFF = 1.33

# Ring sector boundaries at +-18 and +-54 degrees off the heading, stored
# as shared sine/cosine pairs so reflected bearings classify into exactly
# mirrored sectors.
_S18 = math.sin(0.1 * math.pi)
_C18 = math.cos(0.1 * math.pi)
_S54 = math.sin(0.3 * math.pi)
_C54 = math.cos(0.3 * math.pi)


@dataclass
class RobotState:
    """Pose and energy of one robot (centered coordinates, unit heading)."""

    x: float
    y: float
    hx: float
    hy: float
    energy: float

    @property
    def board_position(self) -> tuple[float, float]:
        return (self.x + HALF_BOARD, self.y + HALF_BOARD)

    @property
    def heading(self) -> float:
        return math.atan2(self.hy, self.hx)


@dataclass
class FoodItem:
    x: float
    y: float
    consumed: bool = False


@dataclass(frozen=True)
class DuelOutcome:
    winner: str  # robot_a | robot_b | draw
    reason: str  # collision | timeout
    steps: int
    replay: tuple | None = None


@dataclass(frozen=True)
class SensorFrame:
    food_ring: tuple[float, float, float, float, float]
    robot_ring: tuple[float, float, float, float, float]
    wall: float
    energy_diff: float

    def as_inputs(self) -> list[float]:
        return list(self.food_ring) + list(self.robot_ring) + [
            self.wall,
            self.energy_diff,
        ]


def standard_food_layout() -> list[tuple[float, float]]:
    """Nine food positions, horizontally symmetric around the middle."""
    return [
        (x, y)
        for y in (150.0, 300.0, 450.0)
        for x in (100.0, 300.0, 500.0)
    ]


WEST_EXTRA_SLOTS = [
    (x, y)
    for y in (120.0, 240.0, 360.0, 480.0)
    for x in (75.0, 150.0, 225.0)
]
EAST_EXTRA_SLOTS = [(BOARD_SIZE - x, y) for (x, y) in WEST_EXTRA_SLOTS]

START_POSES = ((60.0, 300.0, math.pi), (540.0, 300.0, 0.0))


@dataclass(frozen=True)
class DuelConfig:
    """Board layout and physical constants of one duel."""

    food_layout: tuple[tuple[float, float], ...] = tuple(standard_food_layout())
    start_poses: tuple[tuple[float, float, float], ...] = START_POSES
    max_steps: int = 750
    initial_energy: float = 2000.0
    food_energy: float = 500.0
    collision_radius: float = 20.0
    pickup_radius: float = 20.0
    sensor_range: float = 300.0
    wall_sensor_range: float = 100.0


def evaluation_configs(base: DuelConfig | None = None) -> list[DuelConfig]:
    """The 144 comparison layouts: 9 base items plus one extra per half.

    Every pairing of the 12 west-half slots with their 12 east-half mirror
    slots appears once, so comparisons sample advantaged and disadvantaged
    starts evenly.
    """
    if base is None:
        base = DuelConfig()
    nine = tuple(standard_food_layout())
    configs = []
    for west in WEST_EXTRA_SLOTS:
        for east in EAST_EXTRA_SLOTS:
            configs.append(replace(base, food_layout=nine + (west, east)))
    return configs


@dataclass
class WorldState:
    """Mutable duel state; one instance per duel, single threaded."""

    robots: list[RobotState]
    food: list[FoodItem]
    cfg: DuelConfig
    step_count: int = 0
    outcome: DuelOutcome | None = None


def _heading_vector(angle: float) -> tuple[float, float]:
    hx = math.cos(angle)
    hy = math.sin(angle)
    # Snap cardinal directions so the default east/west starting headings
    # are exact negations of each other.
    if math.fabs(hx) < 1e-12:
        hx = 0.0
    if math.fabs(hy) < 1e-12:
        hy = 0.0
    return hx, hy


def init_duel(cfg: DuelConfig) -> WorldState:
    """Fresh world: full energies, robots facing away from each other."""
    robots = []
    for (x, y, angle) in cfg.start_poses:
        hx, hy = _heading_vector(angle)
        robots.append(
            RobotState(x - HALF_BOARD, y - HALF_BOARD, hx, hy, cfg.initial_energy)
        )
    food = [FoodItem(x - HALF_BOARD, y - HALF_BOARD) for (x, y) in cfg.food_layout]
    return WorldState(robots=robots, food=food, cfg=cfg)


def _sector_of(u: float, v: float) -> int:
    """Frontal-arc sector (0 leftmost .. 4 rightmost... see note) or -1.

    u is the forward component of the target offset, v the leftward
    component. Sectors are half open, lower bearing edge inclusive, and
    numbered 0..4 from bearing -90 degrees to +90 degrees.
    """
    if u < 0.0 or (u == 0.0 and v >= 0.0):
        return -1
    if _S54 * u + _C54 * v < 0.0:
        return 0
    if _S18 * u + _C18 * v < 0.0:
        return 1
    if _S18 * u - _C18 * v > 0.0:
        return 2
    if _S54 * u - _C54 * v > 0.0:
        return 3
    return 4


def _ring(
    x: float, y: float, hx: float, hy: float, targets, sensor_range: float
) -> list[float]:
    best = [-1.0] * 5
    for (tx, ty) in targets:
        dx = tx - x
        dy = ty - y
        u = dx * hx + dy * hy
        v = dy * hx - dx * hy
        sector = _sector_of(u, v)
        if sector < 0:
            continue
        d = math.sqrt(dx * dx + dy * dy)
        if best[sector] < 0.0 or d < best[sector]:
            best[sector] = d
    values = []
    for d in best:
        if d < 0.0 or d >= sensor_range:
            values.append(0.0)
        else:
            values.append(1.0 - d / sensor_range)
    return values


def sense(world: WorldState, which: int) -> SensorFrame:
    """Compute one robot's sensor frame from the current world state."""
    if world.outcome is not None:
        raise RuntimeError("cannot sense a finished duel")
    me = world.robots[which]
    other = world.robots[1 - which]
    cfg = world.cfg
    food_targets = [(f.x, f.y) for f in world.food if not f.consumed]
    food_ring = _ring(me.x, me.y, me.hx, me.hy, food_targets, cfg.sensor_range)
    robot_ring = _ring(
        me.x, me.y, me.hx, me.hy, [(other.x, other.y)], cfg.sensor_range
    )
    dw = HALF_BOARD - me.x
    t = HALF_BOARD + me.x
    if t < dw:
        dw = t
    t = HALF_BOARD - me.y
    if t < dw:
        dw = t
    t = HALF_BOARD + me.y
    if t < dw:
        dw = t
    wall = 1.0 - dw / cfg.wall_sensor_range
    if wall < 0.0:
        wall = 0.0
    ediff = (me.energy - other.energy) / cfg.initial_energy
    if ediff > 1.0:
        ediff = 1.0
    elif ediff < -1.0:
        ediff = -1.0
    return SensorFrame(tuple(food_ring), tuple(robot_ring), wall, ediff)


def _move(robot: RobotState, left: float, right: float, forward: float) -> float:
    """Advance one robot: half turn, forward translation, half turn.

    The turn angle is proportional to the difference of the turn outputs,
    counterclockwise when the left output is larger. Returns the energy
    cost, the turn magnitude plus the forward distance.
    """
    turn = TURN_COEFF * (left - right)
    half = turn / 2.0
    c = math.cos(half)
    s = math.sin(half)
    hx = robot.hx * c - robot.hy * s
    hy = robot.hx * s + robot.hy * c
    dist = FORWARD_COEFF * forward
    x = robot.x + dist * hx
    y = robot.y + dist * hy
    hx2 = hx * c - hy * s
    hy2 = hx * s + hy * c
    if x > HALF_BOARD:
        x = HALF_BOARD
    elif x < -HALF_BOARD:
        x = -HALF_BOARD
    if y > HALF_BOARD:
        y = HALF_BOARD
    elif y < -HALF_BOARD:
        y = -HALF_BOARD
    robot.x = x
    robot.y = y
    robot.hx = hx2
    robot.hy = hy2
    return math.fabs(turn) + dist


def step(world: WorldState, out_a, out_b) -> WorldState:
    """Advance the world one tick from both controllers' outputs.

    Both robots move simultaneously from the shared prior state, pay
    energy for motion, pick up food in reach (both get a shared item on a
    tie), and then the collision rule is checked: within the collision
    radius the robot holding strictly more energy wins, an exact tie is a
    draw. Hitting the step limit without a collision is a timeout draw.
    """
    if world.outcome is not None:
        raise RuntimeError("cannot step a finished duel")
    a, b = world.robots
    cfg = world.cfg
    cost_a = _move(a, out_a[0], out_a[1], out_a[2])
    cost_b = _move(b, out_b[0], out_b[1], out_b[2])
    a.energy = a.energy - cost_a
    b.energy = b.energy - cost_b
    pickup2 = cfg.pickup_radius * cfg.pickup_radius
    for item in world.food:
        if item.consumed:
            continue
        dxa = item.x - a.x
        dya = item.y - a.y
        got_a = dxa * dxa + dya * dya <= pickup2
        dxb = item.x - b.x
        dyb = item.y - b.y
        got_b = dxb * dxb + dyb * dyb <= pickup2
        if got_a:
            a.energy = a.energy + cfg.food_energy
        if got_b:
            b.energy = b.energy + cfg.food_energy
        if got_a or got_b:
            item.consumed = True
    dx = b.x - a.x
    dy = b.y - a.y
    if dx * dx + dy * dy <= cfg.collision_radius * cfg.collision_radius:
        if a.energy > b.energy:
            winner = "robot_a"
        elif b.energy > a.energy:
            winner = "robot_b"
        else:
            winner = "draw"
        world.step_count += 1
        world.outcome = DuelOutcome(winner, "collision", world.step_count)
        return world
    world.step_count += 1
    if world.step_count >= cfg.max_steps:
        world.outcome = DuelOutcome("draw", "timeout", world.step_count)
    return world


def _replay_row(world: WorldState) -> tuple:
    a, b = world.robots
    mask = 0
    for i, item in enumerate(world.food):
        if not item.consumed:
            mask |= 1 << i
    return (
        world.step_count,
        a.x + HALF_BOARD,
        a.y + HALF_BOARD,
        math.atan2(a.hy, a.hx),
        a.energy,
        b.x + HALF_BOARD,
        b.y + HALF_BOARD,
        math.atan2(b.hy, b.hx),
        b.energy,
        mask,
    )


def _check_duel_genome(genome: Genome, name: str) -> None:
    if genome.io_spec != DUEL_IO_SPEC:
        raise ValueError(
            f"{name} does not match the duel sensor/output interface "
            f"(need {DUEL_IO_SPEC.sensor_count}/{DUEL_IO_SPEC.bias_count}/"
            f"{DUEL_IO_SPEC.output_count})"
        )


def _run_duel_python(
    genome_a: Genome,
    genome_b: Genome,
    cfg: DuelConfig,
    record: bool,
    slope: float,
) -> DuelOutcome:
    net_a = Network(genome_a, slope)
    net_b = Network(genome_b, slope)
    world = init_duel(cfg)
    rows = [] if record else None
    while world.outcome is None:
        frame_a = sense(world, 0)
        frame_b = sense(world, 1)
        out_a = net_a.activate(frame_a.as_inputs())
        out_b = net_b.activate(frame_b.as_inputs())
        step(world, out_a, out_b)
        if record:
            rows.append(_replay_row(world))
    outcome = world.outcome
    if record:
        return replace(outcome, replay=tuple(rows))
    return outcome


def run_duel(
    genome_a: Genome,
    genome_b: Genome,
    cfg: DuelConfig | None = None,
    record: bool = False,
    slope: float = 4.9,
    backend: str | None = None,
) -> DuelOutcome:
    """Play one full duel; a pure function of (genomes, config).

    Robot A starts at the first configured pose (west by default), robot B
    at the second. Fresh networks are built per duel, so no memory leaks
    across games. `backend` forces "python" or "compiled"; by default the
    compiled kernel is used when available.
    """
    from . import backend as backend_mod

    _check_duel_genome(genome_a, "genome_a")
    _check_duel_genome(genome_b, "genome_b")
    if cfg is None:
        cfg = DuelConfig()
    return backend_mod.dispatch_duel(
        genome_a, genome_b, cfg, record, slope, backend
    )


def mirror_config(cfg: DuelConfig) -> DuelConfig:
    """Reflect a config across the vertical midline of the board."""
    food = tuple((BOARD_SIZE - x, y) for (x, y) in cfg.food_layout)
    poses = tuple(
        (BOARD_SIZE - x, y, math.pi - angle) for (x, y, angle) in cfg.start_poses
    )
    return replace(cfg, food_layout=food, start_poses=poses)


def mirror_genome(genome: Genome) -> Genome:
    """Rewire a duel genome for the reflected world.

    Reflection reverses both sensor rings (sector i sees what sector 4 - i
    saw) and swaps the meaning of the left and right turn outputs, so a
    mirrored controller in a mirrored world behaves as the mirror image of
    the original. Used by the east/west fairness self checks.
    """
    _check_duel_genome(genome, "genome")
    remap = {i: 6 - i for i in range(1, 6)}  # food ring 1..5 reversed
    remap.update({i: 16 - i for i in range(6, 11)})  # robot ring 6..10 reversed
    remap[14], remap[15] = 15, 14  # left/right outputs swapped
    mapped = lambda n: remap.get(n, n)
    nodes = [NodeGene(mapped(n.id), n.kind) for n in genome.nodes]
    nodes.sort(key=lambda n: n.id)
    connections = [
        ConnectionGene(
            c.innovation, mapped(c.in_node), mapped(c.out_node), c.weight, c.enabled
        )
        for c in genome.connections
    ]
    return Genome(nodes, connections, genome.io_spec)


# Replay files: the first line is both the format/version marker and the
# column header; every following line is one executed step.
REPLAY_HEADER = (
    "# duelneat-replay 1 step x_a y_a heading_a energy_a "
    "x_b y_b heading_b energy_b food_mask"
)


def format_replay(outcome: DuelOutcome) -> str:
    if outcome.replay is None:
        raise ValueError("outcome carries no replay (run with record=True)")
    lines = [REPLAY_HEADER]
    for row in outcome.replay:
        step_no = row[0]
        mask = row[9]
        values = " ".join(f"{v:.17g}" for v in row[1:9])
        lines.append(f"{step_no} {values} {mask}")
    return "\n".join(lines) + "\n"


def parse_replay(text: str) -> tuple:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# duelneat-replay 1"):
        raise ValueError("not a duelneat replay file (bad or missing header)")
    rows = []
    for line in lines[1:]:
        if not line.strip():
            continue
        fields = line.split()
        rows.append(
            (int(fields[0]),)
            + tuple(float(v) for v in fields[1:9])
            + (int(fields[9]),)
        )
    return tuple(rows)
