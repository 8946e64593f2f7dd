"""Duel simulator tests: layouts, sensors, motion, energy, full duels."""

import math
from dataclasses import replace

import pytest

from conftest import grown_duel_genome, make_genome
from duelneat.duel import (
    DUEL_IO_SPEC,
    BOARD_SIZE,
    DuelConfig,
    evaluation_configs,
    init_duel,
    mirror_config,
    mirror_genome,
    run_duel,
    sense,
    standard_food_layout,
    step,
)
from duelneat.genome import ConnectionGene, Genome


def constant_output_genome(left, right, forward):
    """Genome whose outputs saturate to fixed values regardless of input."""

    def w(target_value):
        # Saturate hard through the bias so outputs approximate the target.
        if target_value >= 0.999:
            return 8.0
        if target_value <= 0.001:
            return -8.0
        return math.log(target_value / (1.0 - target_value)) / 4.9

    genes = [
        ConnectionGene(1, 13, 14, w(left), True),
        ConnectionGene(2, 13, 15, w(right), True),
        ConnectionGene(3, 13, 16, w(forward), True),
    ]
    return Genome(DUEL_IO_SPEC.io_nodes(), genes, DUEL_IO_SPEC)


ZERO_GENOME = Genome(DUEL_IO_SPEC.io_nodes(), [], DUEL_IO_SPEC)


class TestLayouts:
    def test_standard_layout_has_nine_interior_points(self):
        layout = standard_food_layout()
        assert len(layout) == 9
        for x, y in layout:
            assert 0 < x < BOARD_SIZE
            assert 0 < y < BOARD_SIZE

    def test_standard_layout_mirror_symmetric(self):
        layout = set(standard_food_layout())
        mirrored = {(BOARD_SIZE - x, y) for (x, y) in layout}
        assert layout == mirrored

    def test_evaluation_configs_counts(self):
        configs = evaluation_configs()
        assert len(configs) == 144
        for cfg in configs:
            assert len(cfg.food_layout) == 11

    def test_extra_slots_mirror_each_other(self):
        configs = evaluation_configs()
        west = {cfg.food_layout[9] for cfg in configs}
        east = {cfg.food_layout[10] for cfg in configs}
        assert len(west) == 12
        assert east == {(BOARD_SIZE - x, y) for (x, y) in west}

    def test_all_evaluation_layouts_distinct(self):
        layouts = {cfg.food_layout for cfg in evaluation_configs()}
        assert len(layouts) == 144


class TestInitDuel:
    def test_full_energies_and_unset_outcome(self):
        world = init_duel(DuelConfig())
        assert world.outcome is None
        assert world.step_count == 0
        for robot in world.robots:
            assert robot.energy == 2000.0
        assert all(not f.consumed for f in world.food)

    def test_robots_face_away_from_each_other(self):
        world = init_duel(DuelConfig())
        west, east = world.robots
        assert west.board_position == (60.0, 300.0)
        assert east.board_position == (540.0, 300.0)
        assert west.hx == -1.0 and west.hy == 0.0
        assert east.hx == 1.0 and east.hy == 0.0


class TestSense:
    def test_no_food_gives_zero_food_ring(self):
        cfg = replace(DuelConfig(), food_layout=())
        world = init_duel(cfg)
        frame = sense(world, 0)
        assert frame.food_ring == (0.0,) * 5

    def test_equal_energy_gives_zero_diff(self):
        world = init_duel(DuelConfig())
        assert sense(world, 0).energy_diff == 0.0
        assert sense(world, 1).energy_diff == 0.0

    def test_energy_diff_sign_and_clamp(self):
        world = init_duel(DuelConfig())
        world.robots[0].energy = 3000.0
        world.robots[1].energy = 500.0
        assert sense(world, 0).energy_diff == pytest.approx(1.0)
        assert sense(world, 1).energy_diff == pytest.approx(-1.0)
        world.robots[0].energy = 2100.0
        world.robots[1].energy = 2000.0
        assert sense(world, 0).energy_diff == pytest.approx(0.05)

    def test_opponent_dead_ahead_hits_center_sensor(self):
        cfg = replace(DuelConfig(), food_layout=())
        world = init_duel(cfg)
        me = world.robots[0]
        me.x, me.y, me.hx, me.hy = 0.0, 0.0, 1.0, 0.0
        world.robots[1].x = 150.0  # half the 300 sensor range, dead ahead
        world.robots[1].y = 0.0
        frame = sense(world, 0)
        assert frame.robot_ring[2] == pytest.approx(0.5)
        assert [frame.robot_ring[i] for i in (0, 1, 3, 4)] == [0.0] * 4

    def test_opponent_behind_is_invisible(self):
        cfg = replace(DuelConfig(), food_layout=())
        world = init_duel(cfg)
        me = world.robots[0]
        me.x, me.y, me.hx, me.hy = 0.0, 0.0, 1.0, 0.0
        world.robots[1].x = -50.0
        world.robots[1].y = 0.0
        assert sense(world, 0).robot_ring == (0.0,) * 5

    def test_ring_sector_sides(self):
        # Offsets at -72, -36, 0, +36, +72 degrees bearing land in
        # sectors 0..4 respectively (positive bearing is to the left).
        cfg = replace(DuelConfig(), food_layout=())
        world = init_duel(cfg)
        me = world.robots[0]
        me.x, me.y, me.hx, me.hy = 0.0, 0.0, 1.0, 0.0
        for sector, bearing_deg in ((0, -72), (1, -36), (2, 0), (3, 36), (4, 72)):
            b = math.radians(bearing_deg)
            world.robots[1].x = 100.0 * math.cos(b)
            world.robots[1].y = 100.0 * math.sin(b)
            frame = sense(world, 0)
            assert frame.robot_ring[sector] > 0.0, (sector, bearing_deg)
            assert sum(1 for v in frame.robot_ring if v > 0) == 1

    def test_nearest_in_sector_wins(self):
        cfg = replace(
            DuelConfig(), food_layout=((400.0, 300.0), (360.0, 300.0))
        )
        world = init_duel(cfg)
        me = world.robots[0]
        me.x, me.y, me.hx, me.hy = 0.0, 0.0, 1.0, 0.0
        frame = sense(world, 0)
        assert frame.food_ring[2] == pytest.approx(1.0 - 60.0 / 300.0)

    def test_food_beyond_range_invisible(self):
        cfg = replace(DuelConfig(), food_layout=((590.0, 300.0),))
        world = init_duel(cfg)
        me = world.robots[0]
        me.x, me.y, me.hx, me.hy = -290.0, 0.0, 1.0, 0.0
        assert sense(world, 0).food_ring == (0.0,) * 5  # 580 away, range 300

    def test_wall_sensor_rises_near_walls(self):
        world = init_duel(DuelConfig())
        me = world.robots[0]
        me.x, me.y = 0.0, 0.0  # board center: all walls 300 away
        assert sense(world, 0).wall == 0.0
        me.x = -260.0  # 40 from the west wall
        assert sense(world, 0).wall == pytest.approx(1.0 - 40.0 / 100.0)
        me.x, me.y = -300.0, 0.0
        assert sense(world, 0).wall == 1.0

    def test_consumed_food_invisible(self):
        cfg = replace(DuelConfig(), food_layout=((400.0, 300.0),))
        world = init_duel(cfg)
        me = world.robots[0]
        me.x, me.y, me.hx, me.hy = 0.0, 0.0, 1.0, 0.0
        assert sense(world, 0).food_ring[2] > 0
        world.food[0].consumed = True
        assert sense(world, 0).food_ring == (0.0,) * 5


class TestStep:
    def test_equal_turn_outputs_mean_no_rotation(self):
        world = init_duel(DuelConfig())
        before = (world.robots[0].hx, world.robots[0].hy)
        step(world, (0.5, 0.5, 0.3), (0.5, 0.5, 0.3))
        assert (world.robots[0].hx, world.robots[0].hy) == before

    def test_turn_angle_and_forward_coefficients(self):
        world = init_duel(DuelConfig())
        me = world.robots[0]
        me.x, me.y, me.hx, me.hy = 0.0, 0.0, 1.0, 0.0
        step(world, (1.0, 0.0, 1.0), (0.5, 0.5, 0.0))
        # Turn 0.24 rad counterclockwise (left output larger), advance 1.33
        # along the half-turned heading.
        assert math.atan2(me.hy, me.hx) == pytest.approx(0.24, abs=1e-12)
        assert me.x == pytest.approx(1.33 * math.cos(0.12), abs=1e-12)
        assert me.y == pytest.approx(1.33 * math.sin(0.12), abs=1e-12)

    def test_right_turn_is_clockwise(self):
        world = init_duel(DuelConfig())
        me = world.robots[0]
        me.hx, me.hy = 1.0, 0.0
        step(world, (0.0, 1.0, 0.0), (0.5, 0.5, 0.0))
        assert math.atan2(me.hy, me.hx) == pytest.approx(-0.24, abs=1e-12)

    def test_energy_cost_is_turn_plus_distance(self):
        world = init_duel(DuelConfig())
        step(world, (1.0, 0.0, 1.0), (0.5, 0.5, 0.5))
        assert world.robots[0].energy == pytest.approx(2000.0 - (0.24 + 1.33))
        assert world.robots[1].energy == pytest.approx(2000.0 - 0.665)

    def test_turning_in_place_costs_energy(self):
        world = init_duel(DuelConfig())
        step(world, (1.0, 0.0, 0.0), (0.5, 0.5, 0.0))
        assert world.robots[0].energy == pytest.approx(2000.0 - 0.24)

    def test_positions_clamped_to_board(self):
        world = init_duel(DuelConfig())
        me = world.robots[0]
        me.x, me.y, me.hx, me.hy = -299.9, 0.0, -1.0, 0.0
        step(world, (0.5, 0.5, 1.0), (0.5, 0.5, 0.0))
        assert me.x == -300.0

    def test_food_pickup_grants_energy_and_consumes(self):
        cfg = replace(DuelConfig(), food_layout=((310.0, 300.0),))
        world = init_duel(cfg)
        me = world.robots[0]
        me.x, me.y, me.hx, me.hy = 5.0, 0.0, 1.0, 0.0
        step(world, (0.5, 0.5, 0.5), (0.5, 0.5, 0.0))
        assert world.food[0].consumed
        assert world.robots[0].energy > 2000.0

    def test_shared_food_tie_feeds_both(self):
        cfg = replace(
            DuelConfig(),
            food_layout=((300.0, 300.0),),
            start_poses=((290.0, 300.0, 0.0), (310.0, 300.0, math.pi)),
            collision_radius=5.0,
        )
        world = init_duel(cfg)
        step(world, (0.5, 0.5, 0.9), (0.5, 0.5, 0.9))
        assert world.food[0].consumed
        assert world.robots[0].energy > 2000.0
        assert world.robots[1].energy > 2000.0

    def test_collision_higher_energy_wins(self):
        cfg = replace(
            DuelConfig(),
            food_layout=(),
            start_poses=((290.0, 300.0, 0.0), (309.0, 300.0, math.pi)),
        )
        world = init_duel(cfg)
        world.robots[0].energy = 1500.0
        world.robots[1].energy = 1400.0
        step(world, (0.5, 0.5, 0.1), (0.5, 0.5, 0.1))
        assert world.outcome is not None
        assert world.outcome.reason == "collision"
        assert world.outcome.winner == "robot_a"

    def test_collision_exact_tie_is_draw(self):
        cfg = replace(
            DuelConfig(),
            food_layout=(),
            start_poses=((290.0, 300.0, 0.0), (310.0, 300.0, math.pi)),
        )
        world = init_duel(cfg)
        step(world, (0.5, 0.5, 0.5), (0.5, 0.5, 0.5))
        assert world.outcome.winner == "draw"
        assert world.outcome.reason == "collision"

    def test_timeout_draw_at_step_limit(self):
        cfg = replace(DuelConfig(), food_layout=(), max_steps=3)
        world = init_duel(cfg)
        for _ in range(3):
            step(world, (0.5, 0.5, 0.0), (0.5, 0.5, 0.0))
        assert world.outcome == world.outcome
        assert world.outcome.winner == "draw"
        assert world.outcome.reason == "timeout"
        assert world.outcome.steps == 3

    def test_stepping_finished_world_raises(self):
        cfg = replace(DuelConfig(), food_layout=(), max_steps=1)
        world = init_duel(cfg)
        step(world, (0.5, 0.5, 0.0), (0.5, 0.5, 0.0))
        with pytest.raises(RuntimeError):
            step(world, (0.5, 0.5, 0.0), (0.5, 0.5, 0.0))


class TestRunDuel:
    def test_self_play_on_symmetric_board_draws(self):
        for seed in (3, 4, 5):
            g = grown_duel_genome(seed)
            outcome = run_duel(g, g, DuelConfig(), record=True)
            assert outcome.winner == "draw"
            # Trajectories are exact mirror images through the board
            # center: robot B retraces robot A rotated by 180 degrees.
            for row in outcome.replay:
                assert abs((BOARD_SIZE - row[1]) - row[5]) < 1e-9
                assert abs((BOARD_SIZE - row[2]) - row[6]) < 1e-9
                assert abs(row[4] - row[8]) < 1e-9

    def test_zero_weight_genomes_creep_to_timeout(self):
        outcome = run_duel(ZERO_GENOME, ZERO_GENOME, DuelConfig(), record=True)
        assert outcome.winner == "draw"
        assert outcome.reason == "timeout"
        assert outcome.steps == 750
        # Closed form: both outputs sit at 0.5, so no turning and a
        # constant 0.665 forward creep into the robot's own wall.
        for row in outcome.replay:
            t = row[0]
            expected_x = max(0.0, 60.0 - 0.665 * t)
            assert row[1] == pytest.approx(expected_x, abs=1e-9)
            assert row[2] == pytest.approx(300.0, abs=1e-12)

    def test_determinism_bitwise(self):
        a = grown_duel_genome(30)
        b = grown_duel_genome(31)
        cfg = evaluation_configs()[7]
        first = run_duel(a, b, cfg, record=True)
        second = run_duel(a, b, cfg, record=True)
        assert first == second

    def test_io_spec_checked(self):
        bad = make_genome([])
        good = grown_duel_genome(1)
        with pytest.raises(ValueError):
            run_duel(bad, good)

    def test_termination_within_limit(self):
        for seed in range(6):
            cfg = replace(DuelConfig(), max_steps=200)
            o = run_duel(grown_duel_genome(seed), grown_duel_genome(seed + 40), cfg)
            assert o.steps <= 200
            assert o.outcome if hasattr(o, "outcome") else o.winner in (
                "robot_a",
                "robot_b",
                "draw",
            )

    def test_collision_outcomes_obey_rules(self):
        # Close face-to-face starts force collisions; the winner must hold
        # strictly more energy and the robots must be within range.
        decisive = 0
        for seed in range(12):
            cfg = replace(
                DuelConfig(),
                food_layout=((300.0, 320.0),),
                start_poses=((280.0, 300.0, 0.0), (320.0, 300.0, math.pi)),
            )
            a = grown_duel_genome(seed)
            b = grown_duel_genome(seed + 60)
            o = run_duel(a, b, cfg, record=True)
            if o.reason != "collision":
                continue
            decisive += 1
            last = o.replay[-1]
            dist = math.hypot(last[5] - last[1], last[6] - last[2])
            assert dist <= cfg.collision_radius + 1e-9
            ea, eb = last[4], last[8]
            if o.winner == "robot_a":
                assert ea > eb
            elif o.winner == "robot_b":
                assert eb > ea
            else:
                assert ea == eb
        assert decisive > 0

    def test_energy_accounting_exact(self):
        # Replay the duel step by step and check the energy ledger.
        a = grown_duel_genome(8)
        b = grown_duel_genome(9)
        cfg = replace(DuelConfig(), max_steps=120)
        outcome = run_duel(a, b, cfg, record=True)
        prev_ea, prev_eb = cfg.initial_energy, cfg.initial_energy
        prev_mask = (1 << len(cfg.food_layout)) - 1
        prev_heading_a = math.pi
        prev_heading_b = 0.0
        prev_xa, prev_ya = 60.0, 300.0
        prev_xb, prev_yb = 540.0, 300.0
        for row in outcome.replay:
            _, xa, ya, ha, ea, xb, yb, hb, eb, mask = row
            # Food pickups this step, split by who is in range.
            eaten_bits = prev_mask & ~mask
            gained_a = gained_b = 0.0
            for i in range(len(cfg.food_layout)):
                if eaten_bits & (1 << i):
                    fx, fy = cfg.food_layout[i]
                    if math.hypot(fx - xa, fy - ya) <= cfg.pickup_radius + 1e-9:
                        gained_a += cfg.food_energy
                    if math.hypot(fx - xb, fy - yb) <= cfg.pickup_radius + 1e-9:
                        gained_b += cfg.food_energy
            turn_a = abs(_angle_diff(ha, prev_heading_a))
            dist_a = math.hypot(xa - prev_xa, ya - prev_ya)
            spent_a = prev_ea - ea + gained_a
            # Turn plus forward distance; clamped wall contact shortens the
            # realized displacement, so allow distance <= commanded motion.
            assert spent_a >= turn_a - 1e-6
            assert spent_a <= 0.24 + 1.33 + 1e-9
            assert dist_a <= spent_a - turn_a + 1e-6
            turn_b = abs(_angle_diff(hb, prev_heading_b))
            spent_b = prev_eb - eb + gained_b
            assert spent_b >= turn_b - 1e-6
            prev_ea, prev_eb, prev_mask = ea, eb, mask
            prev_heading_a, prev_heading_b = ha, hb
            prev_xa, prev_ya, prev_xb, prev_yb = xa, ya, xb, yb

    def test_energy_ledger_exact_without_food(self):
        # The per-step decrement is exactly |turn| + forward distance.
        cfg = replace(DuelConfig(), food_layout=(), max_steps=50)
        world = init_duel(cfg)
        outputs = [(0.8, 0.1, 0.6), (0.2, 0.9, 1.0), (0.5, 0.5, 0.0)]
        for l, r, f in outputs:
            before = world.robots[0].energy
            step(world, (l, r, f), (0.5, 0.5, 0.0))
            cost = math.fabs(0.24 * (l - r)) + 1.33 * f
            assert world.robots[0].energy == before - cost  # bit exact

    def test_energy_ledger_exact_with_food(self):
        cfg = replace(
            DuelConfig(),
            food_layout=((310.0, 300.0),),
            start_poses=((305.0, 300.0, 0.0), (540.0, 300.0, 0.0)),
        )
        world = init_duel(cfg)
        before = world.robots[0].energy
        l, r, f = 0.5, 0.5, 0.5
        step(world, (l, r, f), (0.5, 0.5, 0.0))
        cost = math.fabs(0.24 * (l - r)) + 1.33 * f
        assert world.robots[0].energy == before - cost + cfg.food_energy

    def test_replay_text_round_trip(self):
        from duelneat.duel import format_replay, parse_replay

        a = grown_duel_genome(17)
        b = grown_duel_genome(18)
        o = run_duel(a, b, DuelConfig(max_steps=90), record=True)
        assert parse_replay(format_replay(o)) == o.replay

    def test_monotone_food(self):
        a = grown_duel_genome(14)
        b = grown_duel_genome(15)
        o = run_duel(a, b, DuelConfig(max_steps=400), record=True)
        prev = (1 << 9) - 1
        for row in o.replay:
            mask = row[9]
            assert mask & ~prev == 0  # food never reappears
            prev = mask


def _angle_diff(a, b):
    d = a - b
    while d > math.pi:
        d -= 2 * math.pi
    while d < -math.pi:
        d += 2 * math.pi
    return d


class TestMirrorTransforms:
    def test_mirror_config_reflects_food_and_poses(self):
        cfg = evaluation_configs()[5]
        m = mirror_config(cfg)
        assert {(BOARD_SIZE - x, y) for (x, y) in cfg.food_layout} == set(
            m.food_layout
        )
        (x0, y0, h0), (x1, y1, h1) = m.start_poses
        assert (x0, y0) == (BOARD_SIZE - 60.0, 300.0)

    def test_mirror_genome_swaps_rings_and_turn_outputs(self):
        g = make_genome(
            [(1, 1, 14, 0.3), (2, 6, 15, 0.4), (3, 13, 16, 0.5)],
            io_spec=DUEL_IO_SPEC,
        )
        m = mirror_genome(g)
        pairs = {(c.in_node, c.out_node): c.weight for c in m.connections}
        assert pairs[(5, 15)] == 0.3  # food sensor 1 -> 5, left -> right
        assert pairs[(10, 14)] == 0.4  # robot sensor 6 -> 10
        assert pairs[(13, 16)] == 0.5  # bias and forward untouched

    def test_mirror_equivariance_of_full_duels(self):
        # Mirrored genomes in the mirrored world replay the original duel
        # reflected across the vertical midline, roles swapped.
        for seed in (0, 1, 2):
            a = grown_duel_genome(seed)
            b = grown_duel_genome(seed + 80)
            cfg = evaluation_configs()[31]
            direct = run_duel(a, b, cfg, record=True)
            reflected = run_duel(
                mirror_genome(a), mirror_genome(b), mirror_config(cfg), record=True
            )
            assert direct.steps == reflected.steps
            swap = {"robot_a": "robot_a", "robot_b": "robot_b", "draw": "draw"}
            assert swap[direct.winner] == reflected.winner
            for ours, theirs in zip(direct.replay, reflected.replay):
                assert abs((BOARD_SIZE - ours[1]) - theirs[1]) < 1e-9
                assert abs(ours[2] - theirs[2]) < 1e-9
                assert abs((BOARD_SIZE - ours[5]) - theirs[5]) < 1e-9
                assert abs(ours[6] - theirs[6]) < 1e-9
