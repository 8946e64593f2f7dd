"""Duel backend selection: compiled kernel when available, Python otherwise.

The environment variable DUELNEAT_BACKEND ("python" or "compiled") forces
a choice for the whole process; run_duel's `backend` argument overrides
per call. Both backends are bit-identical by construction.
"""

import os
from array import array
from dataclasses import replace

from .network import Network

try:
    from . import _speed

    HAVE_COMPILED = True
except ImportError:  # pure-Python install
    _speed = None
    HAVE_COMPILED = False


def default_backend() -> str:
    forced = os.environ.get("DUELNEAT_BACKEND")
    if forced in ("python", "compiled"):
        return forced
    return "compiled" if HAVE_COMPILED else "python"


def _flatten(net: Network):
    """CSR edge arrays for the kernel; requires canonical slot layout."""
    n_sensors = len(net.sensor_slots)
    n_inputs = n_sensors + len(net.bias_slots)
    if net.sensor_slots != list(range(n_sensors)):
        raise ValueError("non-canonical sensor slots")
    if net.bias_slots != list(range(n_sensors, n_inputs)):
        raise ValueError("non-canonical bias slots")
    if net.output_slots != list(range(n_inputs, n_inputs + len(net.output_slots))):
        raise ValueError("non-canonical output slots")
    starts = array("i", [0])
    srcs = array("i")
    weights = array("d")
    for edges in net.in_edges:
        for src, w in edges:
            srcs.append(src)
            weights.append(w)
        starts.append(len(srcs))
    if not srcs:  # zero-size buffers cannot back a typed memoryview
        srcs.append(0)
        weights.append(0.0)
    return starts, srcs, weights, net.size, n_sensors, n_inputs


def dispatch_duel(genome_a, genome_b, cfg, record, slope, backend):
    from . import duel

    choice = backend or default_backend()
    if choice == "compiled" and not HAVE_COMPILED:
        raise RuntimeError("compiled backend requested but not built")
    if choice not in ("python", "compiled"):
        raise ValueError(f"unknown backend {choice!r}")
    if choice == "python":
        return duel._run_duel_python(genome_a, genome_b, cfg, record, slope)

    net_a = Network(genome_a, slope)
    net_b = Network(genome_b, slope)
    try:
        fa = _flatten(net_a)
        fb = _flatten(net_b)
    except ValueError:
        # Unusual node layout (hand-written genome file): fall back.
        return duel._run_duel_python(genome_a, genome_b, cfg, record, slope)

    world = duel.init_duel(cfg)
    a, b = world.robots
    food_xy = array("d")
    for item in world.food:
        food_xy.append(item.x)
        food_xy.append(item.y)
    if not food_xy:
        food_xy.append(0.0)
    n_food = len(world.food)
    if record:
        replay_vals = array("d", bytes(8 * 8 * cfg.max_steps))
        replay_mask = array("Q", bytes(8 * cfg.max_steps))
    else:
        replay_vals = array("d", [0.0])
        replay_mask = array("Q", [0])

    winner, reason, steps = _speed.run(
        fa[0], fa[1], fa[2], fa[3],
        fb[0], fb[1], fb[2], fb[3],
        fa[4], fa[5],
        food_xy, n_food,
        a.x, a.y, a.hx, a.hy,
        b.x, b.y, b.hx, b.hy,
        cfg.initial_energy, cfg.food_energy,
        cfg.pickup_radius, cfg.collision_radius,
        cfg.sensor_range, cfg.wall_sensor_range,
        slope, cfg.max_steps, record,
        replay_vals, replay_mask,
    )
    outcome = duel.DuelOutcome(
        winner=("robot_a", "robot_b", "draw")[winner],
        reason=("collision", "timeout")[reason],
        steps=steps,
    )
    if record:
        rows = tuple(
            (i + 1,) + tuple(replay_vals[i * 8 : i * 8 + 8]) + (int(replay_mask[i]),)
            for i in range(steps)
        )
        outcome = replace(outcome, replay=rows)
    return outcome
