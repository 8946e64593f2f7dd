"""Compiled kernel vs pure-Python backend equivalence."""

import pytest

from conftest import grown_duel_genome
from duelneat.backend import HAVE_COMPILED
from duelneat.benchmark import run_benchmark
from duelneat.duel import DuelConfig, evaluation_configs, run_duel

needs_kernel = pytest.mark.skipif(
    not HAVE_COMPILED, reason="compiled kernel not built"
)


@needs_kernel
class TestBackendEquivalence:
    def test_outcomes_and_replays_bit_identical(self):
        cfgs = [DuelConfig(max_steps=300)] + evaluation_configs(
            DuelConfig(max_steps=300)
        )[:4]
        for seed in range(10):
            a = grown_duel_genome(seed)
            b = grown_duel_genome(seed + 200)
            cfg = cfgs[seed % len(cfgs)]
            py = run_duel(a, b, cfg, record=True, backend="python")
            cy = run_duel(a, b, cfg, record=True, backend="compiled")
            assert py.winner == cy.winner
            assert py.reason == cy.reason
            assert py.steps == cy.steps
            assert py.replay == cy.replay  # bitwise equality of every field

    def test_collision_paths_agree(self):
        import math
        from dataclasses import replace

        cfg = replace(
            DuelConfig(),
            food_layout=((300.0, 320.0),),
            start_poses=((280.0, 300.0, 0.0), (320.0, 300.0, math.pi)),
        )
        for seed in range(8):
            a = grown_duel_genome(seed)
            b = grown_duel_genome(seed + 300)
            py = run_duel(a, b, cfg, record=True, backend="python")
            cy = run_duel(a, b, cfg, record=True, backend="compiled")
            assert py == cy

    def test_unknown_backend_rejected(self):
        a = grown_duel_genome(0)
        with pytest.raises(ValueError):
            run_duel(a, a, DuelConfig(max_steps=5), backend="cuda")


@needs_kernel
def test_benchmark_agrees_and_speeds_up():
    results = run_benchmark(duels=4, max_steps=250)
    py = results["python"]
    cy = results["compiled"]
    for a, b in zip(py["outcomes"], cy["outcomes"]):
        assert a == b
    assert cy["steps_per_second"] > py["steps_per_second"]


def test_python_backend_always_available():
    a = grown_duel_genome(0)
    outcome = run_duel(a, a, DuelConfig(max_steps=20), backend="python")
    assert outcome.steps <= 20
