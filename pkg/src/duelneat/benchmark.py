"""Backend benchmark: compiled kernel vs pure-Python duel loop.

Run with `python -m duelneat.benchmark [--duels N]`. Plays the same set
of duels on both backends, reports throughput and verifies that the
outcomes (including replays) are identical.
"""

import argparse
import random
import time

from .backend import HAVE_COMPILED
from .duel import DUEL_IO_SPEC, DuelConfig, run_duel
from .genome import (
    InnovationRegistry,
    minimal_genome,
    mutate_add_connection,
    mutate_add_node,
    mutate_weights,
)


def grown_genome(seed: int, growth_steps: int = 40):
    rng = random.Random(seed)
    genome = minimal_genome(DUEL_IO_SPEC, rng)
    registry = InnovationRegistry.from_genome(genome)
    for _ in range(growth_steps):
        roll = rng.random()
        if roll < 0.2:
            genome = mutate_add_node(genome, registry, rng)
        elif roll < 0.6:
            genome = mutate_add_connection(genome, registry, rng)
        genome = mutate_weights(genome, rng)
        registry.end_generation()
    return genome


def run_benchmark(duels: int = 20, max_steps: int = 750) -> dict:
    cfg = DuelConfig(max_steps=max_steps)
    pairs = [(grown_genome(2 * i), grown_genome(2 * i + 1)) for i in range(duels)]
    results = {}
    for backend in ("python", "compiled") if HAVE_COMPILED else ("python",):
        outcomes = []
        steps = 0
        start = time.perf_counter()
        for a, b in pairs:
            outcome = run_duel(a, b, cfg, record=True, backend=backend)
            outcomes.append(outcome)
            steps += outcome.steps
        elapsed = time.perf_counter() - start
        results[backend] = {
            "seconds": elapsed,
            "steps": steps,
            "steps_per_second": steps / elapsed,
            "outcomes": outcomes,
        }
    return results


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--duels", type=int, default=20)
    parser.add_argument("--max-steps", type=int, default=750)
    args = parser.parse_args(argv)

    results = run_benchmark(args.duels, args.max_steps)
    for backend, data in results.items():
        print(
            f"{backend:>8}: {data['steps']} steps in {data['seconds']:.3f}s "
            f"({data['steps_per_second']:,.0f} steps/s)"
        )
    if not HAVE_COMPILED:
        print("compiled backend not built; install with Cython to compare")
        return 0
    py = results["python"]
    cy = results["compiled"]
    identical = all(
        a.winner == b.winner and a.reason == b.reason and a.replay == b.replay
        for a, b in zip(py["outcomes"], cy["outcomes"])
    )
    print(f" speedup: {py['seconds'] / cy['seconds']:.1f}x")
    print(f"identical outcomes and replays: {identical}")
    return 0 if identical else 1


if __name__ == "__main__":
    raise SystemExit(main())
