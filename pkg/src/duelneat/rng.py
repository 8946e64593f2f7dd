"""Named deterministic random streams derived from one master seed.

Every source of randomness in a run is a `random.Random` seeded with
"<master>/<name>/<name>/...". String seeding in CPython hashes the bytes
with SHA-512, so streams are independent, reproducible across processes
and platforms, and never depend on ambient global state.
"""

import random


def stream(master_seed: int, *names) -> random.Random:
    """Return the named random stream for this master seed."""
    label = "/".join(str(n) for n in names)
    return random.Random(f"{master_seed}/{label}")
