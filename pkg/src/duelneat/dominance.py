"""Progress measurement by superiority comparisons and dominance ranking.

Two networks are compared over 288 games (the 144 comparison layouts,
each played from both sides); the one winning strictly more games is
superior. A dominance hierarchy is the recursive chain of generation
champions each superior to every earlier entry, which rules out
circularities and makes "level reached" a meaningful progress measure.
"""

from dataclasses import dataclass, field

from .duel import DuelConfig, evaluation_configs, run_duel
from .genome import Genome


@dataclass(frozen=True)
class ComparisonResult:
    wins_a: int
    wins_b: int
    draws: int

    @property
    def games(self) -> int:
        return self.wins_a + self.wins_b + self.draws

    @property
    def superior(self) -> str | None:
        if self.wins_a > self.wins_b:
            return "a"
        if self.wins_b > self.wins_a:
            return "b"
        return None

    def reversed(self) -> "ComparisonResult":
        return ComparisonResult(self.wins_b, self.wins_a, self.draws)


def play_pair(a: Genome, b: Genome, cfg: DuelConfig) -> tuple[int, int, int]:
    """One layout from both sides; returns (wins_a, wins_b, draws)."""
    wins_a = wins_b = draws = 0
    for first, second in ((a, b), (b, a)):
        outcome = run_duel(first, second, cfg)
        if outcome.winner == "draw":
            draws += 1
        elif (outcome.winner == "robot_a") == (first is a):
            wins_a += 1
        else:
            wins_b += 1
    return wins_a, wins_b, draws


def compare(
    a: Genome,
    b: Genome,
    configs: list[DuelConfig] | None = None,
    pair_fn=None,
) -> ComparisonResult:
    """Full superiority comparison across every evaluation layout.

    Draws (timeouts included) count for neither side. `pair_fn` may
    replace the simulated pair of games, e.g. for parallel evaluation or
    the random-fitness control.
    """
    if configs is None:
        configs = evaluation_configs()
    if pair_fn is None:
        pair_fn = play_pair
    wins_a = wins_b = draws = 0
    for cfg in configs:
        wa, wb, d = pair_fn(a, b, cfg)
        wins_a += wa
        wins_b += wb
        draws += d
    return ComparisonResult(wins_a, wins_b, draws)


@dataclass
class DominanceEntry:
    level: int
    generation: int
    genome: Genome
    # Comparison against each earlier entry, keyed by that entry's level,
    # from this entry's perspective ("a" side).
    records: dict[int, ComparisonResult] = field(default_factory=dict)


class DominanceHierarchy:
    """Ordered dominant strategies; every entry beats all earlier ones."""

    def __init__(self):
        self.entries: list[DominanceEntry] = []

    def __len__(self) -> int:
        return len(self.entries)

    def levels(self) -> list[int]:
        return [e.level for e in self.entries]

    def validate(self) -> None:
        for i, entry in enumerate(self.entries):
            if entry.level != i + 1:
                raise ValueError("levels must be contiguous from 1")
            for earlier in self.entries[:i]:
                record = entry.records.get(earlier.level)
                if record is None:
                    raise ValueError(
                        f"level {entry.level} lacks a record against {earlier.level}"
                    )
                if record.superior != "a":
                    raise ValueError(
                        f"level {entry.level} is not superior to {earlier.level}"
                    )


def update_dominance(
    hierarchy: DominanceHierarchy,
    candidate: Genome,
    generation: int,
    compare_fn=None,
) -> bool:
    """Run the candidate's tournament; append it if it beats every level.

    The first candidate ever seen becomes level 1 unconditionally. Later
    candidates play existing levels from the highest down, stopping at the
    first comparison they fail to win (acceptance is order independent;
    highest first just fails fast). Returns True when the candidate was
    appended.
    """
    if compare_fn is None:
        compare_fn = compare
    if not hierarchy.entries:
        hierarchy.entries.append(DominanceEntry(1, generation, candidate))
        return True
    records: dict[int, ComparisonResult] = {}
    for entry in reversed(hierarchy.entries):
        result = compare_fn(candidate, entry.genome)
        if result.superior != "a":
            return False
        records[entry.level] = result
    hierarchy.entries.append(
        DominanceEntry(len(hierarchy.entries) + 1, generation, candidate, records)
    )
    return True


def performance_score(
    champion: Genome, hierarchy: DominanceHierarchy, compare_fn=None
) -> float:
    """Highest consecutively defeated level over total levels.

    Plays level 1 upward and stops at the first comparison the champion
    does not win; a champion beating 13 levels of 15 scores 13/15.
    """
    if not hierarchy.entries:
        raise ValueError("cannot score against an empty hierarchy")
    if compare_fn is None:
        compare_fn = compare
    defeated = 0
    for entry in hierarchy.entries:
        result = compare_fn(champion, entry.genome)
        if result.superior != "a":
            break
        defeated += 1
    return defeated / len(hierarchy.entries)


def dominance_gap_curve(
    hierarchy: DominanceHierarchy,
) -> list[tuple[int, float]]:
    """Mean win margin of the higher entry at each dominance-level gap."""
    margins: dict[int, list[int]] = {}
    for entry in hierarchy.entries:
        for lower_level, record in entry.records.items():
            gap = entry.level - lower_level
            margins.setdefault(gap, []).append(record.wins_a - record.wins_b)
    return [
        (gap, sum(values) / len(values))
        for gap, values in sorted(margins.items())
    ]


def complexity_series(archive) -> list[tuple[int, int, int, int, int]]:
    """Per dominance transition: generation, dominant genome complexity,
    and the population connection-count envelope at that generation.

    Rows: (generation, dominant nodes, dominant connections,
    population min connections, population max connections).
    """
    rows = []
    previous_level = 0
    for record in archive.generations:
        if record.dominance_level > previous_level:
            rows.append(
                (
                    record.generation,
                    record.champion_nodes,
                    record.champion_connections,
                    record.pop_min_connections,
                    record.pop_max_connections,
                )
            )
            previous_level = record.dominance_level
    return rows
