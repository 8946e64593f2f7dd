"""CSV and SVG report emitters for run archives."""

import os

from .archive import STATS_COLUMNS, STATS_MAGIC
from .coevolution import RunArchive


def write_stats_csv(archive: RunArchive, path) -> None:
    lines = [STATS_MAGIC, ",".join(STATS_COLUMNS)]
    for r in archive.generations:
        lines.append(
            ",".join(
                (
                    str(r.generation),
                    str(r.dominance_level),
                    str(r.champion_nodes),
                    str(r.champion_connections),
                    str(r.pop_min_connections),
                    str(r.pop_max_connections),
                    f"{r.delta_t_a:.17g}",
                    str(len(r.species_a)),
                )
            )
        )
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_report(archive: RunArchive, out_dir) -> list[str]:
    """Emit stats CSV plus complexity and dominance SVG charts.

    Returns the list of files written. Degenerate archives (no
    generations) still produce a valid CSV with its header.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []
    csv_path = os.path.join(out_dir, "stats.csv")
    write_stats_csv(archive, csv_path)
    written.append(csv_path)
    if not archive.generations:
        return written

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    gens = [r.generation for r in archive.generations]
    champ_conns = [r.champion_connections for r in archive.generations]
    champ_nodes = [r.champion_nodes for r in archive.generations]
    pop_min = [r.pop_min_connections for r in archive.generations]
    pop_max = [r.pop_max_connections for r in archive.generations]

    fig, ax = plt.subplots(figsize=(8, 5))
    ax.plot(gens, champ_conns, label="champion connections", color="tab:blue")
    ax.plot(gens, champ_nodes, label="champion nodes", color="tab:orange")
    ax.fill_between(
        gens, pop_min, pop_max, alpha=0.2, color="tab:blue",
        label="population connection range",
    )
    ax.set_xlabel("generation")
    ax.set_ylabel("count")
    ax.set_title("Complexity over generations")
    ax.legend()
    complexity_path = os.path.join(out_dir, "complexity.svg")
    fig.savefig(complexity_path, format="svg")
    plt.close(fig)
    written.append(complexity_path)

    fig, ax = plt.subplots(figsize=(8, 3.5))
    for entry in archive.hierarchy.entries:
        ax.vlines(entry.generation, 0, entry.level, color="tab:green")
    ax.set_xlim(-0.5, max(gens) + 0.5)
    ax.set_ylim(0, max((len(archive.hierarchy), 1)) + 0.5)
    ax.set_xlabel("generation")
    ax.set_ylabel("dominance level")
    ax.set_title("Dominance transitions")
    dominance_path = os.path.join(out_dir, "dominance.svg")
    fig.savefig(dominance_path, format="svg")
    plt.close(fig)
    written.append(dominance_path)
    return written
