"""Regenerate the test fixtures from the Python backend.

Run from the repository root with the package installed:

    python3 frontend/scripts/make_fixtures.py

Writes the 11-slice toy tensor info plus embedding/metrics payload pairs
for a low and a high smoothing weight, exactly as the serve API returns
them.
"""

import json
from pathlib import Path

from contmds.families import ClusterToyConfig, collapsing_clusters_toy
from contmds.fileformats import embedding_document, metrics_document
from contmds.model import SolverSettings
from contmds.server import SolveService
from contmds.solver import build_weights, cmds

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def dump(name: str, doc) -> None:
    (OUT / name).write_text(json.dumps(doc, indent=1) + "\n")


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    data = collapsing_clusters_toy(ClusterToyConfig(n_slices=11, points_per_cluster=4, seed=0))
    tensor = data.tensor
    dump("tensor.json", SolveService(tensor).tensor_info())
    for tag, lam in (("low", 0.5), ("high", 50.0)):
        settings = SolverSettings(lam=lam, dim=2, tol=1e-7, max_outer=80, max_inner=25,
                                  init="aggregated", seed=7)
        result = cmds(tensor, settings)
        weights = build_weights(tensor, settings.variant)
        dump(f"embedding_{tag}.json", embedding_document(result, tensor))
        dump(f"metrics_{tag}.json", metrics_document(result.curves, tensor, weights, lam))


if __name__ == "__main__":
    main()
