"""Command-line interface.

Exit codes: 0 success, 2 invalid input or arguments, 3 solver stopped at
the iteration cap (the embedding file is still written, with
``converged: false`` in its provenance).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import families, fileformats
from .exceptions import CmdsError, ShapeMismatch
from .model import settings_from_dict
from .solver import build_weights, cmds


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contmds",
        description="Embed datapoints as smooth curves over a grid of distance functions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    embed = sub.add_parser("embed", help="solve an embedding for a distance-tensor file")
    embed.add_argument("--input", required=True, help="distance-tensor JSON file")
    embed.add_argument("--output", required=True, help="embedding JSON file to write")
    embed.add_argument("--dim", type=int, default=2)
    embed.add_argument("--lambda", dest="lam", type=float, default=0.0,
                       help="roughness penalty weight")
    embed.add_argument("--variant", default="raw",
                       choices=["raw", "sammon", "elastic", "unfolding", "lmds"])
    embed.add_argument("--init", default="aggregated",
                       choices=["per-slice", "aggregated", "random"])
    embed.add_argument("--tol", type=float, default=1e-6)
    embed.add_argument("--max-outer", type=int, default=100)
    embed.add_argument("--max-inner", type=int, default=50)
    embed.add_argument("--seed", type=int, default=0)
    embed.add_argument("--lmds-k", type=int, default=5)
    embed.add_argument("--lmds-w", type=float, default=None)
    embed.add_argument("--lmds-dinf", type=float, default=None)
    embed.add_argument("--groups", default=None,
                       help="group labels file for the unfolding variant")

    family = sub.add_parser("family", help="generate a distance-tensor file")
    fam_sub = family.add_subparsers(dest="family_command", required=True)

    mixture = fam_sub.add_parser("mixture", help="blend two distance matrices")
    mixture.add_argument("--d1", required=True, help="matrix at mixture weight 1")
    mixture.add_argument("--d2", required=True, help="matrix at mixture weight 0")
    mixture.add_argument("--steps", type=int, default=11)
    mixture.add_argument("--output", required=True)

    toy = fam_sub.add_parser("toy", help="collapsing Gaussian clusters")
    toy.add_argument("--clusters", type=int, default=5)
    toy.add_argument("--per-cluster", type=int, default=10)
    toy.add_argument("--ambient-dim", type=int, default=5)
    toy.add_argument("--steps", type=int, default=11)
    toy.add_argument("--noise", type=float, default=0.15)
    toy.add_argument("--seed", type=int, default=0)
    toy.add_argument("--output", required=True)

    hclust = fam_sub.add_parser("hclust", help="hierarchy-level distances of a point cloud")
    hclust.add_argument("--points", required=True, help="point array file")
    hclust.add_argument("--eps", type=float, default=None,
                        help="within-cluster distance (default: 1e-3 of the smallest gap)")
    hclust.add_argument("--output", required=True)

    th = fam_sub.add_parser("threshold-hamming",
                            help="graph Hamming distances across thresholding quantiles")
    th.add_argument("--graphs", required=True, help="JSON file with a 'graphs' list")
    th.add_argument("--steps", type=int, default=11)
    th.add_argument("--output", required=True)

    cp = fam_sub.add_parser("consensus-paths",
                            help="shortest-path distances on thresholded consensus graphs")
    cp.add_argument("--graphs", required=True, help="JSON file with a 'graphs' list")
    cp.add_argument("--steps", type=int, default=11)
    cp.add_argument("--output", required=True)

    md = fam_sub.add_parser("mixed-dim", help="2-D / 12-D Gaussian mixture distances")
    md.add_argument("--n", type=int, default=30)
    md.add_argument("--steps", type=int, default=11)
    md.add_argument("--seed", type=int, default=0)
    md.add_argument("--output", required=True)

    metrics = sub.add_parser("metrics", help="diagnostics for an embedding against its tensor")
    metrics.add_argument("--embedding", required=True)
    metrics.add_argument("--input", required=True)
    metrics.add_argument("--report", default=None, help="also write the report as JSON")

    serve = sub.add_parser("serve", help="local HTTP service the explorer UI drives")
    serve.add_argument("--port", type=int, default=8631)
    serve.add_argument("--input", required=True)

    return parser


def _settings_from_args(args) -> dict:
    doc = {
        "dim": args.dim,
        "lambda": args.lam,
        "variant": args.variant,
        "init": args.init,
        "tol": args.tol,
        "max_outer": args.max_outer,
        "max_inner": args.max_inner,
        "seed": args.seed,
    }
    if args.variant == "lmds":
        doc["lmds_k"] = args.lmds_k
        doc["lmds_w"] = args.lmds_w
        doc["lmds_dinf"] = args.lmds_dinf
    if args.variant == "unfolding":
        if args.groups is None:
            raise CmdsError("the unfolding variant requires --groups")
        doc["groups"] = fileformats.load_groups(args.groups)
    return doc


def _cmd_embed(args) -> int:
    tensor = fileformats.load_distance_tensor(args.input)
    settings = settings_from_dict(_settings_from_args(args))
    result = cmds(tensor, settings)
    doc = fileformats.embedding_document(result, tensor)
    fileformats.save_embedding_document(doc, args.output)
    if not result.converged:
        print(
            f"did not converge within {settings.max_outer} sweeps "
            f"(final cost {result.cost_trace[-1]:.6g}); embedding written anyway",
            file=sys.stderr,
        )
        return 3
    return 0


def _cmd_family(args) -> int:
    steps = getattr(args, "steps", None)
    if steps is not None and steps < 1:
        raise CmdsError(f"--steps must be >= 1, got {steps}")
    if args.family_command == "mixture":
        d1 = fileformats.load_matrix(args.d1)
        d2 = fileformats.load_matrix(args.d2)
        alphas = np.linspace(0.0, 1.0, steps)
        tensor = families.weighted_mixture(d1, d2, alphas)
    elif args.family_command == "toy":
        cfg = families.ClusterToyConfig(
            n_clusters=args.clusters,
            points_per_cluster=args.per_cluster,
            ambient_dim=args.ambient_dim,
            n_slices=steps,
            noise_sd=args.noise,
            seed=args.seed,
        )
        tensor = families.collapsing_clusters_toy(cfg).tensor
    elif args.family_command == "hclust":
        points = fileformats.load_points(args.points)
        tensor = families.hclust_distance_family(points, eps=args.eps)
    elif args.family_command == "threshold-hamming":
        graphs = fileformats.load_graphs(args.graphs)
        quantiles = np.linspace(0.0, 0.9, steps)
        tensor = families.threshold_hamming_family(graphs, quantiles)
    elif args.family_command == "consensus-paths":
        graphs = fileformats.load_graphs(args.graphs)
        thresholds = np.linspace(0.0, 0.9, steps)
        tensor = families.consensus_shortest_path_family(graphs, thresholds)
    else:  # mixed-dim
        tensor = families.mixed_dimensionality_family(args.seed, n=args.n, n_slices=steps)
    fileformats.save_distance_tensor(tensor, args.output)
    return 0


def _cmd_metrics(args) -> int:
    emb = fileformats.load_embedding_document(args.embedding)
    tensor = fileformats.load_distance_tensor(args.input)
    curves = fileformats.curves_from_document(emb)
    if curves.n_items != tensor.n_items or curves.n_slices != tensor.n_slices:
        raise ShapeMismatch(
            f"embedding is ({curves.n_slices} slices, {curves.n_items} items), "
            f"tensor is ({tensor.n_slices}, {tensor.n_items})"
        )
    settings = settings_from_dict(emb["provenance"]["settings"])
    weights = build_weights(tensor, settings.variant)
    doc = fileformats.metrics_document(curves, tensor, weights, settings.lam)

    print(f"slices: {curves.n_slices}  items: {curves.n_items}  dim: {curves.dim}")
    print(f"total cost: {doc['total_cost']!r}")
    print("slice  alpha        stress")
    values = curves.grid.slice_values()
    for k, stress in enumerate(doc["stress_per_slice"]):
        axis = ", ".join(f"{v:g}" for v in values[k])
        print(f"{k:5d}  {axis:<11s}  {stress!r}")
    print("item            roughness      instability")
    for label, rough, inst in zip(doc["labels"], doc["roughness_per_curve"], doc["instability"]):
        print(f"{label:<15s} {rough:<14.6g} {inst:.6g}")
    if args.report:
        fileformats._dump(doc, args.report)
    return 0


def _cmd_serve(args) -> int:
    from .server import run_server

    tensor = fileformats.load_distance_tensor(args.input)
    server = run_server(tensor, port=args.port)
    print(f"serving on http://127.0.0.1:{server.port} (Ctrl-C to stop)", file=sys.stderr)
    try:
        server.wait()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "embed":
            return _cmd_embed(args)
        if args.command == "family":
            return _cmd_family(args)
        if args.command == "metrics":
            return _cmd_metrics(args)
        return _cmd_serve(args)
    except (CmdsError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
