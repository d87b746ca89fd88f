"""
Command-line interface for wave-cluster.

Subcommands cluster a graph, sweep convergence on a graph family, print
closed-form predictions, dump one node's spectrum, or replay a recorded
manifest. Each writes JSON/CSV outputs plus a manifest into --out-dir.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from . import __version__
from .clustering import WaveClusterer
from .config import Config
from .convergence import (
    compare_methods,
    convergence_sweep,
    fit_power_law,
    predict_times,
    ring_lambda2,
)
from .edge_list import load_edge_list
from .exceptions import ValidationError, WaveClusterError
from .generators import GENERATOR_HELP, from_spec
from .graph import Graph
from .outputs import (
    RunManifest,
    canonical_json,
    load_manifest,
    write_csv,
    write_json,
    write_manifest,
)
from .spectral import find_peaks, local_spectrum
from .wave import WaveConfig, init_run, run_to, trajectory_frame

logger = logging.getLogger(__name__)

# Parsed arguments that do not change results and stay out of manifests.
UNRECORDED_ARGS = {"out_dir", "verbose", "handler", "command"}


def load_graph(args: argparse.Namespace, config: Config) -> Tuple[Graph, str]:
    """Graph from --file or --generate, plus a source description."""
    if args.file:
        return load_edge_list(args.file), f"file:{args.file}"
    g = from_spec(args.generate, seed=config.seed)
    if not g.is_connected():
        raise ValidationError(f"generated graph {args.generate!r} is disconnected")
    return g, f"generate:{args.generate}"


def make_config(args: argparse.Namespace) -> Config:
    """Environment defaults overridden by command-line flags."""
    return Config.from_env(
        out_dir=getattr(args, "out_dir", None),
        c2=getattr(args, "c2", None),
        eta=getattr(args, "eta", None),
        seed=getattr(args, "seed", None),
        dense_limit=getattr(args, "dense_limit", None),
    )


def _manifest(
    args: argparse.Namespace,
    config: Config,
    graph_source: Optional[str],
    outputs: Dict[str, str],
) -> RunManifest:
    recorded = {k: v for k, v in vars(args).items() if k not in UNRECORDED_ARGS}
    settings = config.to_dict()
    settings.pop("out_dir")
    return RunManifest(
        command=args.command,
        graph_source=graph_source,
        wave_config=settings,
        k=getattr(args, "k", None),
        outputs=outputs,
        tool_version=__version__,
        seed=config.seed,
        arguments=recorded,
    )


def spectrum_frame(history: np.ndarray, node: int) -> pd.DataFrame:
    """Rows node, bin, omega, re, im for bins 0..T/2 of one node's history."""
    spec = local_spectrum(history, owner=node)
    coeffs = np.concatenate([[complex(spec.dc, 0.0)], spec.coeffs])
    bins = np.arange(coeffs.size)
    return pd.DataFrame(
        {
            "node": node,
            "bin": bins,
            "omega": 2.0 * np.pi * bins / spec.n_samples,
            "re": coeffs.real,
            "im": coeffs.imag,
        }
    )


def _check_node(g: Graph, node: int) -> None:
    if not 0 <= node < g.n:
        raise ValidationError(f"--node {node} out of range [0, {g.n})")


def cmd_cluster(args: argparse.Namespace, config: Config) -> int:
    """Cluster a graph and write partition.json, spectrum.csv and the manifest."""
    g, source = load_graph(args, config)
    _check_node(g, args.node)
    outputs = {"partition": "partition.json", "spectrum": "spectrum.csv"}
    if args.trajectory:
        outputs["trajectory"] = "trajectory.csv"
    manifest = _manifest(args, config, source, outputs)

    clusterer = WaveClusterer(config)
    result = clusterer.cluster(g, k=args.k, t_max=args.tmax)
    payload = result.to_dict()
    payload["graph"] = source
    if args.bisect:
        payload["bisection"] = clusterer.bisect(g, depth=args.bisect).to_dict()

    out_dir = config.ensure_out_dir()
    digest = manifest.sha256
    write_json(out_dir / outputs["partition"], payload, digest)
    spectrum = spectrum_frame(result.run.history[args.node], args.node)
    write_csv(out_dir / outputs["spectrum"], spectrum, digest)
    if args.trajectory:
        write_csv(out_dir / outputs["trajectory"], trajectory_frame(result.run), digest)
    write_manifest(out_dir, manifest)

    print(f"{g.n} nodes -> {result.partition.k} clusters, sizes {result.partition.sizes()}")
    if result.oracle is not None:
        print(f"oracle agreement: {result.oracle['agreement']:.4f}")
        if result.oracle["degenerate_eigengap"]:
            print("warning: degenerate eigengap, the spectral cut is not unique")
    return 0


def _parse_sizes(text: str) -> List[int]:
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError as e:
        raise ValidationError(f"sizes must be comma-separated integers, got {text!r}") from e
    if not sizes:
        raise ValidationError("no sizes given")
    return sizes


def cmd_convergence(args: argparse.Namespace, config: Config) -> int:
    """Measure wave and heat rounds over a family of graph sizes."""
    sizes = _parse_sizes(args.sizes)
    outputs = {"series": "convergence.csv", "fit": "convergence_fit.json"}
    manifest = _manifest(args, config, f"family:{args.family}", outputs)

    frame = convergence_sweep(args.family, sizes, config)
    fit: Dict[str, Any] = {"family": args.family, "sizes": sizes}
    if len(sizes) >= 2:
        for column in ("wave_rounds", "heat_rounds"):
            coefficient, exponent = fit_power_law(frame["N"], frame[column])
            fit[column] = {"coefficient": coefficient, "exponent": exponent}

    out_dir = config.ensure_out_dir()
    write_csv(out_dir / outputs["series"], frame, manifest.sha256)
    write_json(out_dir / outputs["fit"], fit, manifest.sha256)
    write_manifest(out_dir, manifest)
    print(frame.to_string(index=False))
    return 0


def cmd_compare(args: argparse.Namespace, config: Config) -> int:
    """Rounds, messages and oracle agreement of the wave method and the baselines."""
    g, source = load_graph(args, config)
    outputs = {"comparison": "comparison.json"}
    manifest = _manifest(args, config, source, outputs)

    reports = compare_methods(
        g,
        k=args.k,
        config=config,
        rounds=args.rounds,
        gossip_steps=args.gossip_steps,
        graph_label=source,
    )

    out_dir = config.ensure_out_dir()
    write_json(out_dir / outputs["comparison"], {"reports": reports}, manifest.sha256)
    write_manifest(out_dir, manifest)
    print(pd.DataFrame(reports).to_string(index=False))
    return 0


def cmd_predict(args: argparse.Namespace, config: Config) -> int:
    """Closed-form round predictions for given lambda_2, c, eta and N."""
    lambda2 = ring_lambda2(args.n) if args.ring else args.lambda2
    if lambda2 is None:
        raise ValidationError("predict needs --lambda2 or --ring")
    outputs = {"prediction": "prediction.json"}
    manifest = _manifest(args, config, None, outputs)

    prediction = predict_times(lambda2, config.c, config.eta, args.n)
    out_dir = config.ensure_out_dir()
    write_json(out_dir / outputs["prediction"], prediction.to_dict(), manifest.sha256)
    write_manifest(out_dir, manifest)
    print(canonical_json(prediction.to_dict()), end="")
    return 0


def cmd_spectrum(args: argparse.Namespace, config: Config) -> int:
    """Dump one node's spectrum and its lowest peaks."""
    g, source = load_graph(args, config)
    _check_node(g, args.node)
    outputs = {"spectrum": "spectrum.csv", "peaks": "spectrum_peaks.json"}
    manifest = _manifest(args, config, source, outputs)

    if args.tmax is not None:
        cfg = WaveConfig.from_c2(config.c2, seed=config.seed, eta=config.eta, t_max=args.tmax)
        run = run_to(init_run(g, cfg), args.tmax)
        history = run.history
    else:
        history = WaveClusterer(config).cluster(g, k=1, compare_oracle=False).run.history

    spec = local_spectrum(history[args.node], owner=args.node)
    peaks: Dict[str, Any] = {"node": args.node, "t_max": spec.n_samples}
    try:
        omegas = find_peaks(spec, 1)
        peaks["lowest_omega"] = omegas[0]
        peaks["lowest_bin"] = spec.bin_index(omegas[0])
    except WaveClusterError as e:
        peaks["lowest_omega"] = None
        peaks["reason"] = str(e)

    out_dir = config.ensure_out_dir()
    frame = spectrum_frame(history[args.node], args.node)
    write_csv(out_dir / outputs["spectrum"], frame, manifest.sha256)
    write_json(out_dir / outputs["peaks"], peaks, manifest.sha256)
    write_manifest(out_dir, manifest)
    print(f"node {args.node}: lowest peak omega={peaks['lowest_omega']}")
    return 0


HANDLERS: Dict[str, Callable[[argparse.Namespace, Config], int]] = {
    "cluster": cmd_cluster,
    "compare": cmd_compare,
    "convergence": cmd_convergence,
    "predict": cmd_predict,
    "spectrum": cmd_spectrum,
}


def cmd_replay(args: argparse.Namespace) -> int:
    """Re-run a recorded manifest."""
    manifest = load_manifest(args.manifest)
    if manifest.command not in HANDLERS:
        raise ValidationError(f"manifest records unknown command {manifest.command!r}")
    if manifest.tool_version != __version__:
        logger.warning(
            f"manifest written by version {manifest.tool_version}, replaying with {__version__}"
        )
    source = Path(args.manifest)
    out_dir = args.out_dir or str(source.resolve().parent if source.is_file() else source)
    replay_args = argparse.Namespace(
        command=manifest.command, out_dir=out_dir, **manifest.arguments
    )
    config = Config(out_dir=out_dir, **manifest.wave_config)
    logger.info(f"Replaying {manifest.command} (manifest {manifest.sha256[:12]}) into {out_dir}")
    return HANDLERS[manifest.command](replay_args, config)


def _add_graph_args(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--file", type=str, help="Edge-list file (i<TAB>j[<TAB>w])")
    source.add_argument("--generate", type=str, help="Generator spec, e.g. line:200:99:0.1")


def _add_common_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--c2", type=float, help="Squared wave speed (default: 1.99)")
    parser.add_argument("--eta", type=float, help="Cycles of the lowest frequency (default: 7)")
    parser.add_argument("--seed", type=int, help="RNG seed (default: 0)")
    parser.add_argument("--out-dir", type=str, help="Output directory (default: results)")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wave-cluster",
        description="wave-cluster: graph clustering with the discretized wave equation",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=f"""
Examples:
  # Line graph with a weak middle edge, one eigenvector
  wave-cluster cluster --generate line:200:99:0.1 --k 1

  # Bundled karate-club graph from a file
  wave-cluster cluster --file karate.tsv --k 1

  # Wave method against orthogonal iteration and heat diffusion
  wave-cluster compare --generate karate --k 1

  # Ring convergence sweep
  wave-cluster convergence ring 32,64,128,256

  # Closed-form predictions for a ring of 64 nodes
  wave-cluster predict --ring --n 64

  # Replay a recorded run into another directory
  wave-cluster replay results/manifest.json --out-dir replayed

{GENERATOR_HELP}

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 budget exceeded
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    cluster = sub.add_parser("cluster", help="Cluster a graph")
    _add_graph_args(cluster)
    _add_common_args(cluster)
    cluster.add_argument("--k", type=int, default=1, help="Eigenvectors used; up to 2^k clusters")
    cluster.add_argument("--tmax", type=int, help="Fixed horizon (rounded up to a power of two)")
    cluster.add_argument("--dense-limit", type=int, help="Largest graph checked by the oracle")
    cluster.add_argument("--node", type=int, default=0, help="Node whose spectrum is dumped")
    cluster.add_argument("--trajectory", action="store_true", help="Also write trajectory.csv")
    cluster.add_argument(
        "--bisect", type=int, default=0, metavar="DEPTH", help="Add a recursive bisection"
    )

    compare = sub.add_parser("compare", help="Compare the wave method with the baselines")
    _add_graph_args(compare)
    _add_common_args(compare)
    compare.add_argument("--k", type=int, default=1, help="Eigenvectors used; up to 2^k clusters")
    compare.add_argument("--dense-limit", type=int, help="Largest graph checked by the oracle")
    compare.add_argument(
        "--rounds", type=int, default=300, help="Orthogonal-iteration rounds (default: 300)"
    )
    compare.add_argument(
        "--gossip-steps", type=int, help="Push-sum steps per round; 0 for exact sums"
    )

    convergence = sub.add_parser("convergence", help="Measure rounds vs N")
    convergence.add_argument("family", choices=["ring", "line"], help="Graph family")
    convergence.add_argument("sizes", help="Comma-separated sizes, e.g. 32,64,128")
    _add_common_args(convergence)

    predict = sub.add_parser("predict", help="Closed-form convergence predictions")
    predict.add_argument("--lambda2", type=float, help="Second Laplacian eigenvalue")
    predict.add_argument("--ring", action="store_true", help="Use the ring value 1 - cos(2 pi / N)")
    predict.add_argument("--n", type=int, required=True, help="Node count")
    _add_common_args(predict)

    spectrum = sub.add_parser("spectrum", help="Dump one node's spectrum")
    _add_graph_args(spectrum)
    _add_common_args(spectrum)
    spectrum.add_argument("--node", type=int, default=0, help="Node id")
    spectrum.add_argument("--tmax", type=int, help="Fixed horizon (default: automatic)")

    replay = sub.add_parser("replay", help="Replay a manifest")
    replay.add_argument("manifest", help="manifest.json or the directory holding it")
    replay.add_argument("--out-dir", type=str, help="Output directory (default: the manifest's)")
    replay.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    logging.captureWarnings(True)

    try:
        if args.command == "replay":
            return cmd_replay(args)
        return HANDLERS[args.command](args, make_config(args))
    except WaveClusterError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except Exception as e:
        logger.error(f"Unexpected error in {args.command}: {e}", exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
