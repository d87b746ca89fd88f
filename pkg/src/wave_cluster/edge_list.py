"""
Edge-list file ingestion.

Files hold one edge per line as ``i<TAB>j<TAB>w`` (weight optional, default
1.0) with ``#`` comments, UTF-8 encoded. Integer ids are renumbered densely
in ascending numeric order; any other ids are renumbered in order of first
appearance. The original identifiers are kept on the graph as node names.
"""

import logging
import warnings
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np
import pandas as pd

from .exceptions import DisconnectedGraphError, DuplicateEdgeError, EdgeListFormatError
from .graph import Graph, build_graph

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _remap_ids(tokens: List[str]) -> Tuple[Dict[str, int], List[str]]:
    try:
        numeric = {t: int(t) for t in tokens}
    except ValueError:
        numeric = None

    if numeric is not None:
        ordered = sorted(set(tokens), key=lambda t: numeric[t])
    else:
        ordered = list(dict.fromkeys(tokens))
    return {t: idx for idx, t in enumerate(ordered)}, ordered


def read_edge_list(path: PathLike) -> pd.DataFrame:
    """
    Read an edge-list file into a frame with string columns i, j, w.

    Raises:
        EdgeListFormatError: If a line has the wrong number of fields
    """
    path = Path(path)
    try:
        with warnings.catch_warnings():
            # lines with five or more fields are truncated; the fourth still shows
            warnings.simplefilter("ignore", pd.errors.ParserWarning)
            frame = pd.read_csv(
                path,
                sep="\t",
                comment="#",
                header=None,
                names=["i", "j", "w", "extra"],
                index_col=False,
                dtype=str,
                keep_default_na=False,
                skip_blank_lines=True,
                encoding="utf-8",
            )
    except pd.errors.ParserError as e:
        raise EdgeListFormatError(f"{path}: {e}") from e
    except pd.errors.EmptyDataError:
        frame = pd.DataFrame(columns=["i", "j", "w", "extra"], dtype=str)
    except (OSError, UnicodeDecodeError) as e:
        raise EdgeListFormatError(f"cannot read {path}: {e}") from e

    frame = frame.fillna("").apply(lambda col: col.astype(str).str.strip())
    extra = frame.index[frame["extra"] != ""]
    if len(extra):
        raise EdgeListFormatError(
            f"{path}: {len(extra)} line(s) with more than three fields, "
            f"first record {extra[0] + 1}"
        )
    frame = frame.drop(columns="extra")
    bad = frame.index[(frame["i"] == "") | (frame["j"] == "")]
    if len(bad):
        raise EdgeListFormatError(
            f"{path}: {len(bad)} line(s) without two node ids, first record {bad[0] + 1}"
        )
    return frame


def load_edge_list(path: PathLike, require_connected: bool = True) -> Graph:
    """
    Load and validate a graph from an edge-list file.

    Each unordered pair may appear on one line only; a reversed repeat is a
    duplicate even when the weights match.

    Args:
        path: File to read
        require_connected: Reject graphs with more than one component

    Returns:
        Graph with node names set to the file's identifiers

    Raises:
        EdgeListFormatError, DuplicateEdgeError, GraphValidationError,
        DisconnectedGraphError
    """
    frame = read_edge_list(path)
    if frame.empty:
        raise EdgeListFormatError(f"{path}: no edges")

    mapping, names = _remap_ids(frame["i"].tolist() + frame["j"].tolist())
    weights = frame["w"].replace("", "1.0")
    try:
        w = weights.astype(float).to_numpy()
    except ValueError as e:
        raise EdgeListFormatError(f"{path}: non-numeric weight ({e})") from e

    src = frame["i"].map(mapping).to_numpy()
    dst = frame["j"].map(mapping).to_numpy()
    pairs = pd.DataFrame({"a": np.minimum(src, dst), "b": np.maximum(src, dst)})
    repeated = np.flatnonzero(pairs.duplicated().to_numpy())
    if repeated.size:
        first = int(repeated[0])
        raise DuplicateEdgeError(
            f"{path}: edge ({frame['i'].iat[first]}, {frame['j'].iat[first]}) listed more "
            f"than once ({repeated.size} repeated line(s)), first repeat at record {first + 1}"
        )
    identity = names == [str(x) for x in range(len(names))]
    g = build_graph(
        zip(src, dst, w),
        n=len(names),
        node_names=None if identity else names,
    )
    logger.info(f"Loaded {g!r} from {path}")

    if require_connected and not g.is_connected():
        comps = g.components()
        raise DisconnectedGraphError(
            f"{path}: graph has {len(comps)} components "
            f"(sizes {sorted((len(c) for c in comps), reverse=True)[:5]})"
        )
    return g


def write_edge_list(g: Graph, path: PathLike) -> Path:
    """Write g in edge-list format, one undirected edge per line."""
    path = Path(path)
    edges = g.edges()
    frame = pd.DataFrame(
        {
            "i": [g.name_of(i) for i, _, _ in edges],
            "j": [g.name_of(j) for _, j, _ in edges],
            "w": np.array([w for _, _, w in edges]),
        }
    )
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(f"# {g.n} nodes, {g.n_edges} edges\n")
        frame.to_csv(fh, sep="\t", header=False, index=False, float_format="%.17g")
    return path
