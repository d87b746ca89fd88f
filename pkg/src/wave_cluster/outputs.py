"""
Run manifests and machine-readable outputs.

Every command writes a manifest describing exactly what was run. Its
SHA-256 over the canonical JSON encoding is embedded in every JSON and
CSV output, and replaying the manifest reproduces the outputs byte for
byte. Output directories are not part of the manifest, so a replay into
another directory yields identical files.
"""

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd

from .exceptions import ValidationError

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"
HASH_KEY = "manifest_sha256"

PathLike = Union[str, Path]


def to_jsonable(obj: Any) -> Any:
    """Recursively convert numpy, path and tuple values to plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Path):
        return str(obj)
    return obj


def canonical_json(obj: Any) -> str:
    """Deterministic JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"


@dataclass
class RunManifest:
    """Inputs of one command invocation."""

    command: str
    graph_source: Optional[str]
    wave_config: Dict[str, Any]
    k: Optional[int]
    outputs: Dict[str, str]
    tool_version: str
    seed: int
    arguments: Dict[str, Any] = field(default_factory=dict)

    def content(self) -> Dict[str, Any]:
        return to_jsonable(asdict(self))

    @property
    def sha256(self) -> str:
        """Hash of the canonical encoding of the manifest content."""
        text = json.dumps(self.content(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def to_dict(self) -> Dict[str, Any]:
        data = self.content()
        data[HASH_KEY] = self.sha256
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunManifest":
        """
        Rebuild a manifest, checking the recorded hash when present.

        Raises:
            ValidationError: Missing fields or hash mismatch
        """
        recorded = data.get(HASH_KEY)
        fields = {k: v for k, v in data.items() if k != HASH_KEY}
        try:
            manifest = cls(**fields)
        except TypeError as e:
            raise ValidationError(f"malformed manifest: {e}") from e
        if recorded is not None and recorded != manifest.sha256:
            raise ValidationError(
                f"manifest hash mismatch: recorded {recorded}, computed {manifest.sha256}"
            )
        return manifest


def write_manifest(out_dir: PathLike, manifest: RunManifest) -> Path:
    path = Path(out_dir) / MANIFEST_FILE
    path.write_text(canonical_json(manifest.to_dict()), encoding="utf-8")
    return path


def load_manifest(path: PathLike) -> RunManifest:
    """Read a manifest file (or the manifest inside a directory)."""
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_FILE
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ValidationError(f"cannot read manifest {path}: {e}") from e
    return RunManifest.from_dict(data)


def write_json(path: PathLike, payload: Dict[str, Any], manifest_hash: str) -> Path:
    """Write a JSON result object carrying the manifest hash."""
    path = Path(path)
    body = dict(payload)
    body[HASH_KEY] = manifest_hash
    path.write_text(canonical_json(body), encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path


def write_csv(path: PathLike, frame: pd.DataFrame, manifest_hash: str) -> Path:
    """Write a CSV whose first line is a ``# manifest_sha256=...`` comment."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(f"# {HASH_KEY}={manifest_hash}\n")
        frame.to_csv(fh, index=False, float_format="%.17g")
    logger.info(f"Wrote {path} ({len(frame)} rows)")
    return path


def read_csv(path: PathLike) -> pd.DataFrame:
    """Read a CSV written by write_csv, skipping the hash comment."""
    return pd.read_csv(path, comment="#")
