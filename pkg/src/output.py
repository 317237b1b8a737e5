"""Output module for writing run artifacts (CSV tables, JSON summaries, manifests)"""

import json
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

import config

logger = logging.getLogger(__name__)


@dataclass
class RunManifest:
    """Record of one command invocation and every file it wrote."""
    command: str
    parameters: dict[str, Any]
    artifacts: list[str] = field(default_factory=list)
    wall_time: float = 0.0
    version: str = config.VERSION


def _json_default(obj: Any) -> Any:
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")


def to_json(payload: Any) -> str:
    """JSON text; floats keep their shortest round-trip representation."""
    return json.dumps(payload, indent=2, default=_json_default) + "\n"


class ArtifactWriter:
    """Writes CSV/JSON artifacts for one command and a manifest listing them."""

    def __init__(self, command: str, parameters: dict[str, Any], manifest_path: Path):
        """
        Initialize a writer for one command run.

        Args:
            command: CLI subcommand name
            parameters: the effective parameters of the run
            manifest_path: where the manifest JSON goes on close()
        """
        self.manifest = RunManifest(command=command, parameters=dict(parameters))
        self.manifest_path = Path(manifest_path)
        self._started = time.perf_counter()

    def _prepare(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def write_csv(self, path: Path, header: Sequence[str], table: np.ndarray) -> Path:
        """Write columns of `table` under a comma-separated header, 9 significant digits."""
        path = self._prepare(path)
        table = np.atleast_2d(np.asarray(table, dtype=float))
        if table.shape[1] != len(header):
            raise ValueError(f"table has {table.shape[1]} columns, header has {len(header)}")
        np.savetxt(
            path,
            table,
            fmt=config.CSV_FLOAT_FORMAT,
            delimiter=",",
            newline="\n",
            header=",".join(header),
            comments="",
            encoding="utf-8",
        )
        self.manifest.artifacts.append(str(path))
        logger.info("wrote %s (%d rows)", path, table.shape[0])
        return path

    def write_json(self, path: Path, payload: Any) -> Path:
        path = self._prepare(path)
        path.write_text(to_json(payload), encoding="utf-8")
        self.manifest.artifacts.append(str(path))
        logger.info("wrote %s", path)
        return path

    def close(self) -> RunManifest:
        """Stamp the wall time and write the manifest."""
        self.manifest.wall_time = time.perf_counter() - self._started
        path = self._prepare(self.manifest_path)
        path.write_text(to_json(asdict(self.manifest)), encoding="utf-8")
        logger.info("manifest %s lists %d artifacts", path, len(self.manifest.artifacts))
        return self.manifest

    def __enter__(self) -> "ArtifactWriter":
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        # An I/O failure may be the manifest location itself
        if exc_type is None or not issubclass(exc_type, OSError):
            self.close()


def manifest_path_for(artifact: Path) -> Path:
    """runs/sweep.csv -> runs/sweep.manifest.json"""
    artifact = Path(artifact)
    return artifact.with_name(f"{artifact.stem}.manifest.json")


def write_table(
    path: Path,
    header: Sequence[str],
    table: np.ndarray,
    command: str,
    parameters: dict[str, Any],
) -> RunManifest:
    """Convenience function to write one CSV table plus its manifest."""
    with ArtifactWriter(command, parameters, manifest_path_for(path)) as writer:
        writer.write_csv(path, header, table)
    return writer.manifest
