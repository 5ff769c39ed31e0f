"""
Run Manifest

Record of one CLI invocation: what was asked, with which configuration
and seeds, when it ran, and which files it produced.
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional

logger = logging.getLogger(__name__)

ARTIFACT_VERSION = "1.0.0"


@dataclass
class RunManifest:
    """
    Reproducibility record written next to every output set.

    Features:
    - Command line and config snapshot
    - Seeds used by every trial
    - Start/end wall time
    - Output file list and final status
    """

    command_line: str
    config_snapshot: Dict[str, str] = field(default_factory=dict)
    seeds: List[int] = field(default_factory=list)
    started_at: str = field(default_factory=lambda: datetime.now().isoformat())
    finished_at: Optional[str] = None
    outputs: List[str] = field(default_factory=list)
    artifact_version: str = ARTIFACT_VERSION
    status: str = "running"
    error: Optional[str] = None

    def add_output(self, path: Path) -> None:
        """Register an output file."""
        self.outputs.append(str(path))

    def finish(self, status: str = "success", error: Optional[str] = None) -> None:
        """
        Close the record.

        Args:
            status: 'success' or 'error'
            error: Error description when status is 'error'
        """
        self.status = status
        self.error = error
        self.finished_at = datetime.now().isoformat()

    def to_dict(self) -> Dict:
        """Plain dictionary view."""
        return asdict(self)

    def write(self, path: Path) -> Path:
        """
        Write the manifest as JSON.

        Args:
            path: Destination file

        Returns:
            The written path
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
        logger.info(f"Manifest written to {path}")
        return path

    @classmethod
    def read(cls, path: Path) -> "RunManifest":
        """Load a manifest written by `write`."""
        with open(path, "r", encoding="utf-8") as f:
            return cls(**json.load(f))
