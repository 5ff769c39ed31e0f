"""
CSV output helpers.

Every floating-point value leaves the program with 9 significant digits,
so re-reading a file and writing it again reproduces it byte for byte.
"""

import io
import logging
import sys
from pathlib import Path
from typing import Optional, TextIO, Union

import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.9g"


def format_float(value: float) -> str:
    """Format a float with 9 significant digits."""
    return FLOAT_FORMAT % value


def frame_to_csv_text(frame: pd.DataFrame) -> str:
    """Render a frame as CSV text with the shared float format."""
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return buffer.getvalue()


def write_frame(
    frame: pd.DataFrame,
    path: Optional[Union[str, Path]] = None,
    stream: Optional[TextIO] = None,
) -> Optional[Path]:
    """
    Write a frame to a CSV file, or to a stream when no path is given.

    Args:
        frame: Data to write
        path: Destination file (parent directories are created)
        stream: Stream used when path is None (defaults to stdout)

    Returns:
        The written path, or None when written to a stream
    """
    text = frame_to_csv_text(frame)
    if path is None:
        (stream or sys.stdout).write(text)
        return None

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def read_frame(path: Union[str, Path]) -> pd.DataFrame:
    """Read a CSV written by `write_frame`."""
    return pd.read_csv(path)
