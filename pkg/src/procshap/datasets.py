"""Bundled teaching dataset.

The running example is the classic six-trace request-handling log used
throughout the process mining literature; the copy shipped here was
reconstructed from its published trace table.  The two large benchmark
logs (BPI Challenge 2012, Hospital Billing) are not bundled; download
them separately and point the CLI at the .xes.gz files.
"""

from __future__ import annotations

from pathlib import Path

from .event_log import EventLog, parse_xes

_DATA_DIR = Path(__file__).parent / "data"


def running_example_path() -> Path:
    return _DATA_DIR / "running_example.xes"


def load_running_example() -> EventLog:
    return parse_xes(running_example_path())
