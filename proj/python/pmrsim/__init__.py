"""Perpendicular magnetic recording simulator: channel, BCJR, BP and RVCM."""

from ._core import *  # noqa: F401,F403
from ._core import CSV_HEADER, run_sweep

__all__ = [name for name in dir() if not name.startswith("_")]


def sweep_rows(config):
    """Run a sweep and return the CSV rows as dicts keyed by the header."""
    keys = CSV_HEADER.split(",")
    lines = run_sweep(config).splitlines()
    return [dict(zip(keys, line.split(","))) for line in lines[1:]]
