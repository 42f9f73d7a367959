"""Bundled example programs.

``*.cp`` files are counter programs used for end-to-end checks of the
compiler; ``*.svas`` files are small SVAS programs with many accepting runs,
used for the logic encoding.
"""

from __future__ import annotations

from importlib import resources

from ..counterprog import CounterProgram, parse_cp
from ..svas import SvasProgram, parse_svas


def _texts(suffix: str) -> dict[str, str]:
    root = resources.files(__name__)
    return {f.name[: -len(suffix)]: f.read_text()
            for f in sorted(root.iterdir(), key=lambda f: f.name)
            if f.name.endswith(suffix)}


def counter_programs() -> dict[str, CounterProgram]:
    return {name: parse_cp(text) for name, text in _texts(".cp").items()}


def svas_programs() -> dict[str, SvasProgram]:
    return {name: parse_svas(text) for name, text in _texts(".svas").items()}
