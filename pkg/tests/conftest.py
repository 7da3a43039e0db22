from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from ccslm.parser import parse_strict

settings.register_profile(
    "ci",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")

PROGRAMS = Path(__file__).parent.parent / "programs"


def load_program(name: str):
    return parse_strict((PROGRAMS / name).read_text(encoding="utf-8"))


@pytest.fixture
def store_program():
    """Write-once store with a clock reset, one reader and one writer."""
    return load_program("store.ccslm")


@pytest.fixture
def store_defs_program():
    """The bare store definitions, entered at the store thread itself."""
    return parse_strict("S = r:{w}.S + w:{w}.S1; S1 = sigma:{sigma}.S; main = S")


@pytest.fixture
def readwrite_program():
    """Read-before-write memory cell with one reader and one writer."""
    return load_program("readwrite.ccslm")


@pytest.fixture
def loop_program():
    """Clocked producer/consumer pair cycling write, read, tick."""
    return load_program("loop.ccslm")


@pytest.fixture
def baseline_program():
    """Two one-shot clients racing for a shared server, all under restriction."""
    return load_program("baseline.ccslm")
