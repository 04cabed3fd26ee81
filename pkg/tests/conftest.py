"""Shared fixtures and hypothesis profiles."""

from __future__ import annotations

import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from mapforge.blossoming import enumerate_balanced, enumerate_trees
from mapforge.closure import close
from mapforge.planar_map import build_map

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("thorough", max_examples=500, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: acceptance criteria suite")
    config.addinivalue_line("markers", "slow: runs for more than a few seconds")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture(scope="session")
def acceptance_record():
    """``record(criterion, ok, detail)`` stores one PASS/FAIL line, printed in
    the terminal summary."""

    def record(criterion: int, ok: bool, detail: str) -> None:
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} | {detail}"
        ACCEPTANCE_LINES[criterion] = line
        print(line)

    return record


@pytest.fixture(scope="session")
def triangle_map():
    """K3: half-edges 2i, 2i+1 form edge i; edges 01, 12, 20."""
    return build_map([[0, 5], [1, 2], [3, 4]], root=0)


@pytest.fixture(scope="session")
def tetrahedron():
    """The unique simple triangulation with 4 vertices, from closure."""
    (T,) = enumerate_balanced(2, "tri")
    return close(T)


@pytest.fixture(scope="session")
def square():
    """The 4-cycle: the smallest simple quadrangulation."""
    (T,) = enumerate_balanced(2, "quad")
    return close(T)


@pytest.fixture(scope="session")
def enumerated():
    """Blossoming trees and balanced trees for small sizes, per family."""
    out = {}
    for fam, sizes in (("tri", range(1, 6)), ("quad", range(2, 6))):
        for n in sizes:
            out[fam, n] = (enumerate_trees(n, fam), enumerate_balanced(n, fam))
    return out


def rng_for(request) -> np.random.Generator:
    return np.random.default_rng(abs(hash(request.node.nodeid)) % 2**32)
