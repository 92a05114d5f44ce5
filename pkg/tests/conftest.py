import json
from pathlib import Path

import pytest

from fiberlattice.chain_classify import chain_configuration
from fiberlattice.lattice_core import CurveClass, FiberConfiguration
from fiberlattice.loader import load

ROOT = Path(__file__).resolve().parents[1]
CORPUS_DIR = ROOT / "fibers"
CORPUS_FILES = sorted(CORPUS_DIR.glob("*.json"))

# PASS/FAIL lines from the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


def path_edges(k):
    return [(i, i + 1) for i in range(k - 1)]


def a_chain(k, n=1):
    return chain_configuration([n] * k, path_edges(k))


def single_minus_two(n=1):
    return chain_configuration([n], [])


def config(curves, edges, full=False, char=0):
    """curves: (n, self_int, K.C, multiplicity) tuples; edges: (a, b, x)."""
    cc = [CurveClass(i, *c) for i, c in enumerate(curves)]
    return FiberConfiguration.from_graph(cc, edges, char, full)


@pytest.fixture(scope="session")
def corpus():
    return {p.stem: load(p) for p in CORPUS_FILES}


@pytest.fixture
def a2_doc():
    return {
        "schema_version": 1,
        "characteristic": 0,
        "is_full_fiber": False,
        "curves": [
            {"id": 0, "field_degree": 1, "self_int": -2, "canonical_deg": 0, "multiplicity": 1},
            {"id": 1, "field_degree": 1, "self_int": -2, "canonical_deg": 0, "multiplicity": 1},
        ],
        "edges": [{"a": 0, "b": 1, "intersection": 1}],
    }


def write_json(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p
