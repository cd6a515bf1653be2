import time

import pytest

from rank2hecke.hecke import build_matrices, check_relations, saturate, seed_table

ACCEPTANCE_LINES: list[str] = []


class ModelStore:
    """Builds each group's matrices at most once per test session."""

    def __init__(self):
        self.models = {}
        self.timings = {}

    def get(self, gid: str):
        if gid not in self.models:
            t0 = time.perf_counter()
            table = seed_table(gid)
            stats = saturate(table)
            model = build_matrices(table)
            t1 = time.perf_counter()
            self.models[gid] = model
            self.timings[gid] = {"saturation": t1 - t0, "stats": stats}
        return self.models[gid]


@pytest.fixture(scope="session")
def store():
    return ModelStore()


@pytest.fixture(scope="session")
def g4(store):
    return store.get("G4")


@pytest.fixture(scope="session")
def g6(store):
    return store.get("G6")


@pytest.fixture(scope="session")
def g7(store):
    return store.get("G7")


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def relations_ok():
    return check_relations
