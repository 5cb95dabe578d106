"""Shared fixtures: tiny hand datasets and preset loaders."""
import math

import pytest


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    rows = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", "call") != "call":
                continue
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance" in nodeid:
                rows.append((nodeid.split("::")[-1], outcome == "passed"))
    if rows:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, ok in rows:
            terminalreporter.write_line(("PASS  " if ok else "FAIL  ") + name)

from carm import dataset as ds
from carm.rules import Chromosome


def make_dataset(rows, n_attributes=None, name="toy", class_values=None):
    """Dataset from coded rows (class last); domains inferred per column."""
    rows = [tuple(r) for r in rows]
    width = len(rows[0])
    if n_attributes is None:
        n_attributes = width - 1
    attrs = []
    for j in range(n_attributes):
        seen = sorted({r[j] for r in rows}, key=str)
        attrs.append(ds.AttributeMeta(f"a{j}", ds.NOMINAL, tuple(seen)))
    if class_values is None:
        class_values = tuple(sorted({r[-1] for r in rows}, key=str))
    cls = ds.AttributeMeta("cls", ds.NOMINAL, tuple(class_values))
    return ds.Dataset(name=name, attributes=tuple(attrs),
                      class_attribute=cls, instances=tuple(rows))


def rule(*genes, cls):
    return Chromosome(tuple(genes), cls)


@pytest.fixture(scope="session")
def iris_data():
    return ds.load_preset("iris")


@pytest.fixture(scope="session")
def ljb_data():
    return ds.load_preset("ljb")


@pytest.fixture(scope="session")
def wbc_data():
    return ds.load_preset("wbc")


@pytest.fixture(scope="session")
def iris_schema():
    return ds.IRIS_SCHEMA


@pytest.fixture
def toy_rows():
    # two attributes, two classes, eight rows; counts easy to verify by hand
    return [
        (1, 1, "x"),
        (1, 1, "x"),
        (1, 2, "x"),
        (2, 1, "y"),
        (2, 2, "y"),
        (2, 2, "y"),
        (1, 2, "y"),
        (2, 1, "x"),
    ]
