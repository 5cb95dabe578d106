"""Discretization goldens, CSV loading and the stratified split."""
import math
import shutil

import pytest

from carm import dataset as ds
from carm.dataset import (
    AttributeMeta,
    DatasetError,
    IRIS_SCHEMA,
    LJB_SCHEMA,
    NOMINAL,
    NUMERIC,
    WBC_SCHEMA,
    discretize,
    load_csv,
    load_preset,
    resolve_dataset,
    split,
)


def attr(schema, name):
    for meta in schema.attributes:
        if meta.name == name:
            return meta
    raise KeyError(name)


# -- discretization goldens -------------------------------------------------

IRIS_GOLDENS = [
    ("sepal_length", [(4.3, 1), (5.5, 1), (5.6, 2), (6.8, 2), (6.9, 3), (7.9, 3)]),
    ("sepal_width", [(2.0, 1), (2.8, 1), (2.9, 2), (3.7, 2), (3.8, 3), (4.4, 3)]),
    ("petal_length", [(1.0, 1), (3.0, 1), (3.1, 2), (5.0, 2), (5.1, 3), (6.9, 3)]),
    ("petal_width", [(0.1, 1), (0.8, 1), (0.9, 2), (1.7, 2), (1.8, 3), (2.5, 3)]),
]

LJB_GOLDENS = [
    ("age", [(20, 1), (39, 1), (40, 2), (49, 2), (50, 3), (59, 3), (60, 4), (90, 4)]),
    ("tumor_size", [(0, 1), (9, 1), (10, 2), (19, 2), (29, 3), (39, 4), (49, 5), (50, 6)]),
    ("inv_nodes", [(0, 1), (2, 1), (3, 2), (5, 2), (8, 3), (11, 4), (14, 5), (17, 6), (18, 7)]),
]


@pytest.mark.parametrize("name,cases", IRIS_GOLDENS)
def test_iris_bin_goldens(name, cases):
    meta = attr(IRIS_SCHEMA, name)
    for value, code in cases:
        assert discretize(value, meta) == code, (name, value)


@pytest.mark.parametrize("name,cases", LJB_GOLDENS)
def test_ljb_bin_goldens(name, cases):
    meta = attr(LJB_SCHEMA, name)
    for value, code in cases:
        assert discretize(value, meta) == code, (name, value)


def test_discretize_rejects_non_numeric_attribute():
    with pytest.raises(DatasetError):
        discretize(1.0, IRIS_SCHEMA.class_attribute)


def test_discretize_rejects_non_finite():
    meta = attr(IRIS_SCHEMA, "sepal_length")
    for bad in (math.nan, math.inf, -math.inf):
        with pytest.raises(DatasetError):
            discretize(bad, meta)


def test_display_renders_intervals_and_labels():
    meta = attr(IRIS_SCHEMA, "sepal_length")
    assert meta.display(1) == "(-inf,5.5]"
    assert meta.display(2) == "(5.5,6.8]"
    assert meta.display(3) == "(6.8,inf)"
    cls = IRIS_SCHEMA.class_attribute
    assert cls.display("IS") == "Iris-setosa"
    plain = AttributeMeta("p", NOMINAL, (7, 8))
    assert plain.display(7) == "7"


def test_interval_unknown_code_raises():
    meta = attr(IRIS_SCHEMA, "sepal_length")
    with pytest.raises(DatasetError):
        meta.interval(99)


def test_attribute_meta_validation():
    with pytest.raises(DatasetError):
        AttributeMeta("x", "weird-kind", (1,))
    with pytest.raises(DatasetError):
        AttributeMeta("x", NOMINAL, ())
    with pytest.raises(DatasetError):
        AttributeMeta("x", NUMERIC, (1, 2))  # no bins
    with pytest.raises(DatasetError):
        AttributeMeta("x", NUMERIC, (1, 2), ((5.0, 1), (4.0, 2)))  # not ascending
    with pytest.raises(DatasetError):
        AttributeMeta("x", NUMERIC, (1, 2), ((1.0, 1), (2.0, 2)))  # bounded tail


# -- presets ----------------------------------------------------------------

def test_preset_instance_counts(iris_data, ljb_data, wbc_data):
    assert len(iris_data.instances) == 150
    assert len(ljb_data.instances) == 277
    assert len(wbc_data.instances) == 683


def test_preset_class_counts(iris_data, ljb_data, wbc_data):
    assert iris_data.class_counts() == {"IS": 50, "IV": 50, "IVG": 50}
    assert ljb_data.class_counts() == {1: 81, 0: 196}
    assert wbc_data.class_counts() == {2: 444, 4: 239}


def test_preset_rows_are_coded(iris_data):
    for row in iris_data.instances:
        assert len(row) == 5
        for g, meta in zip(row, iris_data.attributes):
            assert g in meta.values
        assert row[-1] in iris_data.class_attribute.values


def test_load_preset_unknown_name():
    with pytest.raises(DatasetError):
        load_preset("nope")


# -- CSV loading ------------------------------------------------------------

def test_load_csv_missing_file(tmp_path):
    with pytest.raises(DatasetError):
        load_csv(tmp_path / "missing.csv", IRIS_SCHEMA)


def test_load_csv_rejects_wrong_header(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b,c,d,e\n1,1,1,1,IS\n")
    with pytest.raises(DatasetError, match="header"):
        load_csv(p, IRIS_SCHEMA)


def test_load_csv_rejects_bad_cell(tmp_path):
    p = tmp_path / "bad.csv"
    header = ",".join(IRIS_SCHEMA.header)
    p.write_text(f"{header}\n5.1,3.0,1.4,not-a-number,Iris-setosa\n")
    with pytest.raises(DatasetError, match="petal_width"):
        load_csv(p, IRIS_SCHEMA)


def test_load_csv_rejects_ragged_row(tmp_path):
    p = tmp_path / "bad.csv"
    header = ",".join(IRIS_SCHEMA.header)
    p.write_text(f"{header}\n5.1,3.0,1.4\n")
    with pytest.raises(DatasetError, match="cells"):
        load_csv(p, IRIS_SCHEMA)


def test_load_csv_rejects_empty_and_header_only(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("")
    with pytest.raises(DatasetError):
        load_csv(p, IRIS_SCHEMA)
    p.write_text(",".join(IRIS_SCHEMA.header) + "\n")
    with pytest.raises(DatasetError, match="no data rows"):
        load_csv(p, IRIS_SCHEMA)


def test_load_csv_accepts_codes_or_labels(tmp_path):
    p = tmp_path / "ok.csv"
    header = ",".join(IRIS_SCHEMA.header)
    # first row uses the raw label, second the code spelling
    p.write_text(f"{header}\n5.1,3.0,1.4,0.2,Iris-setosa\n6.0,3.0,4.5,1.5,IV\n")
    data = load_csv(p, IRIS_SCHEMA)
    assert data.instances == ((1, 2, 1, 1, "IS"), (2, 2, 2, 2, "IV"))


# -- splitting --------------------------------------------------------------

def test_split_sizes_and_stratification(iris_data):
    sp = split(iris_data, 0.8, seed=0)
    assert len(sp.train.instances) == 120
    assert len(sp.test.instances) == 30
    assert sp.train.class_counts() == {"IS": 40, "IV": 40, "IVG": 40}
    assert sp.test.class_counts() == {"IS": 10, "IV": 10, "IVG": 10}


def test_split_partitions_the_data(iris_data):
    sp = split(iris_data, 0.8, seed=3)
    merged = sorted(sp.train.instances + sp.test.instances)
    assert merged == sorted(iris_data.instances)


def test_split_deterministic_per_seed(iris_data):
    a = split(iris_data, 0.8, seed=7)
    b = split(iris_data, 0.8, seed=7)
    c = split(iris_data, 0.8, seed=8)
    assert a.train.instances == b.train.instances
    assert a.test.instances == b.test.instances
    assert a.test.instances != c.test.instances


def test_split_rejects_bad_fraction(iris_data):
    for bad in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(DatasetError):
            split(iris_data, bad, seed=0)


def test_split_keeps_singleton_class_in_train():
    from conftest import make_dataset

    rows = [(1, "x"), (2, "x"), (1, "x"), (2, "x"), (1, "y")]
    data = make_dataset(rows, n_attributes=1)
    sp = split(data, 0.5, seed=0)
    assert all(r[-1] == "x" for r in sp.test.instances)
    assert (1, "y") in sp.train.instances


# -- resolve_dataset --------------------------------------------------------

def test_resolve_dataset_preset_and_path(tmp_path, iris_data):
    assert resolve_dataset("iris") is load_preset("iris")
    header = ",".join(IRIS_SCHEMA.header)
    p = tmp_path / "mine.csv"
    p.write_text(f"{header}\n5.1,3.0,1.4,0.2,Iris-setosa\n")
    data = resolve_dataset(str(p))
    assert data.name == "iris"
    assert len(data.instances) == 1


def test_resolve_dataset_unknown(tmp_path):
    with pytest.raises(DatasetError):
        resolve_dataset("no-such-preset")
    p = tmp_path / "odd.csv"
    p.write_text("one,two\n1,2\n")
    with pytest.raises(DatasetError, match="header"):
        resolve_dataset(str(p))
