"""Dataset loading, discretization and train/test splitting.

Every attribute is reduced to a small discrete code domain before mining.
Numeric attributes carry a bin table of (upper_bound, code) pairs with
inclusive upper bounds and +inf as the last bound, so the mapping is total
over the reals.  Nominal attributes map raw labels onto codes.
"""

from __future__ import annotations

import csv
import logging
import math
import random
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Optional, Sequence, Union

log = logging.getLogger(__name__)

Code = Union[int, str]

NOMINAL = "nominal"
NUMERIC = "discretized-numeric"
INT_RANGE = "integer-range"

_KINDS = (NOMINAL, NUMERIC, INT_RANGE)


class DatasetError(ValueError):
    """Raised for unreadable files, malformed rows or bad split parameters."""


@dataclass(frozen=True)
class AttributeMeta:
    """Declared code domain of one column.

    values holds the admissible codes in declaration order; that order also
    defines which code counts as the smallest / largest for seeding.
    labels optionally maps a code to the raw spelling used in source files
    (both directions are accepted when loading).
    """

    name: str
    kind: str
    values: tuple
    bins: tuple = ()  # ((upper_bound, code), ...) for NUMERIC attributes
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DatasetError(f"unknown attribute kind {self.kind!r}")
        if not self.values:
            raise DatasetError(f"attribute {self.name!r} has an empty code domain")
        if self.kind == NUMERIC:
            if not self.bins:
                raise DatasetError(f"numeric attribute {self.name!r} needs bins")
            uppers = [b[0] for b in self.bins]
            if uppers != sorted(uppers):
                raise DatasetError(f"bins of {self.name!r} must be ascending")
            if not math.isinf(uppers[-1]):
                raise DatasetError(f"last bin of {self.name!r} must be unbounded")
            if tuple(b[1] for b in self.bins) != self.values:
                raise DatasetError(f"bin codes of {self.name!r} do not match values")

    def display(self, code) -> str:
        """Human spelling of a code: its label, its bin interval, or itself."""
        if code in self.labels:
            return str(self.labels[code])
        if self.kind == NUMERIC:
            lo, hi = self.interval(code)
            lo_s = "-inf" if math.isinf(lo) else format(lo, "g")
            if math.isinf(hi):
                return f"({lo_s},inf)"
            return f"({lo_s},{format(hi, 'g')}]"
        return str(code)

    def interval(self, code):
        """(lower, upper] interval covered by a numeric code."""
        lo = -math.inf
        for upper, c in self.bins:
            if c == code:
                return lo, upper
            lo = upper
        raise DatasetError(f"code {code!r} is not a bin of {self.name!r}")


def discretize(value: float, meta: AttributeMeta) -> Code:
    """Map a raw numeric value to the first bin whose upper bound covers it."""
    if meta.kind != NUMERIC:
        raise DatasetError(f"attribute {meta.name!r} is not numeric")
    if not math.isfinite(value):
        raise DatasetError(f"cannot discretize non-finite value {value!r} for {meta.name!r}")
    for upper, code in meta.bins:
        if value <= upper:
            return code
    raise AssertionError("unreachable: last bin is unbounded")


@dataclass(frozen=True)
class DatasetSchema:
    name: str
    attributes: tuple  # AttributeMeta, ...
    class_attribute: AttributeMeta

    @property
    def header(self):
        return tuple(a.name for a in self.attributes) + (self.class_attribute.name,)


@dataclass
class Dataset:
    """Fully coded instances plus their schema. Treated as immutable after load."""

    name: str
    attributes: tuple
    class_attribute: AttributeMeta
    instances: tuple  # rows of codes, class code last

    @property
    def n_attributes(self) -> int:
        return len(self.attributes)

    def class_counts(self) -> dict:
        counts = {c: 0 for c in self.class_attribute.values}
        for row in self.instances:
            counts[row[-1]] += 1
        return counts


@dataclass(frozen=True)
class Split:
    train: Dataset
    test: Dataset
    seed: int


def _map_cell(cell: str, meta: AttributeMeta):
    cell = cell.strip()
    if meta.kind == NUMERIC:
        try:
            return discretize(float(cell), meta)
        except (ValueError, DatasetError):
            return None
    if meta.kind == INT_RANGE:
        try:
            code = int(cell)
        except ValueError:
            return None
        return code if code in meta.values else None
    # nominal: accept the code spelling or a declared label
    for code in meta.values:
        if cell == str(code):
            return code
    for code, label in meta.labels.items():
        if cell == str(label):
            return code
    return None


def load_csv(path, schema: DatasetSchema) -> Dataset:
    """Load a headered CSV whose columns match the schema, class column last."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            rows = [r for r in reader if r]
    except OSError as exc:
        raise DatasetError(f"cannot read dataset file {path}: {exc}") from exc
    if not rows:
        raise DatasetError(f"{path}: file is empty")
    header = tuple(h.strip() for h in rows[0])
    if header != schema.header:
        raise DatasetError(
            f"{path}: header {header} does not match schema {schema.header}"
        )
    if len(rows) == 1:
        raise DatasetError(f"{path}: no data rows")
    metas = list(schema.attributes) + [schema.class_attribute]
    instances = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(metas):
            raise DatasetError(f"{path}:{lineno}: expected {len(metas)} cells, got {len(row)}")
        coded = []
        for col, (cell, meta) in enumerate(zip(row, metas)):
            code = _map_cell(cell, meta)
            if code is None:
                raise DatasetError(
                    f"{path}:{lineno}: column {meta.name!r} (index {col}): "
                    f"cannot map cell {cell!r}"
                )
            coded.append(code)
        instances.append(tuple(coded))
    return Dataset(
        name=schema.name,
        attributes=schema.attributes,
        class_attribute=schema.class_attribute,
        instances=tuple(instances),
    )


def split(dataset: Dataset, train_fraction: float, seed: int) -> Split:
    """Deterministic stratified split; rounding remainders go to train."""
    if not (0.0 < train_fraction < 1.0):
        raise DatasetError(f"train_fraction must be in (0, 1), got {train_fraction}")
    rng = random.Random(f"split:{seed}")
    by_class = {c: [] for c in dataset.class_attribute.values}
    for idx, row in enumerate(dataset.instances):
        by_class[row[-1]].append(idx)
    train_idx, test_idx = [], []
    for cls in dataset.class_attribute.values:
        idxs = by_class[cls]
        if not idxs:
            continue
        if len(idxs) < 2:
            log.warning("class %r has a single instance; keeping it in train", cls)
            train_idx.extend(idxs)
            continue
        idxs = idxs[:]
        rng.shuffle(idxs)
        # +1e-9 guards against float dust: 150*(1-0.8) must give 30, not 29
        n_test = int(len(idxs) * (1.0 - train_fraction) + 1e-9)
        test_idx.extend(idxs[:n_test])
        train_idx.extend(idxs[n_test:])
    train_idx.sort()
    test_idx.sort()

    def subset(indices, suffix):
        return Dataset(
            name=f"{dataset.name}:{suffix}",
            attributes=dataset.attributes,
            class_attribute=dataset.class_attribute,
            instances=tuple(dataset.instances[i] for i in indices),
        )

    return Split(train=subset(train_idx, "train"), test=subset(test_idx, "test"), seed=seed)


# ---------------------------------------------------------------------------
# Built-in presets
# ---------------------------------------------------------------------------

IRIS_SCHEMA = DatasetSchema(
    name="iris",
    attributes=(
        AttributeMeta("sepal_length", NUMERIC, (1, 2, 3), ((5.5, 1), (6.8, 2), (math.inf, 3))),
        AttributeMeta("sepal_width", NUMERIC, (1, 2, 3), ((2.8, 1), (3.7, 2), (math.inf, 3))),
        AttributeMeta("petal_length", NUMERIC, (1, 2, 3), ((3.0, 1), (5.0, 2), (math.inf, 3))),
        AttributeMeta("petal_width", NUMERIC, (1, 2, 3), ((0.8, 1), (1.7, 2), (math.inf, 3))),
    ),
    class_attribute=AttributeMeta(
        "iris_class",
        NOMINAL,
        ("IS", "IV", "IVG"),
        labels={"IS": "Iris-setosa", "IV": "Iris-versicolor", "IVG": "Iris-virginica"},
    ),
)

LJB_SCHEMA = DatasetSchema(
    name="ljb",
    attributes=(
        AttributeMeta("age", NUMERIC, (1, 2, 3, 4), ((39, 1), (49, 2), (59, 3), (math.inf, 4))),
        AttributeMeta("menopause", NOMINAL, (1, 2, 3),
                      labels={1: "lt40", 2: "ge40", 3: "premeno"}),
        AttributeMeta("tumor_size", NUMERIC, (1, 2, 3, 4, 5, 6),
                      ((9, 1), (19, 2), (29, 3), (39, 4), (49, 5), (math.inf, 6))),
        AttributeMeta("inv_nodes", NUMERIC, (1, 2, 3, 4, 5, 6, 7),
                      ((2, 1), (5, 2), (8, 3), (11, 4), (14, 5), (17, 6), (math.inf, 7))),
        AttributeMeta("node_caps", NOMINAL, (1, 0), labels={1: "yes", 0: "no"}),
        AttributeMeta("deg_malig", NOMINAL, (1, 2, 3)),
        AttributeMeta("breast", NOMINAL, (1, 0), labels={1: "left", 0: "right"}),
        AttributeMeta("breast_quad", NOMINAL, (1, 2, 3, 4, 5),
                      labels={1: "left_up", 2: "left_low", 3: "right_up",
                              4: "right_low", 5: "central"}),
        AttributeMeta("irradiat", NOMINAL, (1, 0), labels={1: "yes", 0: "no"}),
    ),
    class_attribute=AttributeMeta(
        "recurrence", NOMINAL, (1, 0),
        labels={1: "recurrence-events", 0: "no-recurrence-events"},
    ),
)

_WBC_COLS = ("clump_thickness", "cell_size_uniformity", "cell_shape_uniformity",
             "marginal_adhesion", "epithelial_cell_size", "bare_nuclei",
             "bland_chromatin", "normal_nucleoli", "mitoses")

WBC_SCHEMA = DatasetSchema(
    name="wbc",
    attributes=tuple(
        AttributeMeta(col, INT_RANGE, tuple(range(1, 11))) for col in _WBC_COLS
    ),
    class_attribute=AttributeMeta(
        "diagnosis", NOMINAL, (2, 4), labels={2: "benign", 4: "malignant"},
    ),
)

PRESET_SCHEMAS = {"iris": IRIS_SCHEMA, "ljb": LJB_SCHEMA, "wbc": WBC_SCHEMA}

# Population sizes the presets were tuned with.
PRESET_POPULATION = {"iris": 200, "ljb": 300, "wbc": 500}

_PRESET_CACHE: dict = {}


def preset_names() -> tuple:
    return tuple(PRESET_SCHEMAS)


def load_preset(name: str) -> Dataset:
    """Load one of the bundled datasets by name."""
    if name not in PRESET_SCHEMAS:
        raise DatasetError(f"unknown preset {name!r}; available: {', '.join(PRESET_SCHEMAS)}")
    if name not in _PRESET_CACHE:
        ref = resources.files("carm.data").joinpath(f"{name}.csv")
        with resources.as_file(ref) as path:
            _PRESET_CACHE[name] = load_csv(path, PRESET_SCHEMAS[name])
    return _PRESET_CACHE[name]


def resolve_dataset(spec: str) -> Dataset:
    """Accept a preset name or a CSV path whose header matches a preset schema."""
    if spec in PRESET_SCHEMAS:
        return load_preset(spec)
    try:
        with open(spec, newline="") as fh:
            header = tuple(h.strip() for h in next(csv.reader(fh), []))
    except OSError as exc:
        raise DatasetError(f"dataset {spec!r} is neither a preset nor a readable file: {exc}")
    for schema in PRESET_SCHEMAS.values():
        if header == schema.header:
            return load_csv(spec, schema)
    raise DatasetError(
        f"{spec}: header matches no known schema; expected one of "
        + "; ".join(str(s.header) for s in PRESET_SCHEMAS.values())
    )
