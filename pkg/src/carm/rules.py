"""Rule representation and the rule quality metrics.

A candidate rule is a chromosome: one gene per attribute plus a class code.
The antecedent is the conjunction of all gene equalities; matching for metric
computation is exact (partial matching exists only in the classifier).

All metrics reduce a rule to four integer counts over the training rows:
    n   rows total
    a   rows matching the antecedent
    c   rows of the rule's class
    ac  rows matching both
Division happens last, so equal counts give bit-equal metric values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .dataset import Dataset

Code = Union[int, str]

WILDCARD = "*"

METRIC_NAMES = ("coverage", "confidence", "interest", "surprise", "rule_difference")


@dataclass(frozen=True)
class Chromosome:
    genes: tuple
    class_code: Code

    def __str__(self):
        return "(" + ",".join(str(g) for g in self.genes) + "|" + str(self.class_code) + ")"


@dataclass(frozen=True)
class RuleSchema:
    """Partial rule of interest; wildcard slots are unconstrained."""

    pattern: tuple
    class_code: Optional[Code] = None

    def concrete_slots(self):
        return [(i, v) for i, v in enumerate(self.pattern) if v != WILDCARD]


@dataclass(frozen=True)
class MatchCounts:
    n: int
    a: int
    c: int
    ac: int


@dataclass(frozen=True)
class MetricSpec:
    """One objective: a metric name plus its optimization direction."""

    name: str
    maximize: bool = True

    def __post_init__(self):
        if self.name not in METRIC_NAMES:
            raise ValueError(f"unknown metric {self.name!r}; known: {METRIC_NAMES}")


class TrainData:
    """Training rows packed for fast exact matching.

    Each column's codes are mapped to dense integer ids; a rule is encoded
    through the same maps (-1 for codes absent from train, which then match
    no row).
    """

    def __init__(self, rows: Sequence[tuple]):
        rows = list(rows)
        if not rows:
            raise ValueError("no training rows")
        width = len(rows[0])
        self.n_attributes = width - 1
        self._maps = [dict() for _ in range(width)]
        mat = np.empty((len(rows), width), dtype=np.int32)
        for j in range(width):
            m = self._maps[j]
            col = mat[:, j]
            for i, row in enumerate(rows):
                code = row[j]
                if code not in m:
                    m[code] = len(m)
                col[i] = m[code]
        self._genes = mat[:, :-1]
        self._cls = mat[:, -1]
        self.n = len(rows)
        # per-class row counts, keyed by class id
        self._class_sizes = np.bincount(self._cls, minlength=max(len(self._maps[-1]), 1))

    def encode(self, rule: Chromosome) -> np.ndarray:
        enc = np.empty(self.n_attributes + 1, dtype=np.int32)
        for j, g in enumerate(rule.genes):
            enc[j] = self._maps[j].get(g, -1)
        enc[-1] = self._maps[-1].get(rule.class_code, -1)
        return enc

    def counts(self, rule: Chromosome) -> MatchCounts:
        enc = self.encode(rule)
        match = np.all(self._genes == enc[:-1], axis=1)
        a = int(match.sum())
        cls_id = enc[-1]
        if cls_id < 0:
            c = 0
            ac = 0
        else:
            c = int(self._class_sizes[cls_id])
            ac = int(np.count_nonzero(match & (self._cls == cls_id)))
        return MatchCounts(n=self.n, a=a, c=c, ac=ac)


def count_matches(rule: Chromosome, rows) -> MatchCounts:
    """Exact antecedent/class match counts over training rows."""
    train = rows if isinstance(rows, TrainData) else TrainData(rows)
    return train.counts(rule)


def coverage(m: MatchCounts) -> float:
    """Fraction of the rule's class that the antecedent captures."""
    return m.ac / m.c if m.c else 0.0


def confidence(m: MatchCounts) -> float:
    """Fraction of antecedent matches that carry the rule's class."""
    return m.ac / m.a if m.a else 0.0


def interest(m: MatchCounts) -> float:
    """Lift of the rule over independence; 1.0 means uninformative."""
    denom = m.a * m.c
    return (m.n * m.ac) / denom if denom else 0.0


def surprise(m: MatchCounts) -> float:
    """Correct-minus-wrong antecedent matches, scaled by the non-class mass."""
    denom = m.n - m.c
    return (m.ac - (m.a - m.ac)) / denom if denom else 0.0


def rule_difference(rule: Chromosome, schema: Optional[RuleSchema]) -> int:
    """How many concrete schema slots the rule's genes disagree with."""
    if schema is None:
        return 0
    return sum(1 for i, v in schema.concrete_slots() if rule.genes[i] != v)


def dissimilarity(r1: Chromosome, r2: Chromosome, count_matching: bool = False) -> int:
    """Positional distance between two rules, class slot included.

    Default is the Hamming distance (differing positions). count_matching
    flips it to count equal positions instead, for compatibility with setups
    that scored sameness.
    """
    v1 = tuple(r1.genes) + (r1.class_code,)
    v2 = tuple(r2.genes) + (r2.class_code,)
    if len(v1) != len(v2):
        raise ValueError("rules have different layouts")
    same = sum(1 for x, y in zip(v1, v2) if x == y)
    return same if count_matching else len(v1) - same


_COUNT_METRICS = {
    "coverage": coverage,
    "confidence": confidence,
    "interest": interest,
    "surprise": surprise,
}


def evaluate(
    rule: Chromosome,
    train,
    metrics: Sequence[MetricSpec],
    schema: Optional[RuleSchema] = None,
):
    """Metric vector for a rule, in maximized orientation.

    Counts are computed once; metrics the user wants minimized are negated
    so that vector comparison is always "bigger is better".
    """
    m = None
    out = []
    for spec in metrics:
        if spec.name == "rule_difference":
            val = float(rule_difference(rule, schema))
        else:
            if m is None:
                m = count_matches(rule, train)
            val = float(_COUNT_METRICS[spec.name](m))
        out.append(val if spec.maximize else -val)
    return tuple(out)


def validate_chromosome(rule: Chromosome, dataset: Dataset):
    """Raise ValueError if a gene or the class lies outside the declared domains."""
    if len(rule.genes) != dataset.n_attributes:
        raise ValueError(
            f"rule has {len(rule.genes)} genes, dataset has {dataset.n_attributes} attributes"
        )
    for g, meta in zip(rule.genes, dataset.attributes):
        if g not in meta.values:
            raise ValueError(f"gene {g!r} not admissible for {meta.name!r}")
    if rule.class_code not in dataset.class_attribute.values:
        raise ValueError(f"class {rule.class_code!r} not admissible")
