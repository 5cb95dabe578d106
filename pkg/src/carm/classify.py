"""Test-phase classification by partial rule matching.

A rule covers an instance when at least the threshold fraction of its genes
match the instance (default 0.75, met inclusively).  Covered instances take
the modal class of their covering rules; uncovered ones fall back to the
majority class of the training data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .rules import Chromosome

DEFAULT_THRESHOLD = 0.75


@dataclass(frozen=True)
class RuleSet:
    rules: tuple
    majority_class: object
    class_order: tuple = ()

    def _order_key(self, code):
        if code in self.class_order:
            return (0, self.class_order.index(code))
        return (1, str(code))


def match_fraction(rule: Chromosome, genes: Sequence) -> float:
    if len(rule.genes) != len(genes):
        raise ValueError("instance layout does not match rule layout")
    same = sum(1 for a, b in zip(rule.genes, genes) if a == b)
    return same / len(genes)


def majority_class(rows: Sequence[tuple], class_order: Sequence = ()):
    """Most frequent class code; ties resolve to the earliest declared code."""
    if not rows:
        raise ValueError("no rows")
    counts: dict = {}
    for row in rows:
        counts[row[-1]] = counts.get(row[-1], 0) + 1

    def key(code):
        pos = class_order.index(code) if code in class_order else len(class_order)
        return (-counts[code], pos, str(code))

    return min(counts, key=key)


def classify(
    genes: Sequence,
    ruleset: RuleSet,
    threshold: float = DEFAULT_THRESHOLD,
    strict: bool = False,
):
    """Predicted class code for one instance's gene vector."""
    if not (0.0 <= threshold <= 1.0):
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    votes: dict = {}
    weight: dict = {}
    for rule in ruleset.rules:
        frac = match_fraction(rule, genes)
        covered = frac > threshold if strict else frac >= threshold
        if not covered:
            continue
        votes[rule.class_code] = votes.get(rule.class_code, 0) + 1
        weight[rule.class_code] = weight.get(rule.class_code, 0.0) + frac
    if not votes:
        return ruleset.majority_class
    best = max(votes.values())
    tied = [c for c, n in votes.items() if n == best]
    if len(tied) == 1:
        return tied[0]
    top = max(weight[c] for c in tied)
    tied = [c for c in tied if weight[c] == top]
    return min(tied, key=ruleset._order_key)


def accuracy(
    rows: Sequence[tuple],
    ruleset: RuleSet,
    threshold: float = DEFAULT_THRESHOLD,
    strict: bool = False,
) -> float:
    """Fraction of rows whose predicted class equals the recorded one."""
    if not rows:
        raise ValueError("cannot score an empty test set")
    hits = sum(1 for row in rows if classify(row[:-1], ruleset, threshold, strict) == row[-1])
    return hits / len(rows)
