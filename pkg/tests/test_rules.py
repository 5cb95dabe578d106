"""Metric correctness against a naive set-enumeration oracle."""
import random

import pytest

from conftest import make_dataset, rule

from carm.rules import (
    Chromosome,
    MatchCounts,
    MetricSpec,
    RuleSchema,
    TrainData,
    WILDCARD,
    confidence,
    count_matches,
    coverage,
    dissimilarity,
    evaluate,
    interest,
    rule_difference,
    surprise,
    validate_chromosome,
)


# -- oracle: counts by explicit set enumeration, metrics by direct formula --

def oracle_counts(rows, genes, class_code):
    n = len(rows)
    ante = {i for i, r in enumerate(rows) if tuple(r[:-1]) == tuple(genes)}
    cls = {i for i, r in enumerate(rows) if r[-1] == class_code}
    return n, len(ante), len(cls), len(ante & cls)


def oracle_metrics(n, a, c, ac):
    cov = ac / c if c else 0.0
    conf = ac / a if a else 0.0
    inte = (n * ac) / (a * c) if a * c else 0.0
    sur = (ac - (a - ac)) / (n - c) if n - c else 0.0
    return cov, conf, inte, sur


def random_case(rng, max_rows=50):
    width = rng.randint(1, 5)
    n_rows = rng.randint(1, max_rows)
    domains = [rng.randint(1, 4) for _ in range(width)]
    n_classes = rng.randint(1, 3)
    rows = [
        tuple(rng.randint(1, domains[j]) for j in range(width)) + (rng.randint(0, n_classes - 1),)
        for _ in range(n_rows)
    ]
    # sometimes aim the rule at an existing row so matches actually happen
    if rng.random() < 0.5:
        target = rng.choice(rows)
        genes, cls = target[:-1], target[-1]
    else:
        genes = tuple(rng.randint(1, domains[j] + 1) for j in range(width))
        cls = rng.randint(0, n_classes)
    return rows, Chromosome(genes, cls)


def test_counts_match_oracle_randomized():
    rng = random.Random(4242)
    for _ in range(300):
        rows, r = random_case(rng)
        m = count_matches(r, rows)
        n, a, c, ac = oracle_counts(rows, r.genes, r.class_code)
        assert (m.n, m.a, m.c, m.ac) == (n, a, c, ac)
        cov, conf, inte, sur = oracle_metrics(n, a, c, ac)
        assert coverage(m) == cov
        assert confidence(m) == conf
        assert interest(m) == inte
        assert surprise(m) == sur


def test_counts_hand_checked(toy_rows):
    r = rule(1, 1, cls="x")
    m = count_matches(r, toy_rows)
    # rows matching (1,1): indices 0,1; class "x": indices 0,1,2,7
    assert (m.n, m.a, m.c, m.ac) == (8, 2, 4, 2)
    assert coverage(m) == 0.5
    assert confidence(m) == 1.0
    assert interest(m) == 8 * 2 / (2 * 4)
    assert surprise(m) == (2 - 0) / (8 - 4)


def test_zero_denominator_guards():
    # class absent: c == 0
    m = MatchCounts(n=5, a=2, c=0, ac=0)
    assert coverage(m) == 0.0
    assert interest(m) == 0.0
    # antecedent never fires: a == 0
    m = MatchCounts(n=5, a=0, c=3, ac=0)
    assert confidence(m) == 0.0
    assert interest(m) == 0.0
    # whole dataset is the class: n == c
    m = MatchCounts(n=5, a=2, c=5, ac=2)
    assert surprise(m) == 0.0


def test_division_last_gives_bit_equal_values():
    # same counts from different data must give bit-identical metrics
    rows1 = [(1, "x"), (1, "x"), (2, "y"), (3, "y"), (3, "y"), (2, "x")]
    rows2 = [(9, "p"), (9, "p"), (8, "q"), (7, "q"), (7, "q"), (8, "p")]
    m1 = count_matches(rule(1, cls="x"), rows1)
    m2 = count_matches(rule(9, cls="p"), rows2)
    assert (m1.a, m1.c, m1.ac) == (m2.a, m2.c, m2.ac)
    for f in (coverage, confidence, interest, surprise):
        assert f(m1) == f(m2)


def test_count_matches_accepts_packed_train(toy_rows):
    train = TrainData(toy_rows)
    r = rule(2, 2, cls="y")
    assert count_matches(r, train) == count_matches(r, toy_rows)


def test_unknown_codes_match_nothing(toy_rows):
    m = count_matches(rule(9, 9, cls="x"), toy_rows)
    assert (m.a, m.ac) == (0, 0)
    m = count_matches(rule(1, 1, cls="no-such-class"), toy_rows)
    assert (m.c, m.ac) == (0, 0)


def test_train_data_rejects_empty():
    with pytest.raises(ValueError):
        TrainData([])


# -- rule_difference and dissimilarity --------------------------------------

def test_rule_difference_counts_concrete_disagreements():
    schema = RuleSchema((1, WILDCARD, 3), class_code="x")
    assert rule_difference(rule(1, 9, 3, cls="y"), schema) == 0  # class excluded
    assert rule_difference(rule(2, 9, 3, cls="x"), schema) == 1
    assert rule_difference(rule(2, 9, 4, cls="x"), schema) == 2
    assert rule_difference(rule(1, 1, 3, cls="x"), None) == 0


def test_dissimilarity_is_hamming_with_class():
    a = rule(1, 2, 3, cls="x")
    b = rule(1, 9, 3, cls="y")
    assert dissimilarity(a, b) == 2
    assert dissimilarity(a, a) == 0
    assert dissimilarity(a, b, count_matching=True) == 2  # 4 slots - 2 differing
    with pytest.raises(ValueError):
        dissimilarity(a, rule(1, 2, cls="x"))


# -- evaluate ----------------------------------------------------------------

def test_evaluate_orientation_and_schema(toy_rows):
    schema = RuleSchema((1, 1), class_code="x")
    metrics = (
        MetricSpec("coverage"),
        MetricSpec("rule_difference", maximize=False),
    )
    vec = evaluate(rule(1, 2, cls="x"), toy_rows, metrics, schema)
    # coverage: rows (1,2): idx 2,6; class x: 0,1,2,7 -> ac=1, c=4
    assert vec[0] == 0.25
    # one slot differs, minimized, so stored negated
    assert vec[1] == -1.0


def test_evaluate_all_four_match_oracle(toy_rows):
    metrics = tuple(MetricSpec(n) for n in ("coverage", "confidence", "interest", "surprise"))
    r = rule(2, 2, cls="y")
    vec = evaluate(r, toy_rows, metrics)
    n, a, c, ac = oracle_counts(toy_rows, r.genes, r.class_code)
    assert vec == oracle_metrics(n, a, c, ac)


def test_metric_spec_rejects_unknown_name():
    with pytest.raises(ValueError):
        MetricSpec("lift")


def test_validate_chromosome():
    data = make_dataset([(1, 2, "x"), (2, 1, "y")])
    validate_chromosome(rule(1, 1, cls="x"), data)
    with pytest.raises(ValueError):
        validate_chromosome(rule(1, cls="x"), data)  # wrong width
    with pytest.raises(ValueError):
        validate_chromosome(rule(9, 1, cls="x"), data)  # bad gene
    with pytest.raises(ValueError):
        validate_chromosome(rule(1, 1, cls="z"), data)  # bad class


def test_chromosome_str():
    assert str(rule(1, 2, 1, cls="IS")) == "(1,2,1|IS)"
