"""Operators, configuration parsing and the run loop."""
import random
from dataclasses import replace

import pytest

from conftest import make_dataset

from carm.beliefs import BeliefSpace, NormativeKS
from carm.evolution import (
    AgentPool,
    ConfigError,
    RunConfig,
    _quota,
    crossover,
    mutate,
    parse_agents,
    parse_metrics,
    parse_schema,
    run,
    seed_population,
    select_parents,
)
from carm.render import run_document
from carm.rules import Chromosome, MetricSpec, RuleSchema, WILDCARD


def space():
    nks = NormativeKS(((1, 2, 3), (1, 2, 3), (1, 2, 3), ("x", "y")))
    return BeliefSpace(nks, None, 10)


# -- operators --------------------------------------------------------------

def test_crossover_cuts_once_and_moves_class_with_suffix():
    rng = random.Random(0)
    p1 = Chromosome((1, 1, 1), "x")
    p2 = Chromosome((2, 2, 2), "y")
    for _ in range(30):
        c1, c2 = crossover(p1, p2, rng)
        k = next(i for i, g in enumerate(c1.genes) if g == 2)
        assert 1 <= k <= 2
        assert c1.genes == (1,) * k + (2,) * (3 - k)
        assert c2.genes == (2,) * k + (1,) * (3 - k)
        assert c1.class_code == "y" and c2.class_code == "x"


def test_crossover_needs_two_genes():
    rng = random.Random(0)
    with pytest.raises(ValueError):
        crossover(Chromosome((1,), "x"), Chromosome((2,), "y"), rng)


def test_mutate_changes_exactly_one_position():
    rng = random.Random(1)
    bs = space()
    base = Chromosome((1, 2, 3), "x")
    saw_class_change = False
    for _ in range(100):
        m = mutate(base, bs, rng)
        diffs = sum(1 for a, b in zip(m.genes, base.genes) if a != b)
        cls_diff = m.class_code != base.class_code
        assert diffs + cls_diff == 1
        saw_class_change = saw_class_change or cls_diff
        for i, g in enumerate(m.genes):
            assert g in bs.normative.values_at(i)
        assert m.class_code in ("x", "y")
    assert saw_class_change


def test_quota_splits_population():
    assert _quota(9, 3) == [3, 3, 3]
    assert _quota(10, 3) == [4, 3, 3]
    assert sum(_quota(17, 5)) == 17


def test_seed_population_contains_extremes_and_is_deterministic():
    bs = space()
    nks = bs.normative
    pop1 = seed_population(nks, 20, 0.8, 0.2, random.Random(5), bs)
    pop2 = seed_population(nks, 20, 0.8, 0.2, random.Random(5), bs)
    assert pop1 == pop2
    assert len(pop1) == 20
    assert pop1[0] == nks.min_rule() == Chromosome((1, 1, 1), "x")
    assert pop1[1] == nks.max_rule() == Chromosome((3, 3, 3), "y")
    for ch in pop1:
        for i, g in enumerate(ch.genes):
            assert g in nks.values_at(i)
    with pytest.raises(ValueError):
        seed_population(nks, 1, 0.8, 0.2, random.Random(0), bs)


def test_select_parents_per_trait():
    rng = random.Random(2)
    bs = space()
    bs.accept([(Chromosome((1, 1, 1), "x"), (1.0, 1.0))])
    for trait in ("risk_taker", "imitator", "cautious"):
        p1, p2 = select_parents(trait, bs, rng)
        assert isinstance(p1, Chromosome) and isinstance(p2, Chromosome)
    with pytest.raises(ValueError):
        select_parents("bold", bs, rng)


# -- config parsing ---------------------------------------------------------

def test_parse_metrics_forms():
    specs = parse_metrics(["coverage", "rule_difference:min", "interest:max",
                           {"name": "surprise", "maximize": False}])
    assert [(m.name, m.maximize) for m in specs] == [
        ("coverage", True), ("rule_difference", False),
        ("interest", True), ("surprise", False),
    ]
    for bad in ([], "coverage", ["coverage:down"], [42], [{"maximize": True}]):
        with pytest.raises(ValueError):
            parse_metrics(bad)


def test_parse_schema_forms():
    s = parse_schema({"pattern": [1, None, 3], "class_code": "x"})
    assert s.pattern == (1, WILDCARD, 3)
    assert s.class_code == "x"
    s = parse_schema({"pattern": ["*", 2]})
    assert s.pattern == (WILDCARD, 2) and s.class_code is None
    for bad in ({}, {"pattern": []}, {"pattern": "12"}, [1, 2]):
        with pytest.raises(ValueError):
            parse_schema(bad)


def test_parse_agents_forms():
    assert parse_agents([1, 2, 3]) == AgentPool(1, 2, 3)
    assert parse_agents({"risk_takers": 2}) == AgentPool(2, 0, 0)
    for bad in ([1, 2], {"bold": 1}, {"risk_takers": -1}, {"risk_takers": True}, 7):
        with pytest.raises(ValueError):
            parse_agents(bad)


def test_runconfig_round_trip():
    cfg = RunConfig(
        dataset="ljb",
        population_size=50,
        generations=7,
        metrics=(MetricSpec("coverage"), MetricSpec("rule_difference", False)),
        schema=RuleSchema((1, WILDCARD), class_code=1),
        agents=AgentPool(1, 2, 3),
        rng_seed=9,
    )
    assert RunConfig.from_dict(cfg.to_dict()) == cfg


def test_runconfig_rejects_unknown_keys():
    with pytest.raises(ConfigError) as err:
        RunConfig.from_dict({"dataset": "iris", "max_rules": 5})
    assert [f for f, _ in err.value.errors] == ["max_rules"]


def test_runconfig_rejects_wrong_types():
    with pytest.raises(ConfigError) as err:
        RunConfig.from_dict({
            "generations": "ten",
            "crossover_rate": "high",
            "rng_seed": 1.5,
            "strict_match_threshold": 3,
        })
    fields = {f for f, _ in err.value.errors}
    assert fields == {"generations", "crossover_rate", "rng_seed",
                      "strict_match_threshold"}


def test_runconfig_null_handling():
    cfg = RunConfig.from_dict({"population_size": None, "dks_capacity": None})
    assert cfg.population_size is None and cfg.dks_capacity is None
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"generations": None})


def test_runconfig_validate_flags_each_invariant():
    cfg = RunConfig(
        dataset="",
        population_size=1,
        generations=0,
        crossover_rate=1.5,
        mutation_rate=-0.1,
        metrics=(),
        agents=AgentPool(0, 0, 0),
        train_fraction=1.0,
        match_threshold=2.0,
        rng_seed="zero",
        dks_capacity=-1,
    )
    fields = {f for f, _ in cfg.validate()}
    assert fields == {
        "dataset", "population_size", "generations", "crossover_rate",
        "mutation_rate", "metrics", "agents", "train_fraction",
        "match_threshold", "rng_seed", "dks_capacity",
    }


def test_runconfig_validate_schema_against_data():
    data = make_dataset([(1, 2, "x"), (2, 1, "y")])
    bad_width = RunConfig(schema=RuleSchema((1,)))
    assert any(f == "schema" for f, _ in bad_width.validate(data))
    bad_value = RunConfig(schema=RuleSchema((9, WILDCARD)))
    assert any(f == "schema" for f, _ in bad_value.validate(data))
    bad_class = RunConfig(schema=RuleSchema((1, WILDCARD), class_code="z"))
    assert any(f == "schema" for f, _ in bad_class.validate(data))
    ok = RunConfig(schema=RuleSchema((1, WILDCARD), class_code="x"))
    assert not any(f == "schema" for f, _ in ok.validate(data))


# -- run loop ---------------------------------------------------------------

def short_config(**kw):
    base = dict(dataset="iris", population_size=30, generations=4, rng_seed=3)
    base.update(kw)
    return RunConfig(**base)


def test_run_is_deterministic(iris_data):
    a = run(short_config(), data=iris_data)
    b = run(short_config(), data=iris_data)
    assert run_document(a) == run_document(b)


def test_run_basic_outcome(iris_data):
    res = run(short_config(), data=iris_data)
    assert len(res.generations) == 4
    assert res.n_train == 120 and res.n_test == 30
    assert res.eval_mode == "holdout"
    assert res.rks_count == res.beliefs.rule_count > 0
    assert res.final_front == res.generations[-1].front
    assert 0.0 <= res.accuracy <= 1.0
    assert 0.0 <= res.train_accuracy <= 1.0
    # the rule store only ever grows
    rks = [g.rks_count for g in res.generations]
    assert rks == sorted(rks)
    assert res.hks_count == len({rid for g in res.generations for rid in g.front})


def test_run_on_generation_and_stop(iris_data):
    seen = []

    def observe(rec, beliefs):
        seen.append(rec.index)
        assert set(rec.front) <= set(range(beliefs.rule_count))

    res = run(short_config(generations=50), data=iris_data,
              on_generation=observe, should_stop=lambda: len(seen) >= 6)
    assert res.stopped_early
    assert seen == list(range(6))
    assert len(res.generations) == 6


def test_run_stop_after_last_generation_is_not_early(iris_data):
    res = run(short_config(generations=3), data=iris_data,
              should_stop=lambda: False)
    assert not res.stopped_early
    res = run(short_config(generations=3), data=iris_data,
              should_stop=lambda: True)
    # asking to stop at the final boundary changes nothing
    assert res.stopped_early and len(res.generations) == 1


def test_run_applies_preset_population(iris_data):
    res = run(short_config(population_size=None, generations=1), data=iris_data)
    assert res.config.population_size == 200


def test_run_test_on_train_mode(iris_data):
    res = run(short_config(test_on_train=True), data=iris_data)
    assert res.eval_mode == "train"
    assert res.n_train == 150
    assert res.n_test == 0


def test_run_front_restricted_classifier(iris_data):
    res = run(short_config(classify_with_all_rules=False), data=iris_data)
    assert len(res.ruleset.rules) == len(res.final_front)
    full = run(short_config(), data=iris_data)
    assert len(full.ruleset.rules) == full.rks_count


def test_run_rejects_unknown_dataset():
    with pytest.raises(ConfigError) as err:
        run(short_config(dataset="no-such-thing"))
    assert err.value.errors[0][0] == "dataset"


def test_run_rejects_invalid_config(iris_data):
    with pytest.raises(ConfigError):
        run(short_config(generations=0), data=iris_data)


def test_run_respects_dks_capacity(iris_data):
    res = run(short_config(dks_capacity=5), data=iris_data)
    entries = res.beliefs.domain_entries()
    front = set(res.beliefs.current_front())
    assert len([r for r in entries if r not in front]) <= 5


def test_run_agent_mix_changes_outcome(iris_data):
    lone_risk = run(short_config(agents=AgentPool(3, 0, 0)), data=iris_data)
    lone_caut = run(short_config(agents=AgentPool(0, 0, 3)), data=iris_data)
    assert run_document(lone_risk) != run_document(lone_caut)
