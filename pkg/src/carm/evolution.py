"""Run configuration and the generational mining loop.

Generation 0 evaluates the seeded population and feeds its nondominated
subset to the belief space; from generation 1 on, parents come exclusively
from knowledge-source queries according to each agent's trait:

    risk takers  draw each parent from a random source (HKS/RKS/SKS/TKS)
    imitators    pair a schema instantiation with a random stored rule
    cautious     take both parents from the latest dominator front

Each agent hands back only the nondominated slice of its own offspring; the
union of those slices is what the belief space accepts.  Offspring replace
the population wholesale each generation.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import dataset as ds
from .beliefs import BeliefSpace, NormativeKS, pareto_front
from .classify import RuleSet, accuracy, majority_class
from .rules import (
    Chromosome,
    MetricSpec,
    RuleSchema,
    TrainData,
    WILDCARD,
    evaluate,
)

RISK_TAKER = "risk_taker"
IMITATOR = "imitator"
CAUTIOUS = "cautious"

RISK_SOURCES = ("HKS", "RKS", "SKS", "TKS")

DEFAULT_METRICS = (
    MetricSpec("coverage"),
    MetricSpec("confidence"),
    MetricSpec("interest"),
    MetricSpec("surprise"),
)


class ConfigError(ValueError):
    """Invalid run configuration; carries (field, message) pairs."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{f}: {m}" for f, m in self.errors) or "invalid config")


@dataclass(frozen=True)
class AgentPool:
    risk_takers: int = 3
    imitators: int = 3
    cautious: int = 3

    @property
    def total(self) -> int:
        return self.risk_takers + self.imitators + self.cautious

    def traits(self) -> tuple:
        return (
            (RISK_TAKER,) * self.risk_takers
            + (IMITATOR,) * self.imitators
            + (CAUTIOUS,) * self.cautious
        )


@dataclass(frozen=True)
class RunConfig:
    dataset: str = "iris"
    population_size: Optional[int] = None  # preset default when None
    generations: int = 50
    crossover_rate: float = 0.8
    mutation_rate: float = 0.2
    metrics: tuple = DEFAULT_METRICS
    schema: Optional[RuleSchema] = None
    agents: AgentPool = AgentPool()
    rng_seed: int = 0
    train_fraction: float = 0.8
    match_threshold: float = 0.75
    strict_match_threshold: bool = False
    tks_count_matches: bool = False
    # Voting over every stored rule beats the bare dominator front by a wide
    # margin on held-out data, so it is the default; False restricts the
    # classifier to the final front.
    classify_with_all_rules: bool = True
    test_on_train: bool = False
    dks_capacity: Optional[int] = None  # 2 x population_size when None

    # -- validation -------------------------------------------------------

    def validate(self, data: Optional[ds.Dataset] = None) -> list:
        errors = []
        if not self.dataset or not isinstance(self.dataset, str):
            errors.append(("dataset", "dataset must be a preset name or CSV path"))
        if self.population_size is not None and self.population_size < 2:
            errors.append(("population_size", "population_size must be at least 2"))
        if self.generations < 1:
            errors.append(("generations", "generations must be at least 1"))
        if not (0.0 <= self.crossover_rate <= 1.0):
            errors.append(("crossover_rate", "crossover_rate must be in [0, 1]"))
        if not (0.0 <= self.mutation_rate <= 1.0):
            errors.append(("mutation_rate", "mutation_rate must be in [0, 1]"))
        if not self.metrics:
            errors.append(("metrics", "at least one metric is required"))
        if not (0.0 < self.train_fraction < 1.0):
            errors.append(("train_fraction", "train_fraction must be in (0, 1)"))
        if not (0.0 <= self.match_threshold <= 1.0):
            errors.append(("match_threshold", "match_threshold must be in [0, 1]"))
        pool = self.agents
        if min(pool.risk_takers, pool.imitators, pool.cautious) < 0:
            errors.append(("agents", "agent counts cannot be negative"))
        elif pool.total < 1:
            errors.append(("agents", "at least one agent is required"))
        if self.dks_capacity is not None and self.dks_capacity < 0:
            errors.append(("dks_capacity", "dks_capacity cannot be negative"))
        if not isinstance(self.rng_seed, int) or isinstance(self.rng_seed, bool):
            errors.append(("rng_seed", "rng_seed must be an integer"))
        if data is not None:
            if data.n_attributes < 2:
                errors.append(("dataset", "need at least 2 attributes for crossover"))
            if self.schema is not None and len(self.schema.pattern) != data.n_attributes:
                errors.append(
                    ("schema", f"schema pattern length {len(self.schema.pattern)} "
                              f"does not match {data.n_attributes} attributes")
                )
            elif self.schema is not None:
                for i, v in self.schema.concrete_slots():
                    if v not in data.attributes[i].values:
                        errors.append(
                            ("schema", f"slot {i} value {v!r} not admissible for "
                                      f"{data.attributes[i].name!r}")
                        )
                cc = self.schema.class_code
                if cc is not None and cc not in data.class_attribute.values:
                    errors.append(("schema", f"class code {cc!r} not admissible"))
        return errors

    def require_valid(self, data: Optional[ds.Dataset] = None):
        errors = self.validate(data)
        if errors:
            raise ConfigError(errors)

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "population_size": self.population_size,
            "generations": self.generations,
            "crossover_rate": self.crossover_rate,
            "mutation_rate": self.mutation_rate,
            "metrics": [{"name": m.name, "maximize": m.maximize} for m in self.metrics],
            "schema": None if self.schema is None else {
                "pattern": list(self.schema.pattern),
                "class_code": self.schema.class_code,
            },
            "agents": {
                "risk_takers": self.agents.risk_takers,
                "imitators": self.agents.imitators,
                "cautious": self.agents.cautious,
            },
            "rng_seed": self.rng_seed,
            "train_fraction": self.train_fraction,
            "match_threshold": self.match_threshold,
            "strict_match_threshold": self.strict_match_threshold,
            "tks_count_matches": self.tks_count_matches,
            "classify_with_all_rules": self.classify_with_all_rules,
            "test_on_train": self.test_on_train,
            "dks_capacity": self.dks_capacity,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError([("config", "configuration must be a JSON object")])
        errors = []
        known = set(cls().to_dict())
        for key in raw:
            if key not in known:
                errors.append((key, f"unknown configuration key {key!r}"))
        if errors:
            raise ConfigError(errors)

        def take(key, kind, default, allow_none=False):
            if key not in raw or raw[key] is None:
                if key in raw and not allow_none:
                    errors.append((key, f"{key} cannot be null"))
                return default
            val = raw[key]
            if kind is float and isinstance(val, int) and not isinstance(val, bool):
                val = float(val)
            if kind is not None and (not isinstance(val, kind) or isinstance(val, bool) != (kind is bool)):
                errors.append((key, f"{key} must be of type {kind.__name__}"))
                return default
            return val

        defaults = cls()
        metrics = defaults.metrics
        if "metrics" in raw:
            try:
                metrics = parse_metrics(raw["metrics"])
            except ValueError as exc:
                errors.append(("metrics", str(exc)))
        schema = defaults.schema
        if "schema" in raw and raw["schema"] is not None:
            try:
                schema = parse_schema(raw["schema"])
            except ValueError as exc:
                errors.append(("schema", str(exc)))
        agents = defaults.agents
        if "agents" in raw and raw["agents"] is not None:
            try:
                agents = parse_agents(raw["agents"])
            except ValueError as exc:
                errors.append(("agents", str(exc)))

        cfg = cls(
            dataset=take("dataset", str, defaults.dataset),
            population_size=take("population_size", int, None, allow_none=True),
            generations=take("generations", int, defaults.generations),
            crossover_rate=take("crossover_rate", float, defaults.crossover_rate),
            mutation_rate=take("mutation_rate", float, defaults.mutation_rate),
            metrics=metrics,
            schema=schema,
            agents=agents,
            rng_seed=take("rng_seed", int, defaults.rng_seed),
            train_fraction=take("train_fraction", float, defaults.train_fraction),
            match_threshold=take("match_threshold", float, defaults.match_threshold),
            strict_match_threshold=take("strict_match_threshold", bool, False),
            tks_count_matches=take("tks_count_matches", bool, False),
            classify_with_all_rules=take("classify_with_all_rules", bool,
                                         defaults.classify_with_all_rules),
            test_on_train=take("test_on_train", bool, False),
            dks_capacity=take("dks_capacity", int, None, allow_none=True),
        )
        if errors:
            raise ConfigError(errors)
        return cfg


def parse_metrics(raw) -> tuple:
    """Metric list from JSON: names, name:min/max strings, or objects."""
    if not isinstance(raw, (list, tuple)) or not raw:
        raise ValueError("metrics must be a non-empty list")
    out = []
    for entry in raw:
        if isinstance(entry, str):
            name, _, direction = entry.partition(":")
            if direction not in ("", "min", "max"):
                raise ValueError(f"bad metric direction in {entry!r}")
            out.append(MetricSpec(name.strip(), maximize=direction != "min"))
        elif isinstance(entry, dict):
            if "name" not in entry:
                raise ValueError("metric object needs a 'name'")
            out.append(MetricSpec(entry["name"], bool(entry.get("maximize", True))))
        else:
            raise ValueError(f"bad metric entry {entry!r}")
    return tuple(out)


def parse_schema(raw) -> RuleSchema:
    if not isinstance(raw, dict) or "pattern" not in raw:
        raise ValueError("schema must be an object with a 'pattern' list")
    pattern = raw["pattern"]
    if not isinstance(pattern, (list, tuple)) or not pattern:
        raise ValueError("schema pattern must be a non-empty list")
    # JSON null doubles as the wildcard spelling
    pattern = tuple(WILDCARD if v is None else v for v in pattern)
    return RuleSchema(pattern=pattern, class_code=raw.get("class_code"))


def parse_agents(raw) -> AgentPool:
    if isinstance(raw, (list, tuple)) and len(raw) == 3:
        r, i, c = raw
    elif isinstance(raw, dict):
        extra = set(raw) - {"risk_takers", "imitators", "cautious"}
        if extra:
            raise ValueError(f"unknown agent fields {sorted(extra)}")
        r = raw.get("risk_takers", 0)
        i = raw.get("imitators", 0)
        c = raw.get("cautious", 0)
    else:
        raise ValueError("agents must be an object or a 3-element list")
    for v in (r, i, c):
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise ValueError("agent counts must be non-negative integers")
    return AgentPool(r, i, c)


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------


def crossover(p1: Chromosome, p2: Chromosome, rng) -> Tuple[Chromosome, Chromosome]:
    """One-point crossover; the class code travels with the gene suffix."""
    n = len(p1.genes)
    if n < 2:
        raise ValueError("crossover needs at least 2 genes")
    k = rng.randint(1, n - 1)
    c1 = Chromosome(p1.genes[:k] + p2.genes[k:], p2.class_code)
    c2 = Chromosome(p2.genes[:k] + p1.genes[k:], p1.class_code)
    return c1, c2


def mutate(rule: Chromosome, beliefs: BeliefSpace, rng) -> Chromosome:
    """Resample one uniformly chosen position from its admissible codes."""
    n = len(rule.genes)
    pos = rng.randrange(n + 1)
    if pos == n:
        return Chromosome(rule.genes, beliefs.mutation_value(n, rule.class_code, rng))
    new = beliefs.mutation_value(pos, rule.genes[pos], rng)
    genes = rule.genes[:pos] + (new,) + rule.genes[pos + 1:]
    return Chromosome(genes, rule.class_code)


def select_parents(trait: str, beliefs: BeliefSpace, rng) -> Tuple[Chromosome, Chromosome]:
    if trait == RISK_TAKER:
        p1 = beliefs.query_parent(rng.choice(RISK_SOURCES), rng)
        p2 = beliefs.query_parent(rng.choice(RISK_SOURCES), rng)
    elif trait == IMITATOR:
        p1 = beliefs.query_parent("SKS", rng)
        p2 = beliefs.query_parent("RKS", rng)
    elif trait == CAUTIOUS:
        p1 = beliefs.query_parent("HKS", rng)
        p2 = beliefs.query_parent("HKS", rng)
    else:
        raise ValueError(f"unknown trait {trait!r}")
    return p1, p2


def seed_population(nks: NormativeKS, population_size: int, crossover_rate: float,
                    mutation_rate: float, rng, beliefs: BeliefSpace) -> list:
    """Grow a pool from the all-smallest and all-largest seed rules."""
    if population_size < 2:
        raise ValueError("population_size must be at least 2")
    pool = [nks.min_rule(), nks.max_rule()]
    while len(pool) < population_size:
        p1 = pool[rng.randrange(len(pool))]
        p2 = pool[rng.randrange(len(pool))]
        if rng.random() < crossover_rate:
            c1, c2 = crossover(p1, p2, rng)
        else:
            c1, c2 = p1, p2
        for child in (c1, c2):
            if rng.random() < mutation_rate:
                child = mutate(child, beliefs, rng)
            if len(pool) < population_size:
                pool.append(child)
    return pool


# ---------------------------------------------------------------------------
# Run loop
# ---------------------------------------------------------------------------


@dataclass
class GenerationRecord:
    index: int
    front: tuple          # rule ids on the dominator front after this generation
    new_rules: int
    rks_count: int
    offspring: int
    wall_ms: float


@dataclass
class RunResult:
    config: RunConfig
    dataset: ds.Dataset
    beliefs: BeliefSpace
    eval_mode: str
    n_train: int
    n_test: int
    generations: List[GenerationRecord]
    stopped_early: bool
    ruleset: RuleSet
    accuracy: float
    train_accuracy: float
    total_wall_ms: float

    @property
    def rks_count(self) -> int:
        return self.beliefs.rule_count

    @property
    def hks_count(self) -> int:
        """Distinct rules that ever appeared on a generation front."""
        return self.beliefs.distinct_history_rules()

    @property
    def final_front(self) -> tuple:
        return self.generations[-1].front if self.generations else ()


def _quota(population_size: int, n_agents: int) -> list:
    base, rem = divmod(population_size, n_agents)
    return [base + (1 if i < rem else 0) for i in range(n_agents)]


class _Engine:
    """Internal run state; kept on the result for inspection."""

    def __init__(self, config: RunConfig, data: ds.Dataset):
        self.config = config
        self.data = data
        self.metrics = config.metrics
        self.schema = config.schema
        self._cache: Dict[Chromosome, tuple] = {}

        if config.test_on_train:
            self.train_rows = data.instances
            self.test_rows = data.instances
            self.eval_mode = "train"
        else:
            sp = ds.split(data, config.train_fraction, config.rng_seed)
            self.train_rows = sp.train.instances
            self.test_rows = sp.test.instances
            self.eval_mode = "holdout"
        if not self.train_rows:
            raise ConfigError([("train_fraction", "empty training partition")])
        self.train = TrainData(self.train_rows)
        self.nks = NormativeKS.from_rows(self.train_rows, data)
        capacity = config.dks_capacity
        if capacity is None:
            capacity = 2 * config.population_size
        self.beliefs = BeliefSpace(
            self.nks, config.schema, capacity, config.tks_count_matches
        )
        seed = config.rng_seed
        self.seed_rng = random.Random(f"carm:{seed}:seed")
        self.agent_traits = config.agents.traits()
        self.agent_rngs = [
            random.Random(f"carm:{seed}:agent:{i}") for i in range(len(self.agent_traits))
        ]
        self.quotas = _quota(config.population_size, len(self.agent_traits))

    def evaluate(self, rule: Chromosome) -> tuple:
        vec = self._cache.get(rule)
        if vec is None:
            vec = evaluate(rule, self.train, self.metrics, self.schema)
            self._cache[rule] = vec
        return vec

    def local_front(self, offspring: Sequence[Chromosome]) -> dict:
        """Nondominated subset of a batch, deduplicated, insertion order kept."""
        local: Dict[Chromosome, tuple] = {}
        for ch in offspring:
            if ch not in local:
                local[ch] = self.evaluate(ch)
        order = list(local)
        keep = pareto_front({i: local[ch] for i, ch in enumerate(order)})
        return {order[i]: local[order[i]] for i in keep}

    def bootstrap(self, population: Sequence[Chromosome]):
        """Generation 0 submits the whole evaluated seed pool, unfiltered."""
        distinct: Dict[Chromosome, tuple] = {}
        for ch in population:
            if ch not in distinct:
                distinct[ch] = self.evaluate(ch)
        return self.beliefs.accept(list(distinct.items()))

    def step(self) -> Tuple[list, "AcceptanceReport"]:
        offspring_all: List[Chromosome] = []
        submissions: Dict[Chromosome, tuple] = {}
        cfg = self.config
        for trait, rng, quota in zip(self.agent_traits, self.agent_rngs, self.quotas):
            produced: List[Chromosome] = []
            while len(produced) < quota:
                p1, p2 = select_parents(trait, self.beliefs, rng)
                if rng.random() < cfg.crossover_rate:
                    c1, c2 = crossover(p1, p2, rng)
                else:
                    c1, c2 = p1, p2
                children = []
                for child in (c1, c2):
                    if rng.random() < cfg.mutation_rate:
                        child = mutate(child, self.beliefs, rng)
                    children.append(child)
                produced.extend(children[: quota - len(produced)])
            submissions.update(self.local_front(produced))
            offspring_all.extend(produced)
        report = self.beliefs.accept(list(submissions.items()))
        return offspring_all, report


def run(
    config: RunConfig,
    data: Optional[ds.Dataset] = None,
    on_generation: Optional[Callable[[GenerationRecord, BeliefSpace], None]] = None,
    should_stop: Optional[Callable[[], bool]] = None,
) -> RunResult:
    """Execute a full mining run; deterministic for a fixed configuration."""
    if data is None:
        try:
            data = ds.resolve_dataset(config.dataset)
        except ds.DatasetError as exc:
            raise ConfigError([("dataset", str(exc))]) from exc
    if config.population_size is None:
        config = replace(
            config,
            population_size=ds.PRESET_POPULATION.get(data.name, 200),
        )
    config.require_valid(data)

    t_start = time.perf_counter()
    engine = _Engine(config, data)
    population = seed_population(
        engine.nks, config.population_size, config.crossover_rate,
        config.mutation_rate, engine.seed_rng, engine.beliefs,
    )

    records: List[GenerationRecord] = []
    stopped = False
    for gen in range(config.generations):
        t0 = time.perf_counter()
        if gen == 0:
            report = engine.bootstrap(population)
            offspring = list(population)
        else:
            offspring, report = engine.step()
        population = offspring
        rec = GenerationRecord(
            index=gen,
            front=report.front,
            new_rules=report.new_rules,
            rks_count=engine.beliefs.rule_count,
            offspring=len(offspring),
            wall_ms=(time.perf_counter() - t0) * 1000.0,
        )
        records.append(rec)
        if on_generation is not None:
            on_generation(rec, engine.beliefs)
        if should_stop is not None and should_stop() and gen + 1 < config.generations:
            stopped = True
            break

    beliefs = engine.beliefs
    if config.classify_with_all_rules:
        rule_pool = tuple(beliefs.rule(rid) for rid in range(beliefs.rule_count))
    else:
        rule_pool = tuple(beliefs.rule(rid) for rid in records[-1].front)
    ruleset = RuleSet(
        rules=rule_pool,
        majority_class=majority_class(engine.train_rows, data.class_attribute.values),
        class_order=tuple(data.class_attribute.values),
    )
    acc = accuracy(
        engine.test_rows, ruleset, config.match_threshold, config.strict_match_threshold
    ) if engine.test_rows else 0.0
    train_acc = accuracy(
        engine.train_rows, ruleset, config.match_threshold, config.strict_match_threshold
    )

    return RunResult(
        config=config,
        dataset=data,
        beliefs=beliefs,
        eval_mode=engine.eval_mode,
        n_train=len(engine.train_rows),
        n_test=len(engine.test_rows) if engine.eval_mode == "holdout" else 0,
        generations=records,
        stopped_early=stopped,
        ruleset=ruleset,
        accuracy=acc,
        train_accuracy=train_acc,
        total_wall_ms=(time.perf_counter() - t_start) * 1000.0,
    )
