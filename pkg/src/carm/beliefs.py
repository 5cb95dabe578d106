"""Belief space: six knowledge sources steering the population.

    NKS  admissible codes per position, collected from the training rows
    SKS  the user's schema plus the best exemplar found so far
    DKS  metric vectors of retained rules (front plus recent dominated)
    TKS  distances between front rules of the last two acceptances
    HKS  per-generation record of the dominator front
    RKS  every rule ever accepted, interned once

accept() is the only mutator and performs one generation's bookkeeping in a
fixed order so that runs are reproducible.  The front over DKS is maintained
incrementally; because vectors never change within a run this is exact, and
a full rescan happens on the rare overwrite that does change a vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .dataset import Dataset
from .rules import Chromosome, RuleSchema, WILDCARD, dissimilarity

RuleId = int

PARENT_SOURCES = ("HKS", "RKS", "SKS", "TKS")


class EmptyBeliefSpaceError(RuntimeError):
    """No rule has been accepted yet; the caller must seed the population."""


def dominates(u: Sequence[float], v: Sequence[float]) -> bool:
    """Componentwise not-worse and strictly better somewhere (maximizing)."""
    if len(u) != len(v):
        raise ValueError(f"vector lengths differ: {len(u)} vs {len(v)}")
    better = False
    for x, y in zip(u, v):
        if x < y:
            return False
        if x > y:
            better = True
    return better


def pareto_front(vectors: Mapping[RuleId, tuple]) -> List[RuleId]:
    """Ids whose vectors no other entry dominates; identical vectors all stay."""
    front: List[Tuple[RuleId, tuple]] = []
    for rid in sorted(vectors):
        vec = vectors[rid]
        if any(dominates(fv, vec) for _, fv in front):
            continue
        front = [(fid, fv) for fid, fv in front if not dominates(vec, fv)]
        front.append((rid, vec))
    return sorted(fid for fid, _ in front)


@dataclass(frozen=True)
class NormativeKS:
    """Ordered admissible codes for each gene position and the class slot."""

    positions: tuple  # tuple of code tuples; index n_attributes is the class

    @property
    def n_attributes(self) -> int:
        return len(self.positions) - 1

    def values_at(self, position: int) -> tuple:
        return self.positions[position]

    def min_rule(self) -> Chromosome:
        return Chromosome(tuple(p[0] for p in self.positions[:-1]), self.positions[-1][0])

    def max_rule(self) -> Chromosome:
        return Chromosome(tuple(p[-1] for p in self.positions[:-1]), self.positions[-1][-1])

    @classmethod
    def from_rows(cls, rows: Sequence[tuple], dataset: Dataset) -> "NormativeKS":
        if not rows:
            raise ValueError("cannot build normative knowledge from zero rows")
        metas = list(dataset.attributes) + [dataset.class_attribute]
        positions = []
        for j, meta in enumerate(metas):
            seen = {row[j] for row in rows}
            ordered = tuple(v for v in meta.values if v in seen)
            if not ordered:
                raise ValueError(f"no admissible values for {meta.name!r} in training rows")
            positions.append(ordered)
        return cls(tuple(positions))


@dataclass
class AcceptanceReport:
    generation: int
    new_rules: int
    front: tuple  # sorted RuleIds


class BeliefSpace:
    def __init__(
        self,
        normative: NormativeKS,
        schema: Optional[RuleSchema],
        capacity: int,
        tks_count_matches: bool = False,
    ):
        if capacity < 0:
            raise ValueError("capacity must be >= 0")
        self.normative = normative
        self.schema = schema
        self.capacity = capacity
        self.tks_count_matches = tks_count_matches
        self._rules: List[Chromosome] = []          # RKS, id -> rule
        self._index: Dict[Chromosome, RuleId] = {}  # RKS, rule -> id
        self._vectors: Dict[RuleId, tuple] = {}     # DKS
        self._front: Dict[RuleId, tuple] = {}
        self._dominated_stamp: Dict[RuleId, int] = {}
        self._tick = 0
        self.history: List[tuple] = []              # HKS, per generation
        self.tks_pairs: List[Tuple[RuleId, RuleId, int]] = []
        self.best_exemplar: Optional[RuleId] = None

    # -- read access ------------------------------------------------------

    @property
    def rule_count(self) -> int:
        return len(self._rules)

    def rule(self, rid: RuleId) -> Chromosome:
        return self._rules[rid]

    def rule_id(self, rule: Chromosome) -> Optional[RuleId]:
        return self._index.get(rule)

    def vector(self, rid: RuleId) -> Optional[tuple]:
        return self._vectors.get(rid)

    def domain_entries(self) -> Dict[RuleId, tuple]:
        return dict(self._vectors)

    def current_front(self) -> tuple:
        return tuple(sorted(self._front))

    def distinct_history_rules(self) -> int:
        seen = set()
        for front in self.history:
            seen.update(front)
        return len(seen)

    # -- acceptance -------------------------------------------------------

    def intern(self, rule: Chromosome) -> RuleId:
        rid = self._index.get(rule)
        if rid is None:
            rid = len(self._rules)
            self._rules.append(rule)
            self._index[rule] = rid
        return rid

    def accept(self, submissions: Sequence[Tuple[Chromosome, tuple]]) -> AcceptanceReport:
        """Fold one generation's best offspring into every knowledge source."""
        new_rules = 0
        vector_changed = False
        touched: List[RuleId] = []
        for rule, vec in submissions:
            vec = tuple(vec)
            before = len(self._rules)
            rid = self.intern(rule)
            new_rules += len(self._rules) - before
            old = self._vectors.get(rid)
            if old is not None and old != vec:
                vector_changed = True
            self._vectors[rid] = vec
            self._tick += 1
            touched.append(rid)

        if vector_changed:
            self._front = {rid: self._vectors[rid] for rid in pareto_front(self._vectors)}
        else:
            for rid in touched:
                self._insert_front(rid)

        # newly dominated entries get a recency stamp, front members lose it
        for rid in sorted(self._vectors):
            if rid in self._front:
                self._dominated_stamp.pop(rid, None)
            elif rid not in self._dominated_stamp:
                self._tick += 1
                self._dominated_stamp[rid] = self._tick

        self._prune()

        front = tuple(sorted(self._front))
        previous = self.history[-1] if self.history else ()
        self.history.append(front)
        self._refresh_tks(front, previous)
        self._update_exemplar(front)
        return AcceptanceReport(
            generation=len(self.history) - 1, new_rules=new_rules, front=front
        )

    def _insert_front(self, rid: RuleId):
        vec = self._vectors[rid]
        if rid in self._front:
            return
        for fv in self._front.values():
            if dominates(fv, vec):
                return
        for fid in [f for f, fv in self._front.items() if dominates(vec, fv)]:
            del self._front[fid]
        self._front[rid] = vec

    def _prune(self):
        dominated = [rid for rid in self._vectors if rid not in self._front]
        excess = len(dominated) - self.capacity
        if excess <= 0:
            return
        dominated.sort(key=lambda rid: self._dominated_stamp[rid])
        for rid in dominated[:excess]:
            del self._vectors[rid]
            del self._dominated_stamp[rid]

    def _refresh_tks(self, front: tuple, previous: tuple):
        pairs = set()
        for i, a in enumerate(front):
            for b in front[i + 1:]:
                pairs.add((min(a, b), max(a, b)))
        for a in front:
            for b in previous:
                if a != b:
                    pairs.add((min(a, b), max(a, b)))
        self.tks_pairs = [
            (a, b, dissimilarity(self._rules[a], self._rules[b], self.tks_count_matches))
            for a, b in sorted(pairs)
        ]

    def _update_exemplar(self, front: tuple):
        best = None
        best_val = None
        for rid in front:
            val = self._vectors[rid][0]
            if best_val is None or val > best_val or (val == best_val and rid < best):
                best, best_val = rid, val
        if best is not None:
            self.best_exemplar = best

    # -- queries ----------------------------------------------------------

    def query_parent(self, source: str, rng) -> Chromosome:
        """Draw one parent from the named knowledge source.

        An exhausted source falls back to the rule store; an empty rule
        store means nothing was accepted yet and the caller has to seed.
        """
        if source not in PARENT_SOURCES:
            raise ValueError(f"cannot draw a parent from {source!r}")
        if source == "SKS":
            return self.instantiate_schema(rng)
        if source == "HKS":
            if self.history and self.history[-1]:
                return self._rules[rng.choice(self.history[-1])]
            source = "RKS"
        if source == "TKS":
            pair = self._most_distant_pair()
            if pair is not None:
                return self._rules[pair[0] if rng.random() < 0.5 else pair[1]]
            source = "RKS"
        if not self._rules:
            raise EmptyBeliefSpaceError("rule store is empty")
        return self._rules[rng.randrange(len(self._rules))]

    def _most_distant_pair(self):
        best = None
        for a, b, d in self.tks_pairs:
            if best is None or d > best[2]:
                best = (a, b, d)
        return best

    def instantiate_schema(self, rng) -> Chromosome:
        """Schema with wildcards filled by admissible codes drawn at random."""
        n = self.normative.n_attributes
        pattern = self.schema.pattern if self.schema is not None else (WILDCARD,) * n
        genes = tuple(
            v if v != WILDCARD else rng.choice(self.normative.values_at(i))
            for i, v in enumerate(pattern)
        )
        class_code = self.schema.class_code if self.schema is not None else None
        if class_code is None:
            class_code = rng.choice(self.normative.values_at(n))
        return Chromosome(genes, class_code)

    def mutation_value(self, position: int, current, rng):
        """Admissible replacement code; unchanged when the domain is a singleton."""
        domain = self.normative.values_at(position)
        if len(domain) < 2:
            return current
        value = rng.choice(domain)
        while value == current:
            value = rng.choice(domain)
        return value

    # -- serialization ----------------------------------------------------

    def snapshot(self) -> dict:
        """Whole belief space as one JSON-ready document."""

        def code(c):
            return c  # int and str both serialize as-is

        return {
            "normative": [list(p) for p in self.normative.positions],
            "schema": None if self.schema is None else {
                "pattern": list(self.schema.pattern),
                "class_code": self.schema.class_code,
            },
            "capacity": self.capacity,
            "tks_count_matches": self.tks_count_matches,
            "rules": [
                {"id": rid, "genes": list(r.genes), "class_code": code(r.class_code)}
                for rid, r in enumerate(self._rules)
            ],
            "domain": {str(rid): list(vec) for rid, vec in sorted(self._vectors.items())},
            "front": list(self.current_front()),
            "history": [list(f) for f in self.history],
            "tks": [[a, b, d] for a, b, d in self.tks_pairs],
            "best_exemplar": self.best_exemplar,
        }
