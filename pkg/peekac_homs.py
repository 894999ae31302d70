"""
Homomorphisms, automorphism orbits and polymorphisms of finite structures.
"""
import itertools
import logging
from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

import peekac_config as cfg
from peekac_structures import (
    Structure,
    check_instance_signature,
    ind_peek_power,
    singleton_index,
    subset_index,
    subset_mask,
)
from peekac_utils import CapExceeded, SearchBudgetExceeded, StructureError, bit, full_mask, iter_bits

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Homomorphism:
    source: Structure
    target: Structure
    mapping: Tuple[int, ...]

    def __post_init__(self):
        if len(self.mapping) != self.source.size:
            raise StructureError("a homomorphism must be total on the source universe")
        for value in self.mapping:
            if not 0 <= value < self.target.size:
                raise StructureError(f"image {value} is outside the target universe")

    def image(self, element: int) -> int:
        return self.mapping[element]

    def verify(self) -> bool:
        """Scan every source tuple and check its image lies in the target relation."""
        for name in self.source.signature.names:
            target_rel = self.target.relations.get(name, frozenset())
            for t in self.source.relations[name]:
                if tuple(self.mapping[e] for e in t) not in target_rel:
                    return False
        return True

    def as_labels(self) -> Dict[Hashable, Hashable]:
        return {self.source.label_of(i): self.target.label_of(v) for i, v in enumerate(self.mapping)}

    def compose(self, after: "Homomorphism") -> "Homomorphism":
        """``after ∘ self``."""
        return Homomorphism(self.source, after.target, tuple(after.mapping[v] for v in self.mapping))


def homomorphism_from_labels(source: Structure, target: Structure, mapping: Dict[Hashable, Hashable]) -> Homomorphism:
    return Homomorphism(
        source, target, tuple(target.index_of(mapping[label]) for label in source.universe)
    )


def support_masks(domains: List[int], scope: Tuple[int, ...], target_tuples) -> List[int]:
    """Bitmask of supported values per position of one constraint."""
    support = [0] * len(scope)
    for t in target_tuples:
        for position, var in enumerate(scope):
            if not domains[var] >> t[position] & 1:
                break
        else:
            for position, value in enumerate(t):
                support[position] |= 1 << value
    return support


class _Search:
    def __init__(self, source: Structure, target: Structure, budget: int):
        self.source = source
        self.target = target
        self.budget = budget
        self.nodes = 0
        self.constraints = [(name, scope) for name, scope in source.constraints()]
        self.target_tuples = {name: target.tuples(name) for name in source.signature.names}
        self.watch: List[List[int]] = [[] for _ in range(source.size)]
        for ci, (_, scope) in enumerate(self.constraints):
            for var in set(scope):
                self.watch[var].append(ci)

    def propagate(self, domains: List[int], queue: deque) -> bool:
        queued = set(queue)
        while queue:
            ci = queue.popleft()
            queued.discard(ci)
            name, scope = self.constraints[ci]
            support = support_masks(domains, scope, self.target_tuples[name])
            for position, var in enumerate(scope):
                narrowed = domains[var] & support[position]
                if narrowed == domains[var]:
                    continue
                if not narrowed:
                    return False
                domains[var] = narrowed
                for other in self.watch[var]:
                    if other not in queued:
                        queued.add(other)
                        queue.append(other)
        return True

    def run(self) -> Optional[Tuple[int, ...]]:
        domains = [full_mask(self.target.size)] * self.source.size
        if not self.propagate(domains, deque(range(len(self.constraints)))):
            return None
        return self._extend(domains, 0)

    def _extend(self, domains: List[int], var: int) -> Optional[Tuple[int, ...]]:
        if var == self.source.size:
            return tuple(next(iter_bits(d)) for d in domains)
        for value in iter_bits(domains[var]):
            self.nodes += 1
            if self.nodes > self.budget:
                raise SearchBudgetExceeded(f"homomorphism search exceeded {self.budget} nodes")
            trial = list(domains)
            trial[var] = bit(value)
            if self.propagate(trial, deque(self.watch[var])):
                found = self._extend(trial, var + 1)
                if found is not None:
                    return found
        return None


def find_homomorphism(
    source: Structure, target: Structure, budget: int = cfg.HOM_SEARCH_BUDGET
) -> Optional[Homomorphism]:
    """Backtracking search in canonical order with arc-consistency pruning.

    Returns a witness, or None when none exists. Raises SearchBudgetExceeded
    when more than ``budget`` assignments are tried.
    """
    check_instance_signature(source.signature, target.signature)
    if source.size == 0:
        return Homomorphism(source, target, ())
    if target.size == 0:
        return None
    search = _Search(source, target, budget)
    mapping = search.run()
    logger.debug("homomorphism search: %d nodes, found=%s", search.nodes, mapping is not None)
    if mapping is None:
        return None
    return Homomorphism(source, target, mapping)


def singleton_lift(hom: Homomorphism, power_target: Structure) -> Homomorphism:
    """a ↦ {h(a)}, as a map into ℘(target)."""
    return Homomorphism(hom.source, power_target, tuple(singleton_index(v) for v in hom.mapping))


def power_lift(hom: Homomorphism, power_source: Structure, power_target: Structure) -> Homomorphism:
    """U ↦ { f(u) | u ∈ U }, as a map ℘(source) → ℘(target)."""
    mapping = []
    for index in range(power_source.size):
        image = 0
        for u in iter_bits(subset_mask(index)):
            image |= 1 << hom.mapping[u]
        mapping.append(subset_index(image))
    return Homomorphism(power_source, power_target, tuple(mapping))


def duplicate_last_coordinate(power_struct: Structure, n: int) -> Homomorphism:
    """(S1,…,Sn) ↦ (S1,…,Sn,Sn) from Ind(℘(B)^n) into Ind(℘(B)^{n+1})."""
    source = ind_peek_power(power_struct, n)
    target = ind_peek_power(power_struct, n + 1)
    mapping = tuple(target.index_of(label + (label[-1],)) for label in source.universe)
    return Homomorphism(source, target, mapping)


def _degree_profile(structure: Structure) -> List[Tuple]:
    """Occurrence counts per (symbol, position); automorphisms preserve it."""
    counts = [dict() for _ in range(structure.size)]
    for name in structure.signature.names:
        for t in structure.relations[name]:
            for position, e in enumerate(t):
                key = (name, position)
                counts[e][key] = counts[e].get(key, 0) + 1
    return [tuple(sorted(c.items())) for c in counts]


def _automorphisms(structure: Structure):
    size = structure.size
    profile = _degree_profile(structure)
    candidates = [[b for b in range(size) if profile[b] == profile[a]] for a in range(size)]
    relations = [(structure.relations[name]) for name in structure.signature.names]
    perm = [None] * size
    used = [False] * size

    def preserves(upto: int) -> bool:
        for rel in relations:
            for t in rel:
                if all(e <= upto for e in t) and tuple(perm[e] for e in t) not in rel:
                    return False
        return True

    def extend(a: int):
        if a == size:
            yield tuple(perm)
            return
        for b in candidates[a]:
            if used[b]:
                continue
            perm[a] = b
            used[b] = True
            if preserves(a):
                yield from extend(a + 1)
            used[b] = False
        perm[a] = None

    yield from extend(0)


def automorphism_orbits(structure: Structure, cap: int = cfg.ORBIT_CAP) -> List[List[int]]:
    """Orbits of the automorphism group, each sorted, ordered by least element."""
    if structure.size > cap:
        raise CapExceeded(f"orbit computation on {structure.size} elements exceeds the cap of {cap}")
    parent = list(range(structure.size))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for perm in _automorphisms(structure):
        for a, b in enumerate(perm):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    orbits: Dict[int, List[int]] = {}
    for a in range(structure.size):
        orbits.setdefault(find(a), []).append(a)
    return [orbits[key] for key in sorted(orbits)]


def orbit_representatives(structure: Structure, cap: int = cfg.ORBIT_CAP) -> List[int]:
    """Least element of each orbit; every element when the structure is above the cap."""
    try:
        return [orbit[0] for orbit in automorphism_orbits(structure, cap=cap)]
    except CapExceeded:
        logger.info("orbit cap %d exceeded, peeking every element of a %d-element template", cap, structure.size)
        return list(range(structure.size))


@dataclass(frozen=True)
class Operation:
    """A total finitary operation on a universe of labels."""

    arity: int
    universe: Tuple[Hashable, ...]
    table: Dict[Tuple[Hashable, ...], Hashable]

    def __post_init__(self):
        allowed = set(self.universe)
        for args in itertools.product(self.universe, repeat=self.arity):
            if args not in self.table:
                raise StructureError(f"operation is undefined on {args}")
            if self.table[args] not in allowed:
                raise StructureError(f"operation maps {args} outside the universe")

    @classmethod
    def from_function(cls, universe: Sequence[Hashable], arity: int, fn: Callable) -> "Operation":
        universe = tuple(universe)
        table = {args: fn(*args) for args in itertools.product(universe, repeat=arity)}
        return cls(arity, universe, table)

    def __call__(self, *args):
        return self.table[tuple(args)]


def is_polymorphism(op: Operation, structure: Structure) -> bool:
    """True iff every relation is closed under coordinatewise application of ``op``."""
    if set(op.universe) != set(structure.universe) or len(op.universe) != structure.size:
        raise StructureError("operation and structure have different universes")
    indexed = {
        tuple(structure.index_of(a) for a in args): structure.index_of(value) for args, value in op.table.items()
    }
    for name in structure.signature.names:
        rel = structure.relations[name]
        rows = structure.tuples(name)
        if not rows:
            continue
        arity = len(rows[0])
        for combo in itertools.product(rows, repeat=op.arity):
            image = tuple(indexed[tuple(t[position] for t in combo)] for position in range(arity))
            if image not in rel:
                return False
    return True
