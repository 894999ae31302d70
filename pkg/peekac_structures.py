"""
Finite relational structures and the constructions built from them.

Elements are stored as canonical indices ``0..size-1``; ``universe`` keeps the
user-facing label of each index. Relations are frozensets of index tuples.
Power-structure elements are labelled by frozensets of base labels and are
ordered by their bitmask over the base universe.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Hashable, Iterable, List, Mapping, Sequence, Tuple

import peekac_config as cfg
from peekac_utils import CapExceeded, SignatureError, StructureError, iter_bits

logger = logging.getLogger(__name__)

Tuples = FrozenSet[Tuple[int, ...]]


@dataclass(frozen=True)
class Signature:
    symbols: Tuple[Tuple[str, int], ...]

    def __post_init__(self):
        names = [name for name, _ in self.symbols]
        if len(set(names)) != len(names):
            raise SignatureError(f"duplicate symbol names in {names}")
        for name, arity in self.symbols:
            if not isinstance(arity, int) or arity < 1:
                raise SignatureError(f"symbol {name} has invalid arity {arity}")

    @classmethod
    def of(cls, pairs: Iterable[Tuple[str, int]]) -> "Signature":
        return cls(tuple((str(name), int(arity)) for name, arity in pairs))

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.symbols)

    def __contains__(self, name: str) -> bool:
        return any(n == name for n, _ in self.symbols)

    def arity(self, name: str) -> int:
        for n, a in self.symbols:
            if n == name:
                return a
        raise SignatureError(f"unknown symbol {name}")

    def extend(self, name: str, arity: int) -> "Signature":
        if name in self:
            raise SignatureError(f"symbol {name} already in signature")
        return Signature(self.symbols + ((name, arity),))


def check_instance_signature(instance: Signature, template: Signature):
    """An instance may omit template symbols (read as empty relations) but not add or change any."""
    for name, arity in instance.symbols:
        if name not in template:
            raise SignatureError(f"instance symbol {name} is not in the template signature")
        if template.arity(name) != arity:
            raise SignatureError(
                f"symbol {name} has arity {arity} in the instance and {template.arity(name)} in the template"
            )


@dataclass(frozen=True)
class Structure:
    signature: Signature
    universe: Tuple[Hashable, ...]
    relations: Mapping[str, Tuples]
    _index: Dict[Hashable, int] = field(default=None, init=False, repr=False, compare=False)
    _sorted: Dict[str, Tuple[Tuple[int, ...], ...]] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        universe = tuple(self.universe)
        index = {}
        for i, label in enumerate(universe):
            if label in index:
                raise StructureError(f"duplicate element {label!r}")
            index[label] = i
        relations = {}
        for name in self.relations:
            if name not in self.signature:
                raise StructureError(f"relation {name} is not in the signature")
        size = len(universe)
        for name, arity in self.signature.symbols:
            tuples = frozenset(tuple(t) for t in self.relations.get(name, ()))
            for t in tuples:
                if len(t) != arity:
                    raise StructureError(f"tuple {t} has length {len(t)}, {name} has arity {arity}")
                for entry in t:
                    if not 0 <= entry < size:
                        raise StructureError(f"tuple {t} of {name} mentions an element outside the universe")
            relations[name] = tuples
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "relations", relations)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_sorted", {})

    @classmethod
    def from_labels(
        cls,
        signature: Signature,
        universe: Sequence[Hashable],
        relations: Mapping[str, Iterable[Sequence[Hashable]]],
    ) -> "Structure":
        index = {label: i for i, label in enumerate(universe)}
        converted = {}
        for name, tuples in relations.items():
            rows = set()
            for t in tuples:
                try:
                    rows.add(tuple(index[label] for label in t))
                except KeyError as exc:
                    raise StructureError(f"relation {name} mentions unknown element {exc.args[0]!r}")
            converted[name] = frozenset(rows)
        return cls(signature, tuple(universe), converted)

    @property
    def size(self) -> int:
        return len(self.universe)

    def label_of(self, index: int) -> Hashable:
        return self.universe[index]

    def index_of(self, label: Hashable) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise StructureError(f"{label!r} is not an element of the structure")

    def has_element(self, label: Hashable) -> bool:
        return label in self._index

    def tuples(self, name: str) -> Tuple[Tuple[int, ...], ...]:
        """The tuples of ``name`` in canonical (sorted) order."""
        cached = self._sorted.get(name)
        if cached is None:
            if name not in self.relations:
                raise SignatureError(f"unknown symbol {name}")
            cached = tuple(sorted(self.relations[name]))
            self._sorted[name] = cached
        return cached

    def labelled_tuples(self, name: str) -> List[Tuple[Hashable, ...]]:
        return [tuple(self.universe[i] for i in t) for t in self.tuples(name)]

    def tuple_count(self) -> int:
        return sum(len(ts) for ts in self.relations.values())

    def constraints(self) -> List[Tuple[str, Tuple[int, ...]]]:
        """Every (symbol, tuple) pair in signature order, then tuple order."""
        return [(name, t) for name in self.signature.names for t in self.tuples(name)]

    def with_relation(self, name: str, arity: int, tuples: Iterable[Tuple[int, ...]]) -> "Structure":
        relations = dict(self.relations)
        relations[name] = frozenset(tuples)
        return Structure(self.signature.extend(name, arity), self.universe, relations)

    def is_power_structure(self) -> bool:
        return all(isinstance(label, frozenset) and label for label in self.universe)


def pad_signature(structure: Structure, signature: Signature) -> Structure:
    """Re-type ``structure`` over ``signature``; missing symbols become empty relations."""
    check_instance_signature(structure.signature, signature)
    return Structure(signature, structure.universe, structure.relations)


def induced_substructure(structure: Structure, elements: Iterable[int]) -> Structure:
    """The substructure on ``elements``: each relation is R ∩ C^k, elements keep canonical order."""
    kept = sorted(set(elements))
    remap = {old: new for new, old in enumerate(kept)}
    relations = {}
    for name in structure.signature.names:
        relations[name] = frozenset(
            tuple(remap[e] for e in t) for t in structure.relations[name] if all(e in remap for e in t)
        )
    return Structure(structure.signature, tuple(structure.universe[i] for i in kept), relations)


def expand_with_unary(structure: Structure, subset: Iterable[Hashable], symbol: str = cfg.RESERVED_UNARY) -> Structure:
    """[A, S]: add a fresh unary symbol interpreted as ``subset`` (given by element labels)."""
    if symbol in structure.signature:
        raise SignatureError(f"symbol {symbol} is already used by the structure")
    rows = set()
    for label in subset:
        if not structure.has_element(label):
            raise StructureError(f"{label!r} is not an element of the structure")
        rows.add((structure.index_of(label),))
    return structure.with_relation(symbol, 1, rows)


def _check_cap(count: int, cap: int, what: str):
    if count > cap:
        raise CapExceeded(f"{what} would have {count} elements (cap {cap})")


def power_structure(structure: Structure, max_universe: int = cfg.MAX_POWER_UNIVERSE) -> Structure:
    """℘(B): nonempty subsets of B, relations are coordinate projections of nonempty S ⊆ R^B.

    Element ``mask - 1`` is the subset with bitmask ``mask``. Projections of
    unions are coordinatewise unions, so each relation is the closure of the
    singleton projections under coordinatewise union with single tuples.
    """
    m = structure.size
    if m > max_universe:
        raise CapExceeded(f"power structure of a {m}-element structure exceeds the cap of {max_universe}")
    universe = []
    for mask in range(1, 1 << m):
        universe.append(frozenset(structure.universe[i] for i in iter_bits(mask)))
    relations = {}
    for name in structure.signature.names:
        base = [tuple(1 << e for e in t) for t in structure.tuples(name)]
        seen = set(base)
        frontier = list(base)
        while frontier:
            grown = []
            for masks in frontier:
                for t in base:
                    joined = tuple(a | b for a, b in zip(masks, t))
                    if joined not in seen:
                        seen.add(joined)
                        grown.append(joined)
            frontier = grown
        relations[name] = frozenset(tuple(mask - 1 for mask in masks) for masks in seen)
    logger.debug("power structure of %d elements: %d elements", m, len(universe))
    return Structure(structure.signature, tuple(universe), relations)


def product(left: Structure, right: Structure, max_elements: int = cfg.MAX_POWER_ELEMENTS) -> Structure:
    if left.signature != right.signature:
        raise SignatureError("product of structures over different signatures")
    _check_cap(left.size * right.size, max_elements, "product")
    width = right.size
    universe = tuple((a, b) for a in left.universe for b in right.universe)
    relations = {}
    for name in left.signature.names:
        relations[name] = frozenset(
            tuple(x * width + y for x, y in zip(ta, tb))
            for ta in left.tuples(name)
            for tb in right.tuples(name)
        )
    return Structure(left.signature, universe, relations)


def _power_index(coords: Sequence[int], base: int) -> int:
    index = 0
    for c in coords:
        index = index * base + c
    return index


def _power_relations(structure: Structure, n: int, keep) -> Dict[str, Tuples]:
    """Relations of B^n over the index space of the full power, restricted to kept elements."""
    m = structure.size
    relations = {}
    for name in structure.signature.names:
        rows = set()
        for combo in itertools.product(structure.tuples(name), repeat=n):
            row = []
            for position in range(len(combo[0])):
                element = _power_index([t[position] for t in combo], m)
                if not keep(element):
                    break
                row.append(element)
            else:
                rows.add(tuple(row))
        relations[name] = frozenset(rows)
    return relations


def power(structure: Structure, n: int, max_elements: int = cfg.MAX_POWER_ELEMENTS) -> Structure:
    """B^n with flat n-tuples of labels as elements, in lexicographic order."""
    if n < 1:
        raise StructureError("power needs n >= 1")
    _check_cap(structure.size ** n, max_elements, f"power {n}")
    universe = tuple(itertools.product(structure.universe, repeat=n))
    return Structure(structure.signature, universe, _power_relations(structure, n, lambda e: True))


def ind_peek_power(power_struct: Structure, n: int, max_elements: int = cfg.MAX_POWER_ELEMENTS) -> Structure:
    """Ind(℘(B)^n): the induced substructure on n-tuples with at least one singleton coordinate."""
    if n < 1:
        raise StructureError("ind_peek_power needs n >= 1")
    if not power_struct.is_power_structure():
        raise StructureError("ind_peek_power expects a power structure")
    m = power_struct.size
    _check_cap(m ** n, max_elements, f"Ind power {n}")
    singleton = [len(label) == 1 for label in power_struct.universe]
    kept_coords = [
        coords for coords in itertools.product(range(m), repeat=n) if any(singleton[c] for c in coords)
    ]
    full_index = {_power_index(coords, m): i for i, coords in enumerate(kept_coords)}
    relations = _power_relations(power_struct, n, full_index.__contains__)
    relations = {name: frozenset(tuple(full_index[e] for e in t) for t in rows) for name, rows in relations.items()}
    universe = tuple(tuple(power_struct.universe[c] for c in coords) for coords in kept_coords)
    logger.debug("Ind power %d of a %d-element power structure: %d elements", n, m, len(universe))
    return Structure(power_struct.signature, universe, relations)


def singleton_index(value: int) -> int:
    """Index in ℘(B) of the singleton {value}, for a base element index."""
    return (1 << value) - 1


def subset_index(mask: int) -> int:
    return mask - 1


def subset_mask(index: int) -> int:
    return index + 1


def one_element_structure(signature: Signature, label: Hashable = 0) -> Structure:
    """The one-element structure whose relations are all full."""
    return Structure(signature, (label,), {name: {(0,) * arity} for name, arity in signature.symbols})
