"""
Set constraints: containment, disjointness and disequality between set variables.

Three deciders live here:

* ``set_constraint_pac`` is the pattern test that tracks peek arc consistency
  on (D; ⊆, ||, ≠): it rejects exactly the instances some variable of which
  cannot be peeked consistently.
* ``set_constraint_exact`` decides satisfiability in polynomial time from
  the ⊆-reachability closure.
* ``set_constraint_oracle`` is a small-model brute force used to cross-check
  both.

PAC is sound here but not complete: two variables that are each forced to be
empty through different disjointness pairs, and that are required to differ,
slip through the peek (e.g. ``x||x, y||y, x≠y``).
"""
import logging
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

import networkx as nx

import peekac_config as cfg
from peekac_utils import CapExceeded, SearchBudgetExceeded, StructureError

logger = logging.getLogger(__name__)

Pair = Tuple[str, str]


@dataclass(frozen=True)
class SetConstraintInstance:
    variables: Tuple[str, ...]
    subset: Tuple[Pair, ...] = field(default_factory=tuple)
    disjoint: Tuple[Pair, ...] = field(default_factory=tuple)
    distinct: Tuple[Pair, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise StructureError("duplicate set variable")
        declared = set(self.variables)
        for kind, pairs in (("sub", self.subset), ("dis", self.disjoint), ("neq", self.distinct)):
            for x, y in pairs:
                for v in (x, y):
                    if v not in declared:
                        raise StructureError(f"{kind} constraint mentions undeclared variable {v}")

    def constraint_count(self) -> int:
        return len(self.subset) + len(self.disjoint) + len(self.distinct)


@dataclass
class SetConstraintDecision:
    accept: bool
    reason: str = ""
    witness: Optional[Tuple[str, ...]] = None


def containment_closure(instance: SetConstraintInstance) -> Dict[str, Set[str]]:
    """x ↦ { e : x ⊆* e }, reflexive."""
    graph = nx.DiGraph()
    graph.add_nodes_from(instance.variables)
    graph.add_edges_from(instance.subset)
    return {v: nx.descendants(graph, v) | {v} for v in instance.variables}


def forced_empty(instance: SetConstraintInstance, closure: Optional[Dict[str, Set[str]]] = None) -> Set[str]:
    """Variables lying ⊆*-below both sides of some disjointness pair."""
    closure = closure or containment_closure(instance)
    return {
        x for x in instance.variables if any(u in closure[x] and v in closure[x] for u, v in instance.disjoint)
    }


def set_constraint_pac(instance: SetConstraintInstance) -> SetConstraintDecision:
    """Reject iff a ≠ pair is ⊆-equivalent, or both sides of a ≠ pair are ⊆*-below some e
    that is ⊆*-below both sides of a || pair (u = v allowed)."""
    closure = containment_closure(instance)
    for x, y in instance.distinct:
        if x == y or (y in closure[x] and x in closure[y]):
            return SetConstraintDecision(False, f"{x} != {y} but {x} = {y} is forced", (x, y))
    for x, y in instance.distinct:
        common = closure[x] & closure[y]
        if not common:
            continue
        for e in sorted(common):
            for u, v in instance.disjoint:
                if u in closure[e] and v in closure[e]:
                    logger.debug("set-constraint pattern: %s,%s below %s below %s||%s", x, y, e, u, v)
                    return SetConstraintDecision(False, f"{x},{y} <= {e} <= {u}||{v}", (x, y, e, u, v))
    return SetConstraintDecision(True)


def set_constraint_exact(instance: SetConstraintInstance) -> SetConstraintDecision:
    """Polynomial satisfiability test.

    The up-closure of x is the least membership pattern an element of x can
    have; x ≠ y is satisfiable iff one side admits an element outside the other.
    """
    closure = containment_closure(instance)
    empty = forced_empty(instance, closure)
    for x, y in instance.distinct:
        x_escapes = x not in empty and y not in closure[x]
        y_escapes = y not in empty and x not in closure[y]
        if not (x_escapes or y_escapes):
            return SetConstraintDecision(False, f"{x} != {y} cannot be witnessed", (x, y))
    return SetConstraintDecision(True)


def _distinct_witness_bound(instance: SetConstraintInstance) -> int:
    pairs = {tuple(sorted(p)) for p in instance.distinct if p[0] != p[1]}
    return max(1, len(pairs))


def set_constraint_oracle(
    instance: SetConstraintInstance,
    universe_size: Optional[int] = None,
    max_vars: int = cfg.SET_ORACLE_MAX_VARS,
    budget: int = cfg.SET_ORACLE_BUDGET,
) -> bool:
    """Exhaustive search for subsets of {0..m-1} satisfying every constraint.

    ⊆ and || only forbid element membership patterns while each ≠ needs one
    distinguishing element, so m = number of distinct ≠ pairs is already
    complete; that is the default.
    """
    if len(instance.variables) > max_vars:
        raise CapExceeded(f"set-constraint oracle supports at most {max_vars} variables")
    m = universe_size if universe_size is not None else _distinct_witness_bound(instance)
    names = list(instance.variables)
    position = {v: i for i, v in enumerate(names)}
    checks: List[List[Tuple[str, Tuple[int, int]]]] = [[] for _ in names]
    for kind, pairs in (("sub", instance.subset), ("dis", instance.disjoint), ("neq", instance.distinct)):
        for x, y in pairs:
            checks[max(position[x], position[y])].append((kind, (position[x], position[y])))
    values = [0] * len(names)
    nodes = 0

    def holds(kind: str, pair: Tuple[int, int]) -> bool:
        a, b = values[pair[0]], values[pair[1]]
        if kind == "sub":
            return a & ~b == 0
        if kind == "dis":
            return a & b == 0
        return a != b

    def extend(i: int) -> bool:
        nonlocal nodes
        if i == len(names):
            return True
        for s in range(1 << m):
            nodes += 1
            if nodes > budget:
                raise SearchBudgetExceeded(f"set-constraint oracle exceeded {budget} nodes")
            values[i] = s
            if all(holds(kind, pair) for kind, pair in checks[i]) and extend(i + 1):
                return True
        return False

    return extend(0)


def random_setcon(n: int, density: float, rng: random.Random) -> SetConstraintInstance:
    """About density * n constraints between distinct variables, kinds drawn uniformly."""
    variables = tuple(f"s{i}" for i in range(n))
    pairs: Dict[str, List[Pair]] = {"sub": [], "dis": [], "neq": []}
    count = int(round(density * n)) if n > 1 else 0
    for _ in range(count):
        x, y = rng.sample(variables, 2)
        pairs[rng.choice(("sub", "dis", "neq"))].append((x, y))
    return SetConstraintInstance(variables, tuple(pairs["sub"]), tuple(pairs["dis"]), tuple(pairs["neq"]))
