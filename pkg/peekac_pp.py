"""
Primitive positive formulas: atoms, equalities, conjunction and existential
quantification, evaluated over finite structures.
"""
import itertools
import random
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Set, Tuple, Union

from peekac_structures import Signature, Structure
from peekac_utils import SignatureError, StructureError


@dataclass(frozen=True)
class Atom:
    symbol: str
    variables: Tuple[str, ...]


@dataclass(frozen=True)
class Equals:
    left: str
    right: str


@dataclass(frozen=True)
class Conjunction:
    children: Tuple["Node", ...]


@dataclass(frozen=True)
class Exists:
    variable: str
    child: "Node"


Node = Union[Atom, Equals, Conjunction, Exists]


def atom(symbol: str, *variables: str) -> Atom:
    return Atom(symbol, tuple(variables))


def conj(*children: Node) -> Conjunction:
    return Conjunction(tuple(children))


def exists(variables: Union[str, Iterable[str]], child: Node) -> Node:
    names = [variables] if isinstance(variables, str) else list(variables)
    for name in reversed(names):
        child = Exists(name, child)
    return child


@dataclass(frozen=True)
class PPFormula:
    free: Tuple[str, ...]
    body: Node

    def validate(self, signature: Signature):
        """Check atom arities and that every variable is free or bound by an enclosing quantifier."""
        self._check(self.body, signature, set(self.free))

    def _check(self, node: Node, signature: Signature, scope: Set[str]):
        if isinstance(node, Atom):
            if node.symbol not in signature:
                raise SignatureError(f"unknown symbol {node.symbol} in formula")
            if signature.arity(node.symbol) != len(node.variables):
                raise SignatureError(
                    f"atom {node.symbol} has {len(node.variables)} arguments, arity is {signature.arity(node.symbol)}"
                )
            names = node.variables
        elif isinstance(node, Equals):
            names = (node.left, node.right)
        elif isinstance(node, Conjunction):
            for child in node.children:
                self._check(child, signature, scope)
            return
        elif isinstance(node, Exists):
            if node.variable in scope:
                raise StructureError(f"variable {node.variable} is quantified twice or shadows a free variable")
            self._check(node.child, signature, scope | {node.variable})
            return
        else:
            raise StructureError(f"not a pp formula node: {node!r}")
        for name in names:
            if name not in scope:
                raise StructureError(f"variable {name} is neither free nor bound")

    @property
    def arity(self) -> int:
        return len(self.free)

    def depth(self) -> int:
        return node_depth(self.body)


def node_depth(node: Node) -> int:
    if isinstance(node, Conjunction):
        return 1 + max((node_depth(c) for c in node.children), default=0)
    if isinstance(node, Exists):
        return 1 + node_depth(node.child)
    return 1


# A table is the set of satisfying assignments to the variables it lists.
Table = Tuple[Tuple[str, ...], Set[Tuple[int, ...]]]


def _join(left: Table, right: Table) -> Table:
    lvars, lrows = left
    rvars, rrows = right
    shared = [v for v in rvars if v in lvars]
    extra = [i for i, v in enumerate(rvars) if v not in lvars]
    lpos = [lvars.index(v) for v in shared]
    rpos = [rvars.index(v) for v in shared]
    index: Dict[Tuple[int, ...], List[Tuple[int, ...]]] = {}
    for row in rrows:
        index.setdefault(tuple(row[p] for p in rpos), []).append(row)
    rows = set()
    for row in lrows:
        for match in index.get(tuple(row[p] for p in lpos), ()):
            rows.add(row + tuple(match[i] for i in extra))
    return lvars + tuple(rvars[i] for i in extra), rows


def _evaluate(node: Node, structure: Structure) -> Table:
    if isinstance(node, Atom):
        names: List[str] = []
        for v in node.variables:
            if v not in names:
                names.append(v)
        positions = [names.index(v) for v in node.variables]
        rows = set()
        for t in structure.relations[node.symbol]:
            row = [None] * len(names)
            for value, slot in zip(t, positions):
                if row[slot] is None:
                    row[slot] = value
                elif row[slot] != value:
                    break
            else:
                rows.add(tuple(row))
        return tuple(names), rows
    if isinstance(node, Equals):
        if node.left == node.right:
            return (node.left,), {(e,) for e in range(structure.size)}
        return (node.left, node.right), {(e, e) for e in range(structure.size)}
    if isinstance(node, Conjunction):
        table: Table = ((), {()})
        for child in node.children:
            table = _join(table, _evaluate(child, structure))
        return table
    if isinstance(node, Exists):
        names, rows = _evaluate(node.child, structure)
        if node.variable not in names:
            return names, rows
        drop = names.index(node.variable)
        kept = names[:drop] + names[drop + 1:]
        return kept, {row[:drop] + row[drop + 1:] for row in rows}
    raise StructureError(f"not a pp formula node: {node!r}")


def eval_pp(formula: PPFormula, structure: Structure) -> FrozenSet[Tuple[int, ...]]:
    """The relation defined by ``formula`` over ``structure``, as tuples of element indices."""
    formula.validate(structure.signature)
    names, rows = _evaluate(formula.body, structure)
    missing = [v for v in dict.fromkeys(formula.free) if v not in names]
    if missing:
        names, rows = _join((names, rows), (tuple(missing), set(itertools.product(range(structure.size), repeat=len(missing)))))
    positions = [names.index(v) for v in formula.free]
    return frozenset(tuple(row[p] for p in positions) for row in rows)


def satisfies(node: Node, structure: Structure, assignment: Dict[str, int]) -> bool:
    """Model checking of a single assignment, quantifiers by enumeration."""
    if isinstance(node, Atom):
        return tuple(assignment[v] for v in node.variables) in structure.relations[node.symbol]
    if isinstance(node, Equals):
        return assignment[node.left] == assignment[node.right]
    if isinstance(node, Conjunction):
        return all(satisfies(c, structure, assignment) for c in node.children)
    if isinstance(node, Exists):
        for value in range(structure.size):
            if satisfies(node.child, structure, {**assignment, node.variable: value}):
                return True
        return False
    raise StructureError(f"not a pp formula node: {node!r}")


def random_pp_formula(signature: Signature, rng: random.Random, depth: int, arity: int) -> PPFormula:
    """A random well-formed formula with ``arity`` free variables and nesting depth at most ``depth``."""
    free = tuple(f"v{i + 1}" for i in range(arity))
    counter = itertools.count(1)

    def build(level: int, scope: List[str]) -> Node:
        choice = rng.random()
        if level <= 1 or choice < 0.35:
            name, sym_arity = rng.choice(signature.symbols)
            return Atom(name, tuple(rng.choice(scope) for _ in range(sym_arity)))
        if choice < 0.7:
            width = rng.randint(2, 3)
            return Conjunction(tuple(build(level - 1, scope) for _ in range(width)))
        fresh = f"w{next(counter)}"
        return Exists(fresh, build(level - 1, scope + [fresh]))

    return PPFormula(free, build(depth, list(free)))
