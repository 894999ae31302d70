"""
Built-in constraint languages and the polymorphism tooling around them.

Finite templates: 2-SAT, K2 (and bipartite graphs through K2), oriented
cycles, the even-parity template. Infinite template: the point algebra over
the rationals, handled by a sign-label descriptor. Set constraints live in
peekac_setcon.
"""
import itertools
import logging
import random
from dataclasses import dataclass
from typing import Callable, Hashable, List, Optional, Sequence, Tuple

import networkx as nx

import peekac_config as cfg
from peekac_ac import Template, TemplateDescriptor
from peekac_homs import Homomorphism, Operation, find_homomorphism, is_polymorphism
from peekac_models import PeekReport
from peekac_pac import PeekOptions, pac_decide
from peekac_structures import Signature, Structure, check_instance_signature, ind_peek_power, power_structure
from peekac_utils import CapExceeded, StructureError, UnknownTemplateError

logger = logging.getLogger(__name__)

Clause = Tuple[int, int]
TernaryOp = Operation


# ---------------------------------------------------------------------------
# 2-SAT

def two_sat_template() -> Structure:
    """({0,1}; R00, R01, R10, R11) with R_st = {0,1}^2 minus (s,t)."""
    pairs = list(itertools.product((0, 1), repeat=2))
    symbols = cfg.TWO_SAT_SYMBOLS
    relations = {}
    for name in symbols:
        forbidden = (int(name[1]), int(name[2]))
        relations[name] = [p for p in pairs if p != forbidden]
    return Structure.from_labels(Signature.of((name, 2) for name in symbols), (0, 1), relations)


def cnf_variable(index: int) -> str:
    return f"x{index}"


def cnf2_to_instance(clauses: Sequence[Clause], num_vars: Optional[int] = None) -> Structure:
    """Clause (l1 v l2) becomes (x|l1|, x|l2|) in R_{s1 s2}, s = 1 for a negative literal."""
    count = num_vars if num_vars is not None else max((abs(l) for c in clauses for l in c), default=0)
    universe = [cnf_variable(i) for i in range(1, count + 1)]
    rows = {name: [] for name in cfg.TWO_SAT_SYMBOLS}
    for clause in clauses:
        if len(clause) != 2 or 0 in clause:
            raise StructureError(f"clause {clause} does not have two nonzero literals")
        a, b = clause
        if max(abs(a), abs(b)) > count:
            raise StructureError(f"clause {clause} mentions a variable above {count}")
        name = f"R{int(a < 0)}{int(b < 0)}"
        rows[name].append((cnf_variable(abs(a)), cnf_variable(abs(b))))
    return Structure.from_labels(two_sat_template().signature, universe, rows)


def two_sat_brute(num_vars: int, clauses: Sequence[Clause]) -> bool:
    for values in itertools.product((False, True), repeat=num_vars):
        if all(any(values[abs(l) - 1] == (l > 0) for l in clause) for clause in clauses):
            return True
    return False


# ---------------------------------------------------------------------------
# Graphs

def k2_template() -> Structure:
    return Structure.from_labels(Signature.of([(cfg.EDGE, 2)]), (0, 1), {cfg.EDGE: [(0, 1), (1, 0)]})


def graph_structure(num_vertices: int, edges: Sequence[Tuple[int, int]], prefix: str = "v") -> Structure:
    """Symmetric E over vertices ``<prefix>0..``; each edge is added in both directions."""
    universe = [f"{prefix}{i}" for i in range(num_vertices)]
    rows = set()
    for a, b in edges:
        rows.add((universe[a], universe[b]))
        rows.add((universe[b], universe[a]))
    return Structure.from_labels(Signature.of([(cfg.EDGE, 2)]), universe, {cfg.EDGE: rows})


def to_networkx(graph: Structure) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(graph.size))
    g.add_edges_from(graph.relations[cfg.EDGE])
    return g


def _check_symmetric(graph: Structure):
    if graph.signature.symbols != ((cfg.EDGE, 2),):
        raise StructureError(f"expected a graph with the single binary symbol {cfg.EDGE}")
    edges = graph.relations[cfg.EDGE]
    for a, b in edges:
        if (b, a) not in edges:
            raise StructureError(f"edge relation is not symmetric: ({graph.label_of(a)}, {graph.label_of(b)})")


@dataclass(frozen=True)
class BipartiteReduction:
    """Outcome of reducing CSP(G) to CSP(K2).

    ``trivial`` when G has no edges. Otherwise ``from_k2`` maps K2 onto the
    first edge of G and ``to_k2`` collapses each side of the bipartition; it
    is None when G is not bipartite.
    """

    graph: Structure
    trivial: bool
    from_k2: Optional[Homomorphism] = None
    to_k2: Optional[Homomorphism] = None

    @property
    def bipartite(self) -> bool:
        return self.trivial or self.to_k2 is not None


def bipartite_reduce(graph: Structure) -> BipartiteReduction:
    _check_symmetric(graph)
    edges = graph.tuples(cfg.EDGE)
    if not edges:
        return BipartiteReduction(graph, trivial=True)
    k2 = k2_template()
    s, t = edges[0]
    from_k2 = Homomorphism(k2, graph, (s, t))
    g = to_networkx(graph)
    if not nx.is_bipartite(g):
        logger.info("graph with %d vertices is not bipartite; no collapse to K2", graph.size)
        return BipartiteReduction(graph, trivial=False, from_k2=from_k2)
    colour = nx.bipartite.color(g)
    flip = colour[s]
    to_k2 = Homomorphism(graph, k2, tuple(colour[v] ^ flip for v in range(graph.size)))
    return BipartiteReduction(graph, trivial=False, from_k2=from_k2, to_k2=to_k2)


def bipartite_pac(instance: Structure, graph: Structure, workers: Optional[int] = 1) -> bool:
    """Decide CSP(G) for a bipartite G by running PAC against K2."""
    check_instance_signature(instance.signature, graph.signature)
    reduction = bipartite_reduce(graph)
    if reduction.trivial:
        has_edges = bool(instance.relations.get(cfg.EDGE))
        return not has_edges and (graph.size > 0 or instance.size == 0)
    if not reduction.bipartite:
        raise StructureError("CSP of a non-bipartite graph is outside the reduction to K2")
    return pac_decide(instance, k2_template(), workers=workers).accepted


# ---------------------------------------------------------------------------
# Oriented cycles

@dataclass(frozen=True)
class CycleOrientation:
    """Edge i joins d_i and d_{i+1 mod n}; it points forward when ``forward[i]`` is set."""

    forward: Tuple[bool, ...]

    def __post_init__(self):
        if len(self.forward) < 3:
            raise StructureError("a cycle needs at least 3 vertices")

    @classmethod
    def from_bits(cls, bits: str) -> "CycleOrientation":
        if not bits or set(bits) - {"0", "1"}:
            raise StructureError(f"cycle orientation {bits!r} must be a string of 0/1")
        return cls(tuple(c == "1" for c in bits))

    @property
    def length(self) -> int:
        return len(self.forward)

    @property
    def forward_count(self) -> int:
        return sum(self.forward)

    def bits(self) -> str:
        return "".join("1" if f else "0" for f in self.forward)

    def edges(self) -> List[Tuple[int, int]]:
        n = self.length
        return [(i, (i + 1) % n) if f else ((i + 1) % n, i) for i, f in enumerate(self.forward)]


def cycle_template(cycle: CycleOrientation) -> Structure:
    return Structure(Signature.of([(cfg.EDGE, 2)]), tuple(range(cycle.length)), {cfg.EDGE: cycle.edges()})


def is_unbalanced(cycle: CycleOrientation) -> bool:
    return 2 * cycle.forward_count != cycle.length


def all_orientations(n: int) -> List[CycleOrientation]:
    return [CycleOrientation(bits) for bits in itertools.product((True, False), repeat=n)]


# ---------------------------------------------------------------------------
# Ternary operations

def ternary_op(universe: Sequence[Hashable], fn: Callable) -> TernaryOp:
    return Operation.from_function(universe, 3, fn)


def dual_discriminator(universe: Sequence[Hashable]) -> TernaryOp:
    return ternary_op(universe, lambda x, y, z: x if x == y else z)


def median_op(order: Sequence[Hashable]) -> TernaryOp:
    rank = {value: i for i, value in enumerate(order)}
    return ternary_op(order, lambda *args: sorted(args, key=rank.__getitem__)[1])


def first_projection(universe: Sequence[Hashable]) -> TernaryOp:
    return ternary_op(universe, lambda x, y, z: x)


def is_slice_semilattice(op: TernaryOp) -> bool:
    """Every slice x, y -> op(x, y, b) is idempotent, commutative and associative."""
    if op.arity != 3:
        return False
    u = op.universe
    for b in u:
        for x in u:
            if op(x, x, b) != x:
                return False
            for y in u:
                if op(x, y, b) != op(y, x, b):
                    return False
                for z in u:
                    if op(op(x, y, b), z, b) != op(x, op(y, z, b), b):
                        return False
    return True


def find_median_order(cycle: CycleOrientation, cap: int = cfg.MEDIAN_ORDER_CAP) -> Optional[Tuple[int, ...]]:
    """First linear order (in permutation order) whose median preserves the cycle."""
    if cycle.length > cap:
        raise CapExceeded(f"median order search over {cycle.length} vertices exceeds the cap of {cap}")
    template = cycle_template(cycle)
    for order in itertools.permutations(template.universe):
        if is_polymorphism(median_op(order), template):
            return order
    return None


def fold_slice(op: TernaryOp, b: Hashable, values: Sequence[Hashable]) -> Hashable:
    result = values[0]
    for value in values[1:]:
        result = op(result, value, b)
    return result


def slice_semilattice_hom(op: TernaryOp, template: Structure, n: int) -> Homomorphism:
    """The map Ind(P(B)^n) -> B built from a slice-semilattice polymorphism.

    Start at the last singleton coordinate and fold each later coordinate
    with the slice of the previous value.
    """
    if set(op.universe) != set(template.universe):
        raise StructureError("operation and template have different universes")
    source = ind_peek_power(power_structure(template), n)
    order = {label: i for i, label in enumerate(template.universe)}
    mapping = []
    for coords in source.universe:
        g = max(i for i, s in enumerate(coords) if len(s) == 1)
        value = next(iter(coords[g]))
        for s in coords[g + 1:]:
            value = fold_slice(op, value, sorted(s, key=order.__getitem__))
        mapping.append(template.index_of(value))
    return Homomorphism(source, template, tuple(mapping))


# ---------------------------------------------------------------------------
# Parity

def parity_template() -> Structure:
    """Even-parity triples plus the constants 0 and 1; linear equations over GF(2)."""
    r, z, o = cfg.PARITY_SYMBOLS
    triples = [t for t in itertools.product((0, 1), repeat=3) if sum(t) % 2 == 0]
    return Structure.from_labels(
        Signature.of([(r, 3), (z, 1), (o, 1)]), (0, 1), {r: triples, z: [(0,)], o: [(1,)]}
    )


# ---------------------------------------------------------------------------
# Point algebra over the rationals

SIGN_N, SIGN_Z, SIGN_P = 1, 2, 4
SIGN_NAMES = ((SIGN_N, "N"), (SIGN_Z, "Z"), (SIGN_P, "P"))

# Sign pairs (relative to the pinned 0) that some pair of rationals in the relation realises.
POINT_SUPPORT = {
    cfg.POINT_LE: {(SIGN_N, SIGN_N), (SIGN_N, SIGN_Z), (SIGN_N, SIGN_P), (SIGN_Z, SIGN_Z), (SIGN_Z, SIGN_P), (SIGN_P, SIGN_P)},
    cfg.POINT_LT: {(SIGN_N, SIGN_N), (SIGN_N, SIGN_Z), (SIGN_N, SIGN_P), (SIGN_Z, SIGN_P), (SIGN_P, SIGN_P)},
    cfg.POINT_NE: {(s, t) for s in (SIGN_N, SIGN_Z, SIGN_P) for t in (SIGN_N, SIGN_Z, SIGN_P)} - {(SIGN_Z, SIGN_Z)},
}


def point_algebra_signature() -> Signature:
    return Signature.of([(cfg.POINT_LE, 2), (cfg.POINT_NE, 2), (cfg.POINT_LT, 2)])


class PointAlgebraDescriptor(TemplateDescriptor):
    """(Q; le, ne, lt) with one orbit; labels are sets of signs relative to the pinned 0."""

    name = "pointalg"
    top = SIGN_N | SIGN_Z | SIGN_P
    bottom = 0

    def __init__(self):
        self.signature = point_algebra_signature()

    def representatives(self) -> List[Hashable]:
        return [0]

    def pin(self, representative: Hashable) -> int:
        if representative != 0:
            raise StructureError(f"{representative!r} is not a representative of the point algebra")
        return SIGN_Z

    def propagate(self, symbol: str, labels: Sequence[int]) -> Tuple[int, ...]:
        left, right = labels
        new_left = new_right = 0
        for s, t in POINT_SUPPORT[symbol]:
            if left & s and right & t:
                new_left |= s
                new_right |= t
        return new_left, new_right

    def label_name(self, label: int) -> str:
        return "{" + ",".join(name for sign, name in SIGN_NAMES if label & sign) + "}"


def point_algebra_pac(instance: Structure, workers: Optional[int] = 1, options: Optional[PeekOptions] = None) -> PeekReport:
    return pac_decide(instance, PointAlgebraDescriptor(), workers=workers, options=options)


def point_algebra_oracle(instance: Structure) -> bool:
    """Satisfiable iff no ne/lt pair lies inside one strongly connected component of the le/lt digraph."""
    check_instance_signature(instance.signature, point_algebra_signature())
    g = nx.DiGraph()
    g.add_nodes_from(range(instance.size))
    for symbol in (cfg.POINT_LE, cfg.POINT_LT):
        g.add_edges_from(instance.relations.get(symbol, ()))
    component = {}
    for cid, members in enumerate(nx.strongly_connected_components(g)):
        for v in members:
            component[v] = cid
    for symbol in (cfg.POINT_NE, cfg.POINT_LT):
        for a, b in instance.relations.get(symbol, ()):
            if component[a] == component[b]:
                return False
    return True


# ---------------------------------------------------------------------------
# Random instances

def _distinct_pair(n: int, rng: random.Random) -> Tuple[int, int]:
    a, b = rng.sample(range(n), 2)
    return a, b


def random_graph(n: int, edge_prob: float, rng: random.Random) -> Structure:
    edges = [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < edge_prob]
    return graph_structure(n, edges)


def random_2cnf(num_vars: int, num_clauses: int, rng: random.Random) -> List[Clause]:
    if num_vars < 1 and num_clauses:
        raise StructureError("clauses need at least one variable")
    clauses = []
    for _ in range(num_clauses):
        a, b = (_distinct_pair(num_vars, rng) if num_vars > 1 else (0, 0))
        clauses.append(((a + 1) * rng.choice((1, -1)), (b + 1) * rng.choice((1, -1))))
    return clauses


def random_point_network(
    n: int,
    le_density: float,
    ne_density: float,
    rng: random.Random,
    lt_density: float = 0.0,
) -> Structure:
    """About density * n tuples of each symbol between distinct variables ``v0..``."""
    universe = [f"v{i}" for i in range(n)]
    rows = {}
    for symbol, density in ((cfg.POINT_LE, le_density), (cfg.POINT_NE, ne_density), (cfg.POINT_LT, lt_density)):
        count = int(round(density * n)) if n > 1 else 0
        rows[symbol] = [tuple(universe[i] for i in _distinct_pair(n, rng)) for _ in range(count)]
    return Structure.from_labels(point_algebra_signature(), universe, rows)


def satisfiable_point_network(n: int, le_density: float, ne_density: float, rng: random.Random) -> Structure:
    """Like random_point_network, but every tuple holds under a hidden assignment with ties."""
    universe = [f"v{i}" for i in range(n)]
    values = [rng.randrange(max(2, n // 4)) for _ in range(n)]
    rows = {cfg.POINT_LE: [], cfg.POINT_NE: [], cfg.POINT_LT: []}
    if n > 1:
        for _ in range(int(round(le_density * n))):
            a, b = _distinct_pair(n, rng)
            if values[a] > values[b]:
                a, b = b, a
            rows[cfg.POINT_LE].append((universe[a], universe[b]))
        for _ in range(int(round(ne_density * n))):
            a, b = _distinct_pair(n, rng)
            if values[a] != values[b]:
                rows[cfg.POINT_NE].append((universe[a], universe[b]))
    return Structure.from_labels(point_algebra_signature(), universe, rows)


# ---------------------------------------------------------------------------
# Registry

DESCRIPTORS = {"pointalg": PointAlgebraDescriptor}

FINITE_TEMPLATES = {
    "k2": k2_template,
    "2sat": two_sat_template,
    "parity": parity_template,
}


def builtin_template(name: str) -> Template:
    """Resolve a built-in template name; ``cycle:<bits>`` builds an oriented cycle."""
    if name in FINITE_TEMPLATES:
        return FINITE_TEMPLATES[name]()
    if name in DESCRIPTORS:
        return DESCRIPTORS[name]()
    if name.startswith("cycle:"):
        return cycle_template(CycleOrientation.from_bits(name.split(":", 1)[1]))
    raise UnknownTemplateError(f"unknown template {name!r} (built-ins: {', '.join(cfg.BUILTIN_TEMPLATES)})")


def is_builtin(name: str) -> bool:
    return name in FINITE_TEMPLATES or name in DESCRIPTORS or name.startswith("cycle:") or name == "setcon"


def template_oracle(instance: Structure, template: Template, budget: int = cfg.HOM_SEARCH_BUDGET) -> Optional[bool]:
    """Exact satisfiability: homomorphism search for finite templates, SCC test for the point algebra."""
    if isinstance(template, Structure):
        return find_homomorphism(instance, template, budget) is not None
    if isinstance(template, PointAlgebraDescriptor):
        return point_algebra_oracle(instance)
    return None
