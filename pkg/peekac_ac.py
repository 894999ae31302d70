"""
Arc consistency over finite templates and over template descriptors.

Both engines compute the same kind of fixpoint: every variable carries a
label (a bitmask of candidate template values for finite templates, a
descriptor lattice label otherwise) and every constraint tuple repeatedly
narrows the labels at its positions until nothing changes. Positions of a
scope that repeat a variable are projected independently, so a consistent
fixpoint is exactly a homomorphism into the power structure.
"""
import logging
from collections import deque
from typing import Dict, Hashable, List, Mapping, Optional, Sequence, Tuple, Union

from peekac_homs import orbit_representatives, support_masks
from peekac_models import CONSISTENT, INCONSISTENT, PropagationOutcome, ShrinkEvent
from peekac_structures import Signature, Structure, check_instance_signature
from peekac_utils import StructureError, bit, full_mask, make_rng

logger = logging.getLogger(__name__)


class TemplateDescriptor:
    """Finite stand-in for a (possibly infinite) template.

    Labels are integers of a finite meet-semilattice; subclasses supply the
    orbit representatives, the pin label of each representative and the
    per-relation propagation rule. The default lattice is bitmasks under
    intersection with bottom 0.
    """

    name = "descriptor"
    signature: Signature = Signature(())
    top = 0
    bottom = 0

    def representatives(self) -> List[Hashable]:
        raise NotImplementedError

    def pin(self, representative: Hashable) -> int:
        raise NotImplementedError

    def propagate(self, symbol: str, labels: Sequence[int]) -> Tuple[int, ...]:
        """Refined label for each scope position given the current labels of the scope."""
        raise NotImplementedError

    def meet(self, left: int, right: int) -> int:
        return left & right

    def is_bottom(self, label: int) -> bool:
        return label == self.bottom

    def label_name(self, label: int) -> str:
        return str(label)


class FiniteDescriptor(TemplateDescriptor):
    """A finite template seen through the descriptor interface; labels are value bitmasks."""

    def __init__(self, template: Structure, name: Optional[str] = None):
        self.template = template
        self.name = name or "finite"
        self.signature = template.signature
        self.top = full_mask(template.size)
        self.bottom = 0
        self._tuples = {symbol: template.tuples(symbol) for symbol in template.signature.names}

    def representatives(self) -> List[Hashable]:
        return [self.template.label_of(i) for i in orbit_representatives(self.template)]

    def pin(self, representative: Hashable) -> int:
        return bit(self.template.index_of(representative))

    def propagate(self, symbol: str, labels: Sequence[int]) -> Tuple[int, ...]:
        return tuple(support_masks(list(labels), tuple(range(len(labels))), self._tuples[symbol]))

    def label_name(self, label: int) -> str:
        values = [str(self.template.label_of(i)) for i in range(self.template.size) if label >> i & 1]
        return "{" + ",".join(values) + "}"


class _Propagator:
    """Worklist fixpoint shared by both engines."""

    def __init__(self, instance: Structure, revise, meet, is_bottom, record_trace: bool, order_seed: Optional[int]):
        self.instance = instance
        self.revise = revise
        self.meet = meet
        self.is_bottom = is_bottom
        self.trace: Optional[List[ShrinkEvent]] = [] if record_trace else None
        self.rng = make_rng(order_seed) if order_seed is not None else None
        self.constraints = instance.constraints()
        self.repeated = [len(set(scope)) != len(scope) for _, scope in self.constraints]
        self.watch: List[List[int]] = [[] for _ in range(instance.size)]
        for ci, (_, scope) in enumerate(self.constraints):
            for var in dict.fromkeys(scope):
                self.watch[var].append(ci)
        self.revisions = 0

    def _narrow(self, ci: int, labels: List[int]) -> Tuple[bool, List[int]]:
        """Apply one revision in place; return (emptied, changed variables)."""
        name, scope = self.constraints[ci]
        self.revisions += 1
        refined = self.revise(name, [labels[var] for var in scope])
        changed = []
        for position, var in enumerate(scope):
            narrowed = self.meet(labels[var], refined[position])
            if narrowed == labels[var]:
                continue
            if self.trace is not None:
                self.trace.append(ShrinkEvent(ci, position, labels[var], narrowed))
            labels[var] = narrowed
            if var not in changed:
                changed.append(var)
            if self.is_bottom(narrowed):
                return True, changed
        return False, changed

    def run_worklist(self, labels: List[int]) -> bool:
        order = list(range(len(self.constraints)))
        if self.rng is not None:
            self.rng.shuffle(order)
        queue = deque(order)
        queued = set(order)
        while queue:
            ci = queue.popleft()
            queued.discard(ci)
            emptied, changed = self._narrow(ci, labels)
            if emptied:
                return False
            fresh = []
            for var in changed:
                for other in self.watch[var]:
                    if other in queued or (other == ci and not self.repeated[ci]):
                        continue
                    queued.add(other)
                    fresh.append(other)
            if self.rng is not None:
                self.rng.shuffle(fresh)
            queue.extend(fresh)
        return True

    def run_naive(self, labels: List[int]) -> bool:
        """Sweep every constraint until a full sweep changes nothing."""
        changed = True
        while changed:
            changed = False
            for ci in range(len(self.constraints)):
                emptied, narrowed = self._narrow(ci, labels)
                if emptied:
                    return False
                changed = changed or bool(narrowed)
        return True

    def outcome(self, labels: List[int], naive: bool) -> PropagationOutcome:
        ok = self.run_naive(labels) if naive else self.run_worklist(labels)
        trace = tuple(self.trace) if self.trace is not None else None
        status = CONSISTENT if ok else INCONSISTENT
        logger.debug(
            "AC %s after %d revisions over %d constraints", status, self.revisions, len(self.constraints)
        )
        return PropagationOutcome(status, tuple(labels), trace, self.revisions)


def initial_domains(instance: Structure, template: Structure, pins: Optional[Mapping[Hashable, Hashable]] = None) -> List[int]:
    """Full domains, with each pinned variable (by label) reduced to its pinned template value."""
    domains = [full_mask(template.size)] * instance.size
    for variable, value in (pins or {}).items():
        if not template.has_element(value):
            raise StructureError(f"pin value {value!r} is not in the template universe")
        domains[instance.index_of(variable)] = bit(template.index_of(value))
    return domains


def ac_finite(
    instance: Structure,
    template: Structure,
    pins: Optional[Mapping[Hashable, Hashable]] = None,
    naive: bool = False,
    order_seed: Optional[int] = None,
    record_trace: bool = False,
) -> PropagationOutcome:
    """Greatest arc-consistent domain map of ``instance`` into ``template``.

    When consistent, the domains form a homomorphism into the power structure
    and every such homomorphism is pointwise contained in them.
    """
    check_instance_signature(instance.signature, template.signature)
    domains = initial_domains(instance, template, pins)
    tuples = {name: template.tuples(name) for name in instance.signature.names}

    def revise(name: str, labels: List[int]) -> List[int]:
        return support_masks(labels, tuple(range(len(labels))), tuples[name])

    if template.size == 0 and instance.size:
        return PropagationOutcome(INCONSISTENT, tuple(domains), () if record_trace else None)
    propagator = _Propagator(
        instance, revise, lambda a, b: a & b, lambda d: d == 0, record_trace, order_seed
    )
    return propagator.outcome(domains, naive)


def ac_descriptor(
    instance: Structure,
    descriptor: TemplateDescriptor,
    pins: Optional[Mapping[Hashable, Hashable]] = None,
    naive: bool = False,
    order_seed: Optional[int] = None,
    record_trace: bool = False,
) -> PropagationOutcome:
    """Fixpoint of ``descriptor.propagate``; pinned variables start at ``descriptor.pin(rep)``."""
    check_instance_signature(instance.signature, descriptor.signature)
    known = set(descriptor.representatives())
    labels = [descriptor.top] * instance.size
    for variable, representative in (pins or {}).items():
        if representative not in known:
            raise StructureError(f"{representative!r} is not a representative of {descriptor.name}")
        labels[instance.index_of(variable)] = descriptor.pin(representative)
    propagator = _Propagator(
        instance, descriptor.propagate, descriptor.meet, descriptor.is_bottom, record_trace, order_seed
    )
    return propagator.outcome(labels, naive)


Template = Union[Structure, TemplateDescriptor]


def run_ac(instance: Structure, template: Template, pins=None, **options) -> PropagationOutcome:
    if isinstance(template, Structure):
        return ac_finite(instance, template, pins, **options)
    return ac_descriptor(instance, template, pins, **options)


def acc_holds(instance: Structure, template: Template) -> bool:
    return run_ac(instance, template).consistent


def replay_trace(instance: Structure, initial: Sequence[int], trace: Sequence[ShrinkEvent]) -> Tuple[int, ...]:
    """Re-apply recorded shrink events; each event must start from the label it recorded."""
    constraints = instance.constraints()
    labels = list(initial)
    for event in trace:
        var = constraints[event.constraint][1][event.position]
        if labels[var] != event.old:
            raise StructureError(f"trace event {event} does not match the replayed state")
        labels[var] = event.new
    return tuple(labels)


def domains_as_labels(instance: Structure, template: Structure, domains: Sequence[int]) -> Dict[Hashable, List[Hashable]]:
    return {
        instance.label_of(var): [template.label_of(i) for i in range(template.size) if mask >> i & 1]
        for var, mask in enumerate(domains)
    }
