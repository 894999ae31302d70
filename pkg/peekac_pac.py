"""
Peek arc consistency: pin every variable to every orbit representative of
the template, run arc consistency on each pinned instance, and reject when
some variable fails for all representatives.

Peeks of one variable form a task; tasks run sequentially or on a process
pool. The report is assembled in variable order, so it does not depend on
the number of workers or on completion order.
"""
import logging
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Dict, Hashable, List, Optional

from peekac_ac import Template, TemplateDescriptor, run_ac
from peekac_homs import orbit_representatives
from peekac_models import (
    ACCEPT,
    FAIL,
    PASS,
    REJECT,
    SKIPPED,
    UNEXPLORED,
    PeekReport,
    PeekResult,
    VariablePeeks,
)
from peekac_structures import Structure, check_instance_signature
from peekac_utils import PeekacError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PeekOptions:
    short_circuit: bool = True
    reject_fast: bool = True
    record_traces: bool = False
    order_seed: Optional[int] = None

    @classmethod
    def full(cls) -> "PeekOptions":
        return cls(short_circuit=False, reject_fast=False)


def template_representatives(template: Template) -> List[Hashable]:
    if isinstance(template, Structure):
        return [template.label_of(i) for i in orbit_representatives(template)]
    return list(template.representatives())


def template_name(template: Template) -> str:
    if isinstance(template, TemplateDescriptor):
        return template.name
    return f"finite{template.size}"


def peek_variable(
    instance: Structure, template: Template, representatives: List[Hashable], variable: int, options: PeekOptions
) -> VariablePeeks:
    """All peeks of one variable, in representative order."""
    label = instance.label_of(variable)
    results = []
    passed = False
    for rep in representatives:
        if passed and options.short_circuit:
            results.append(PeekResult(rep, SKIPPED))
            continue
        outcome = run_ac(
            instance, template, {label: rep}, record_trace=options.record_traces, order_seed=options.order_seed
        )
        results.append(PeekResult(rep, PASS if outcome.consistent else FAIL, outcome.trace))
        passed = passed or outcome.consistent
    logger.debug("peek %s: %s", label, " ".join(f"{r.representative}:{r.outcome}" for r in results))
    return VariablePeeks(label, tuple(results))


_WORKER_STATE: Dict[str, object] = {}


def _init_worker(instance, template, representatives, options):
    _WORKER_STATE.update(instance=instance, template=template, representatives=representatives, options=options)


def _run_task(variable: int) -> VariablePeeks:
    s = _WORKER_STATE
    return peek_variable(s["instance"], s["template"], s["representatives"], variable, s["options"])


def _unexplored(instance: Structure, representatives: List[Hashable], variable: int) -> VariablePeeks:
    return VariablePeeks(
        instance.label_of(variable), tuple(PeekResult(rep, UNEXPLORED) for rep in representatives)
    )


def _collect_sequential(instance, template, representatives, options) -> Dict[int, VariablePeeks]:
    done = {}
    for variable in range(instance.size):
        peeks = peek_variable(instance, template, representatives, variable, options)
        done[variable] = peeks
        if options.reject_fast and peeks.failed_all:
            break
    return done


def _collect_parallel(instance, template, representatives, options, workers: int) -> Dict[int, VariablePeeks]:
    """Every variable below the least rejecting one is always computed."""
    done: Dict[int, VariablePeeks] = {}
    cutoff = instance.size
    with ProcessPoolExecutor(
        max_workers=workers, initializer=_init_worker, initargs=(instance, template, representatives, options)
    ) as pool:
        futures = {pool.submit(_run_task, variable): variable for variable in range(instance.size)}
        for future in as_completed(futures):
            variable = futures[future]
            if future.cancelled() or variable > cutoff:
                continue
            peeks = future.result()
            done[variable] = peeks
            if options.reject_fast and peeks.failed_all and variable < cutoff:
                cutoff = variable
                for other, index in futures.items():
                    if index > cutoff:
                        other.cancel()
    return {v: p for v, p in done.items() if v <= cutoff}


def resolve_workers(workers: Optional[int]) -> int:
    if workers is None:
        return os.cpu_count() or 1
    if workers < 1:
        raise PeekacError(f"workers must be at least 1, got {workers}")
    return workers


def pac_decide(
    instance: Structure,
    template: Template,
    workers: Optional[int] = None,
    options: Optional[PeekOptions] = None,
    name: Optional[str] = None,
) -> PeekReport:
    options = options or PeekOptions()
    workers = resolve_workers(workers)
    signature = template.signature
    check_instance_signature(instance.signature, signature)
    representatives = template_representatives(template)
    if workers == 1 or instance.size <= 1:
        done = _collect_sequential(instance, template, representatives, options)
    else:
        done = _collect_parallel(instance, template, representatives, options, workers)

    variables = []
    rejecting = None
    for variable in range(instance.size):
        peeks = done.get(variable)
        if peeks is None:
            peeks = _unexplored(instance, representatives, variable)
        elif rejecting is None and peeks.failed_all:
            rejecting = peeks.variable
        variables.append(peeks)
    decision = REJECT if rejecting is not None else ACCEPT
    logger.debug("PAC %s on %d variables with %d representatives", decision, instance.size, len(representatives))
    return PeekReport(name or template_name(template), tuple(variables), decision, rejecting)


def pacc_holds(instance: Structure, template: Template, workers: Optional[int] = 1) -> bool:
    """PAC acceptance alone; sequential by default, as it runs once per enumerated instance."""
    return pac_decide(instance, template, workers=workers).accepted
