"""
Bounded, executable versions of the algebraic characterizations of when AC
and PAC decide CSP(B) for a finite template B.

Failures are conclusive; passes are evidence up to the stated bound.
"""
import itertools
import logging
from dataclasses import replace
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import peekac_config as cfg
from peekac_ac import acc_holds
from peekac_homs import find_homomorphism
from peekac_models import CharacterizationReport, EmpiricalResult
from peekac_pac import pacc_holds
from peekac_pp import PPFormula, eval_pp
from peekac_structures import Signature, Structure, induced_substructure, ind_peek_power, power_structure
from peekac_utils import PeekacError, SearchBudgetExceeded, SignatureError

logger = logging.getLogger(__name__)


def ac_solvability_check(template: Structure, max_universe: int = cfg.MAX_POWER_UNIVERSE) -> bool:
    """AC decides CSP(B) iff the power structure maps back to B."""
    return find_homomorphism(power_structure(template, max_universe), template) is not None


def _bounded_ind_check(
    template: Structure, n_max: int, max_universe: int = cfg.MAX_POWER_UNIVERSE
) -> Tuple[List[Tuple[int, bool]], Optional[Structure]]:
    powered = power_structure(template, max_universe)
    results = []
    for n in range(1, n_max + 1):
        ind = ind_peek_power(powered, n)
        holds = find_homomorphism(ind, template) is not None
        logger.debug("Ind power n=%d (%d elements) -> template: %s", n, ind.size, holds)
        results.append((n, holds))
        if not holds:
            return results, ind
    return results, None


def pac_characterization_check(
    template: Structure, n_max: int = cfg.DEFAULT_NMAX, max_universe: int = cfg.MAX_POWER_UNIVERSE
) -> List[Tuple[int, bool]]:
    """(n, holds) for n = 1..n_max, stopping at the first n where Ind(P(B)^n) does not map to B."""
    return _bounded_ind_check(template, n_max, max_universe)[0]


def _canonical_key(tuples: Sequence[Tuple[str, Tuple[int, ...]]], num_vars: int) -> Tuple:
    best = None
    for perm in itertools.permutations(range(num_vars)):
        key = tuple(sorted((name, tuple(perm[v] for v in t)) for name, t in tuples))
        if best is None or key < best:
            best = key
    return best


def enumerate_instances(
    signature: Signature,
    max_vars: int = cfg.DEFAULT_ENUM_VARS,
    max_tuples: int = cfg.DEFAULT_ENUM_TUPLES,
    budget: int = cfg.ENUM_BUDGET,
) -> Iterator[Structure]:
    """Every instance with 1..max_vars variables, all used, and 1..max_tuples tuples.

    One instance per class up to variable renaming: the one whose sorted tuple
    list is least among all renamings.
    """
    examined = 0
    for num_vars in range(1, max_vars + 1):
        candidates = [
            (name, t) for name, arity in signature.symbols for t in itertools.product(range(num_vars), repeat=arity)
        ]
        universe = tuple(f"a{i}" for i in range(num_vars))
        for count in range(1, max_tuples + 1):
            for chosen in itertools.combinations(candidates, count):
                examined += 1
                if examined > budget:
                    raise SearchBudgetExceeded(f"instance enumeration exceeded {budget} candidates")
                used = {v for _, t in chosen for v in t}
                if len(used) != num_vars:
                    continue
                if tuple(sorted(chosen)) != _canonical_key(chosen, num_vars):
                    continue
                relations = {name: [] for name in signature.names}
                for name, t in chosen:
                    relations[name].append(t)
                yield Structure(signature, universe, relations)


def is_pac_counterexample(instance: Structure, template: Structure) -> bool:
    """PAC accepts although no homomorphism exists."""
    return pacc_holds(instance, template) and find_homomorphism(instance, template) is None


def empirical_pac_decides(
    template: Structure,
    max_vars: int = cfg.DEFAULT_ENUM_VARS,
    max_tuples: int = cfg.DEFAULT_ENUM_TUPLES,
    extra_instances: Iterable[Structure] = (),
) -> EmpiricalResult:
    """Compare PAC with homomorphism search on every enumerated instance, then on ``extra_instances``.

    Stops at the first instance where PAC accepts but no homomorphism exists.
    """
    checked = agreements = 0
    instances = itertools.chain(enumerate_instances(template.signature, max_vars, max_tuples), extra_instances)
    for instance in instances:
        checked += 1
        accepted = pacc_holds(instance, template)
        satisfiable = find_homomorphism(instance, template) is not None
        if accepted == satisfiable:
            agreements += 1
            continue
        if satisfiable:
            raise PeekacError("PAC rejected a satisfiable instance")
        logger.info("PAC counterexample after %d instances: %d elements", checked, instance.size)
        return EmpiricalResult(max_vars, max_tuples, checked, agreements, instance)
    return EmpiricalResult(max_vars, max_tuples, checked, agreements)


def empirical_ac_decides(
    template: Structure,
    max_vars: int = cfg.DEFAULT_ENUM_VARS,
    max_tuples: int = cfg.DEFAULT_ENUM_TUPLES + 1,
) -> bool:
    """ACC implies a homomorphism on every enumerated instance."""
    for instance in enumerate_instances(template.signature, max_vars, max_tuples):
        if acc_holds(instance, template) and find_homomorphism(instance, template) is None:
            return False
    return True


def pp_expand(template: Structure, definitions: Sequence[Tuple[str, PPFormula]]) -> Structure:
    """Add one relation per (name, formula); formulas are read over the original signature."""
    expanded = template
    for name, formula in definitions:
        if name in expanded.signature:
            raise SignatureError(f"symbol {name} is already in the signature")
        if formula.arity < 1:
            raise SignatureError(f"definition of {name} has no free variables")
        expanded = expanded.with_relation(name, formula.arity, eval_pp(formula, template))
    return expanded


def _without_tuple(instance: Structure, name: str, t: Tuple[int, ...]) -> Structure:
    relations = dict(instance.relations)
    relations[name] = instance.relations[name] - {t}
    return Structure(instance.signature, instance.universe, relations)


def shrink_counterexample(instance: Structure, template: Structure, rounds: int = cfg.SHRINK_ROUNDS) -> Structure:
    """Greedily drop tuples, then elements, while the instance stays a PAC counterexample."""
    current = instance
    for _ in range(rounds):
        before = (current.size, current.tuple_count())
        for name, t in current.constraints():
            trial = _without_tuple(current, name, t)
            if is_pac_counterexample(trial, template):
                current = trial
        for element in reversed(range(current.size)):
            trial = induced_substructure(current, [e for e in range(current.size) if e != element])
            if is_pac_counterexample(trial, template):
                current = trial
        if (current.size, current.tuple_count()) == before:
            break
    logger.debug(
        "shrunk counterexample from %d/%d to %d/%d elements/tuples",
        instance.size, instance.tuple_count(), current.size, current.tuple_count(),
    )
    return current


def characterize(
    template: Structure,
    template_id: str,
    n_max: int = cfg.DEFAULT_NMAX,
    max_vars: int = cfg.DEFAULT_ENUM_VARS,
    max_tuples: int = cfg.DEFAULT_ENUM_TUPLES,
    shrink: bool = True,
    max_universe: int = cfg.MAX_POWER_UNIVERSE,
) -> CharacterizationReport:
    """AC solvability, the bounded Ind check and the empirical PAC check in one report.

    A failing Ind(P(B)^n) has the PACC through its coordinate projections, so
    it is handed to the empirical check as an extra candidate.
    """
    ac = ac_solvability_check(template, max_universe)
    bounded, failing = _bounded_ind_check(template, n_max, max_universe)
    extras = [failing] if failing is not None else []
    empirical = empirical_pac_decides(template, max_vars, max_tuples, extras)
    if empirical.counterexample is not None and shrink:
        empirical = replace(empirical, counterexample=shrink_counterexample(empirical.counterexample, template))
    return CharacterizationReport(template_id, ac, bounded, empirical)
