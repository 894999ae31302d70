import itertools

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from peekac_ac import acc_holds
from peekac_homs import find_homomorphism, is_polymorphism
from peekac_meta import (
    ac_solvability_check,
    characterize,
    empirical_ac_decides,
    empirical_pac_decides,
    enumerate_instances,
    is_pac_counterexample,
    pac_characterization_check,
    pp_expand,
    shrink_counterexample,
)
from peekac_pac import pacc_holds
from peekac_pp import PPFormula, atom, conj, exists, random_pp_formula
from peekac_structures import Signature, Structure
from peekac_templates import (
    CycleOrientation,
    cycle_template,
    dual_discriminator,
    find_median_order,
    graph_structure,
    is_slice_semilattice,
    k2_template,
    median_op,
    parity_template,
    two_sat_template,
)
from peekac_utils import CapExceeded, SearchBudgetExceeded, SignatureError, make_rng
from strategies import triangle

EDGE = Signature.of([("E", 2)])
PAIRS = list(itertools.product((0, 1), repeat=2))


def binary_templates():
    for mask in range(1 << len(PAIRS)):
        edges = [p for i, p in enumerate(PAIRS) if mask >> i & 1]
        yield edges, Structure(EDGE, (0, 1), {"E": edges})


def test_ac_characterization_on_two_element_digraphs():
    failing = []
    for edges, template in binary_templates():
        solvable = ac_solvability_check(template)
        assert solvable == empirical_ac_decides(template), edges
        if not solvable:
            failing.append(sorted(edges))
    assert failing == [[(0, 1), (1, 0)]]


def test_loop_defeats_ac_but_not_pac_on_k2():
    loop = Structure(EDGE, ("a",), {"E": [(0, 0)]})
    assert acc_holds(loop, k2_template())
    assert is_pac_counterexample(loop, k2_template()) is False
    assert find_homomorphism(loop, k2_template()) is None


@pytest.mark.parametrize("template", [k2_template(), two_sat_template()])
def test_ind_powers_of_pac_solvable_templates_map_back(template):
    assert pac_characterization_check(template, 3) == [(1, True), (2, True), (3, True)]


def test_parity_fails_the_ind_check_at_two():
    assert pac_characterization_check(parity_template(), 3) == [(1, True), (2, False)]


def test_parity_characterization_finds_a_counterexample():
    report = characterize(parity_template(), "parity", n_max=2, max_vars=2, max_tuples=2)
    assert not report.ac_solvable
    assert report.pac_bounded == [(1, True), (2, False)]
    counterexample = report.empirical.counterexample
    assert counterexample is not None
    assert pacc_holds(counterexample, parity_template())
    assert find_homomorphism(counterexample, parity_template()) is None
    assert counterexample.size <= 8
    assert report.to_line() == "template parity ac n pac_n 1:y 2:n empirical n"
    assert "PAC does not decide CSP" in report.render_text()


def test_characterize_k2():
    report = characterize(k2_template(), "k2", n_max=2)
    assert report.to_line() == "template k2 ac n pac_n 1:y 2:y empirical y"
    assert report.empirical.checked == report.empirical.agreements
    assert "bounded evidence" in report.render_text()


def test_shrinking_keeps_a_counterexample():
    report = characterize(parity_template(), "parity", n_max=2, max_vars=1, max_tuples=1, shrink=False)
    raw = report.empirical.counterexample
    shrunk = shrink_counterexample(raw, parity_template())
    assert is_pac_counterexample(shrunk, parity_template())
    assert shrunk.tuple_count() <= raw.tuple_count()
    assert shrunk.size <= raw.size


def test_enumeration_is_up_to_renaming():
    instances = list(enumerate_instances(EDGE, max_vars=2, max_tuples=2))
    assert len(instances) == 6
    for instance in instances:
        used = {v for t in instance.relations["E"] for v in t}
        assert used == set(range(instance.size))
    with pytest.raises(SearchBudgetExceeded):
        list(enumerate_instances(EDGE, max_vars=3, max_tuples=3, budget=2))


def test_empirical_pac_on_k2():
    result = empirical_pac_decides(k2_template(), 3, 3, extra_instances=[triangle()])
    assert result.decides
    assert result.checked == result.agreements
    assert not is_pac_counterexample(triangle(), k2_template())


HOM_EQUIVALENT_TO_K2 = {
    "square": [(0, 1), (1, 2), (2, 3), (3, 0)],
    "path": [(0, 1), (1, 2)],
    "k23": [(a, b) for a in (0, 1) for b in (2, 3, 4)],
}


@pytest.mark.parametrize("name", sorted(HOM_EQUIVALENT_TO_K2))
def test_pac_decides_bipartite_graphs_equivalent_to_k2(name):
    edges = HOM_EQUIVALENT_TO_K2[name]
    graph = graph_structure(1 + max(v for edge in edges for v in edge), edges)
    k2 = k2_template()
    assert find_homomorphism(graph, k2) is not None
    assert find_homomorphism(k2, graph) is not None
    assert empirical_pac_decides(graph, 3, 3).decides
    assert empirical_pac_decides(k2, 3, 3).decides


def test_slice_semilattice_polymorphism_means_pac_decides():
    alternating = CycleOrientation.from_bits("1010")
    cases = [
        (k2_template(), dual_discriminator(k2_template().universe)),
        (two_sat_template(), dual_discriminator(two_sat_template().universe)),
        (cycle_template(alternating), median_op(find_median_order(alternating))),
    ]
    for template, operation in cases:
        assert is_slice_semilattice(operation)
        assert is_polymorphism(operation, template)
        assert empirical_pac_decides(template).decides


def test_characterize_respects_the_universe_cap():
    with pytest.raises(CapExceeded):
        characterize(k2_template(), "k2", n_max=1, max_universe=1)
    with pytest.raises(CapExceeded):
        pac_characterization_check(two_sat_template(), 1, max_universe=1)
    assert characterize(k2_template(), "k2", n_max=1, max_universe=2).ac_solvable is False


def test_pp_expand_adds_defined_relations():
    path = PPFormula(("v1", "v2"), exists("w", conj(atom("E", "v1", "w"), atom("E", "w", "v2"))))
    expanded = pp_expand(k2_template(), [("P2", path)])
    assert expanded.signature.arity("P2") == 2
    assert expanded.relations["P2"] == frozenset({(0, 0), (1, 1)})
    with pytest.raises(SignatureError):
        pp_expand(k2_template(), [("E", path)])
    with pytest.raises(SignatureError):
        pp_expand(k2_template(), [("B", PPFormula((), exists("w", atom("E", "w", "w"))))])


@settings(max_examples=10, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 10 ** 6), st.integers(1, 2), st.integers(1, 3))
def test_pac_still_decides_pp_expansions_of_k2(seed, arity, depth):
    formula = random_pp_formula(k2_template().signature, make_rng(seed), depth, arity)
    expanded = pp_expand(k2_template(), [("D", formula)])
    assert empirical_pac_decides(expanded, 3, 3).decides
