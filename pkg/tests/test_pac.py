import pytest
from hypothesis import HealthCheck, assume, given, settings, strategies as st

import peekac_pac
from peekac_ac import acc_holds, run_ac
from peekac_homs import find_homomorphism
from peekac_models import ACCEPT, FAIL, PASS, REJECT, SKIPPED, UNEXPLORED
from peekac_pac import (
    PeekOptions,
    pac_decide,
    pacc_holds,
    peek_variable,
    resolve_workers,
    template_name,
    template_representatives,
)
from peekac_structures import Structure
from peekac_templates import (
    PointAlgebraDescriptor,
    cnf2_to_instance,
    k2_template,
    random_2cnf,
    random_graph,
    random_point_network,
    two_sat_template,
)
from peekac_utils import PeekacError, make_rng
from strategies import MIXED, cycle_graph, structures, triangle

UNSAT_2CNF = [(1, 2), (1, -2), (-1, 2), (-1, -2)]


def test_triangle_is_rejected_at_its_first_variable():
    report = pac_decide(triangle(), k2_template(), workers=1)
    assert report.decision == REJECT
    assert report.rejecting_variable == "v0"
    assert [p.variable for p in report.variables] == ["v0", "v1", "v2"]
    assert all(r.outcome == UNEXPLORED for p in report.variables[1:] for r in p.results)


def test_even_cycle_is_accepted():
    report = pac_decide(cycle_graph(6), k2_template(), workers=1)
    assert report.accepted
    assert report.rejecting_variable is None
    assert report.counts() == {PASS: 6, FAIL: 0, SKIPPED: 0, UNEXPLORED: 0}


def test_unsatisfiable_2cnf_is_rejected():
    report = pac_decide(cnf2_to_instance(UNSAT_2CNF), two_sat_template(), workers=1)
    assert report.decision == REJECT
    assert report.rejecting_variable == "x1"
    assert [r.outcome for r in report.variables[0].results] == [FAIL, FAIL]


def test_passing_peek_skips_remaining_representatives():
    instance = cnf2_to_instance([(1, 2)])
    peeks = peek_variable(instance, two_sat_template(), [0, 1], 0, PeekOptions())
    assert [(r.representative, r.outcome) for r in peeks.results] == [(0, PASS), (1, SKIPPED)]
    full = peek_variable(instance, two_sat_template(), [0, 1], 0, PeekOptions.full())
    assert [r.outcome for r in full.results] == [PASS, PASS]


def test_full_report_runs_every_peek():
    report = pac_decide(triangle(), k2_template(), workers=1, options=PeekOptions.full())
    assert report.decision == REJECT
    assert report.counts() == {PASS: 0, FAIL: 3, SKIPPED: 0, UNEXPLORED: 0}


def test_traces_are_recorded_on_request():
    options = PeekOptions(record_traces=True)
    report = pac_decide(cycle_graph(4), k2_template(), workers=1, options=options)
    assert all(r.trace is not None for p in report.variables for r in p.results if r.outcome == PASS)


def test_report_lines():
    report = pac_decide(triangle(), k2_template(), workers=1, name="k2")
    lines = report.summary_lines()
    assert lines[:4] == [
        "decision reject",
        "template k2",
        "peeks pass 0 fail 1 skipped 0 unexplored 2",
        "rejecting_variable v0",
    ]
    assert lines[4] == "variable v0 0:fail"
    assert report.render_text().startswith("PAC decision: REJECT (template k2)")


def seeded_case(seed):
    rng = make_rng(seed)
    kind = seed % 3
    if kind == 0:
        return random_graph(rng.randint(4, 10), 0.35, rng), k2_template()
    if kind == 1:
        num_vars = rng.randint(3, 8)
        return cnf2_to_instance(random_2cnf(num_vars, rng.randint(2, 2 * num_vars), rng), num_vars), two_sat_template()
    return random_point_network(rng.randint(3, 10), 1.0, 0.4, rng), PointAlgebraDescriptor()


def test_reports_match_across_worker_counts_on_seeded_instances():
    for seed in range(100):
        instance, template = seeded_case(seed)
        sequential = pac_decide(instance, template, workers=1)
        for workers in (2, 8):
            assert pac_decide(instance, template, workers=workers) == sequential, seed


def test_worklist_seed_does_not_change_reports():
    for seed in range(10):
        instance, template = seeded_case(seed)
        expected = pac_decide(instance, template, workers=1, options=PeekOptions.full())
        shuffled = PeekOptions(short_circuit=False, reject_fast=False, order_seed=seed)
        assert pac_decide(instance, template, workers=1, options=shuffled) == expected


@pytest.mark.parametrize("workers", [2, 8])
def test_reports_do_not_depend_on_worker_count(workers):
    cases = [
        (triangle(), k2_template()),
        (cycle_graph(7), k2_template()),
        (cycle_graph(8), k2_template()),
        (cnf2_to_instance(UNSAT_2CNF + [(3, 4), (-4, 5)]), two_sat_template()),
    ]
    for instance, template in cases:
        for options in (PeekOptions(), PeekOptions.full()):
            sequential = pac_decide(instance, template, workers=1, options=options)
            parallel = pac_decide(instance, template, workers=workers, options=options)
            assert parallel == sequential


def test_point_algebra_runs_on_a_process_pool():
    instance = Structure.from_labels(
        PointAlgebraDescriptor().signature, ["a", "b", "c"], {"le": [("a", "b"), ("b", "c")], "ne": [("a", "c")]}
    )
    assert pac_decide(instance, PointAlgebraDescriptor(), workers=2) == pac_decide(
        instance, PointAlgebraDescriptor(), workers=1
    )


def test_workers_are_validated():
    assert resolve_workers(3) == 3
    assert resolve_workers(None) >= 1
    with pytest.raises(PeekacError):
        resolve_workers(0)
    with pytest.raises(PeekacError):
        pac_decide(triangle(), k2_template(), workers=-1)


def test_template_names_and_representatives():
    assert template_name(k2_template()) == "finite2"
    assert template_name(PointAlgebraDescriptor()) == "pointalg"
    assert template_representatives(two_sat_template()) == [0, 1]
    assert template_representatives(PointAlgebraDescriptor()) == [0]


def test_empty_instance_is_accepted():
    empty = Structure(k2_template().signature, (), {})
    assert pac_decide(empty, k2_template()).decision == ACCEPT


@settings(deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(structures(MIXED, max_size=4), structures(MIXED, max_size=3, max_tuples=5))
def test_pac_sits_between_homomorphism_and_ac(instance, template):
    accepted = pacc_holds(instance, template)
    if find_homomorphism(instance, template) is not None:
        assert accepted
    if accepted and instance.size:
        assert acc_holds(instance, template)


def test_pacc_holds_is_sequential_by_default(monkeypatch):
    def no_pool(*args, **kwargs):
        raise AssertionError("process pool started")

    monkeypatch.setattr(peekac_pac, "ProcessPoolExecutor", no_pool)
    assert pacc_holds(cycle_graph(6), k2_template())
    assert not pacc_holds(triangle(), k2_template())


@settings(deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(structures(MIXED, max_size=4), structures(MIXED, max_size=3, max_tuples=5))
def test_peeking_one_value_per_orbit_matches_peeking_every_value(instance, template):
    every_value = list(template.universe)
    full = PeekOptions.full()
    peeks = [peek_variable(instance, template, every_value, v, full) for v in range(instance.size)]
    assert pacc_holds(instance, template) == (not any(p.failed_all for p in peeks))


@settings(deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(structures(MIXED, max_size=4), structures(MIXED, max_size=3, max_tuples=5), st.data())
def test_adding_pins_only_shrinks_domains(instance, template, data):
    assume(instance.size > 0)
    pins = {}
    previous = run_ac(instance, template)
    for variable in data.draw(st.permutations(range(instance.size))):
        pins[instance.label_of(variable)] = data.draw(st.sampled_from(template.universe))
        current = run_ac(instance, template, dict(pins))
        if not previous.consistent:
            assert not current.consistent
        elif current.consistent:
            assert all(c & ~p == 0 for c, p in zip(current.domains, previous.domains))
        previous = current
