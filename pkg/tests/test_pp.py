import itertools
import random

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from peekac_pp import Equals, PPFormula, atom, conj, eval_pp, exists, node_depth, random_pp_formula, satisfies
from peekac_templates import k2_template, two_sat_template
from peekac_utils import SignatureError, StructureError
from strategies import MIXED, structure, structures


def test_two_sat_conjunction_defines_equality():
    formula = PPFormula(("v1", "v2"), conj(atom("R01", "v1", "v2"), atom("R01", "v2", "v1")))
    assert eval_pp(formula, two_sat_template()) == frozenset({(0, 0), (1, 1)})


def test_existential_path_of_length_two_over_k2():
    formula = PPFormula(("v1", "v2"), exists("w", conj(atom("E", "v1", "w"), atom("E", "w", "v2"))))
    assert eval_pp(formula, k2_template()) == frozenset({(0, 0), (1, 1)})


def test_equality_atom_and_repeated_variable():
    k2 = k2_template()
    assert eval_pp(PPFormula(("v1", "v2"), Equals("v1", "v2")), k2) == frozenset({(0, 0), (1, 1)})
    assert eval_pp(PPFormula(("v1",), atom("E", "v1", "v1")), k2) == frozenset()


def test_free_variable_not_in_body_ranges_over_universe():
    b = structure([("U", 1)], ("a", "b"), {"U": [("a",)]})
    assert eval_pp(PPFormula(("v1", "v2"), atom("U", "v1")), b) == frozenset({(0, 0), (0, 1)})


def test_repeated_free_variable_projects_diagonal():
    formula = PPFormula(("v1", "v1"), exists("w", atom("E", "v1", "w")))
    assert eval_pp(formula, k2_template()) == frozenset({(0, 0), (1, 1)})


@pytest.mark.parametrize(
    "formula,error",
    [
        (PPFormula(("v1",), atom("F", "v1")), SignatureError),
        (PPFormula(("v1",), atom("E", "v1")), SignatureError),
        (PPFormula(("v1",), atom("E", "v1", "w")), StructureError),
        (PPFormula(("v1",), exists("v1", atom("E", "v1", "v1"))), StructureError),
        (PPFormula(("v1",), exists(["w", "w"], atom("E", "v1", "w"))), StructureError),
    ],
)
def test_malformed_formulas_are_rejected(formula, error):
    with pytest.raises(error):
        eval_pp(formula, k2_template())


def test_depth_counts_nesting():
    body = exists("w", conj(atom("E", "v1", "w"), conj(atom("E", "w", "v1"))))
    assert node_depth(body) == 4
    assert PPFormula(("v1",), atom("E", "v1", "v1")).depth() == 1


@settings(deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(structures(MIXED, max_size=3), st.integers(0, 10 ** 6), st.integers(1, 3), st.integers(1, 2))
def test_eval_matches_model_checking(b, seed, depth, arity):
    formula = random_pp_formula(b.signature, random.Random(seed), depth, arity)
    expected = {
        values
        for values in itertools.product(range(b.size), repeat=arity)
        if satisfies(formula.body, b, dict(zip(formula.free, values)))
    }
    assert eval_pp(formula, b) == frozenset(expected)
