import pytest

from ckrg.birkhoff import decompose
from ckrg.characters import conv_unit, unit_mass
from ckrg.coeffs import series
from ckrg.hierarchy import (
    TimeVector,
    apply_times,
    flow_commutativity,
    hierarchy_residual,
    reduction_check,
)
from ckrg.rg import beta_function, check_rg_equations
from ckrg.toy import LADDER, build_character
from ckrg.trees import TreeAlgebra, parse_tree

S = series
DOT, L2 = parse_tree("[]"), parse_tree("[[]]")


class Dressed:
    def __init__(self, base, depth):
        self.times = TimeVector(depth)
        self.pair = decompose(apply_times(unit_mass(base.phi), self.times))
        self.beta = beta_function(self.pair)


@pytest.fixture(scope="module")
def dressed(any_rule):
    return Dressed(any_rule, 3)


def test_time_vector():
    tv = TimeVector(3)
    assert tv.names() == ["t", "tau2", "tau3"]
    assert tv.angle() == S("eps*t + eps^2*tau2 + eps^3*tau3")
    with pytest.raises(ValueError):
        TimeVector(0)


def test_dressing_examples(ladder):
    base = unit_mass(ladder.phi)
    assert apply_times(base, TimeVector(2))(DOT) == S("g*E*Etau2/eps")
    # depth one is exactly the unit-mass shift
    assert apply_times(base, TimeVector(1)).equals(ladder.phi)
    unit = conv_unit(ladder.algebra)
    assert apply_times(unit, TimeVector(3)).equals(unit)


def test_counterterm_is_independent_of_higher_times(ladder):
    pair = Dressed(ladder, 2).pair
    assert pair.phi_minus(DOT) == S("-g/eps")
    assert pair.phi_minus(DOT).differentiate("tau2").is_zero()


@pytest.mark.parametrize("index", [0, 1, 2])
def test_hierarchy_flows(dressed, index):
    report = hierarchy_residual(dressed.pair, dressed.beta, dressed.times)[index]
    assert report.passed, report.summary()
    assert {r.n for r in report.residuals} == {1, 2, 3}


def test_first_flow_is_the_unit_mass_flow(any_rule, dressed):
    reports = hierarchy_residual(dressed.pair, dressed.beta, dressed.times)
    flow = [r for r in reports[1].residuals if r.n == 1]
    assert flow and all(r.is_zero() for r in flow)
    assert all(r.passed for r in check_rg_equations(dressed.pair, dressed.beta))


def test_flows_commute(dressed):
    report = flow_commutativity(dressed.pair, dressed.times)
    assert report.passed, report.summary()
    assert any(r.key.endswith("@t,tau2") for r in report.residuals)


def test_switching_off_higher_times_reproduces_the_single_time_results(any_rule, dressed):
    reduced, equal = reduction_check(dressed.pair, any_rule.pair, dressed.beta, any_rule.beta,
                                     dressed.times)
    assert reduced.passed, reduced.summary()
    assert equal.passed, equal.summary()


def test_reduction_detects_a_mismatch(ladder, mellin):
    dressed = Dressed(ladder, 2)
    reduced, equal = reduction_check(dressed.pair, mellin.pair, dressed.beta, mellin.beta,
                                     dressed.times)
    assert not reduced.passed
    assert not equal.passed


def test_unit_character_hierarchy():
    algebra = TreeAlgebra(3)
    tv = TimeVector(3)
    pair = decompose(apply_times(conv_unit(algebra), tv))
    beta = beta_function(pair)
    assert all(r.passed for r in hierarchy_residual(pair, beta, tv))
    assert flow_commutativity(pair, tv).passed


def test_larger_depth():
    algebra = TreeAlgebra(3)
    tv = TimeVector(4)
    phi = build_character(LADDER, algebra)
    pair = decompose(apply_times(unit_mass(phi), tv))
    beta = beta_function(pair)
    assert all(r.passed for r in hierarchy_residual(pair, beta, tv))
