import numpy as np
import pytest

from negolab.errors import ScenarioError
from negolab.methods import Nash, settle
from negolab.scenario import load_scenario, parse_scenario, shipped_scenarios
from negolab.utility import LogLinear

BASE = """\
name = "t"
x0 = [0.1, 0.1]

[domain]
kind = "simplex"
dim = 2
budget = 1.0

[[party]]
family = "loglinear"
weights = [1.0, 0.0]

[[party]]
family = "loglinear"
weights = [0.0, 1.0]

[method]
kind = "nash"
"""


def test_canonical_round_trip():
    sc = load_scenario("nash_budget")
    assert sc.domain.budget == 1.0 and sc.domain.dim == 2
    assert isinstance(sc.method, Nash)
    assert all(isinstance(u, LogLinear) for u in sc.profile)
    np.testing.assert_allclose(sc.profile[0].weights, [1.0, 0.0])
    echo = sc.echo()
    assert echo["method"] == {"kind": "nash"}
    assert echo["solver"]["grid_depth"] == sc.solver.grid_depth


def test_every_shipped_scenario_loads_and_settles():
    names = shipped_scenarios()
    assert "nash_budget" in names
    for name in names:
        sc = load_scenario(name)
        x = settle(sc.method, sc.profile, sc.x0, sc.domain, sc.solver)
        assert x.shape == (sc.domain.dim,)


def test_weights_not_summing_to_one():
    text = BASE.replace("weights = [1.0, 0.0]", "weights = [0.5, 0.4]")
    with pytest.raises(ScenarioError) as err:
        parse_scenario(text)
    assert err.value.field == "party[0].weights"
    assert err.value.line == 11
    assert "party[0].weights" in str(err.value)


def test_three_parties_with_pareto_invariant_is_an_arity_error():
    text = BASE.replace('kind = "nash"', 'kind = "pareto-invariant"')
    text = text.replace("[method]", '[[party]]\nfamily = "linear"\ncoeffs = [1.0, 1.0]\n\n[method]')
    with pytest.raises(ScenarioError) as err:
        parse_scenario(text)
    assert err.value.field == "method.kind"
    assert "arity" in str(err.value)


@pytest.mark.parametrize(
    "old, new, field",
    [
        ('kind = "simplex"', 'kind = "sphere"', "domain.kind"),
        ("x0 = [0.1, 0.1]", "x0 = [0.9, 0.9]", "x0"),
        ("x0 = [0.1, 0.1]", "x0 = [0.1]", "x0"),
        ('family = "loglinear"\nweights = [0.0, 1.0]', 'family = "cubic"', "party[1].family"),
        ('kind = "nash"', 'kind = "dictatorial"\ndictator = 2', "method.kind"),
        ('kind = "nash"', 'kind = "nash"\n\n[solver]\ntol = -1.0', "solver"),
        ('kind = "nash"', 'kind = "nash"\n\n[solver]\nspeed = 3', "solver.speed"),
        ('kind = "nash"', 'kind = "nash"\n\n[manipulation]\nparty = 4', "manipulation.party"),
        ('kind = "nash"', 'kind = "nash"\n\n[manipulation]\nfamily = "peak-shift"\ngrid = [[0.1, 0.1]]', "manipulation.family"),
    ],
)
def test_validation_names_the_field(old, new, field):
    with pytest.raises(ScenarioError) as err:
        parse_scenario(BASE.replace(old, new, 1))
    assert err.value.field == field


def test_invalid_toml():
    with pytest.raises(ScenarioError):
        parse_scenario("x0 = [")


def test_missing_file():
    with pytest.raises(ScenarioError):
        load_scenario("/nonexistent/scenario.toml")


def test_wrapped_party():
    text = BASE.replace(
        'family = "loglinear"\nweights = [0.0, 1.0]',
        'family = "scaled"\na = 2.0\n[party.inner]\nfamily = "linear"\ncoeffs = [0.0, 1.0]',
    )
    sc = parse_scenario(text)
    assert sc.profile[1]([0.2, 0.3]) == pytest.approx(0.6)
    assert sc.parties[1]["inner"]["family"] == "linear"


def test_manipulation_table():
    text = BASE + '\n[manipulation]\nparty = 1\nfamily = "exponent"\ngrid = [1.0, 2.0]\nextend = true\n'
    sc = parse_scenario(text)
    fam = sc.manipulation.build(sc.x0)
    assert fam.grid == (1.0, 2.0) and fam.extend
    assert fam.baseline == (0.1, 0.1)
