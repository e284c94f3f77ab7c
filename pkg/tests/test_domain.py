import pytest
from hypothesis import given, strategies as st

from slabheat.domain import (
    CallableProfile,
    Constant,
    EvalPoint,
    PiecewiseLinear,
    Polynomial,
    SingleMode,
    SlabProblem,
    check_point,
    eval_profile,
    validate_problem,
)
from slabheat.errors import (
    MalformedProfile,
    NonPositiveDiffusivity,
    NonPositiveLength,
    OutOfDomain,
)


def test_valid_problem_is_returned_unchanged():
    p = SlabProblem(1.0, 1.0, SingleMode(1, 1.0))
    assert validate_problem(p) is p
    assert validate_problem(validate_problem(p)) is p


@pytest.mark.parametrize(
    "problem, error, field",
    [
        (SlabProblem(0.0, 1.0, Constant(1.0)), NonPositiveLength, "length"),
        (SlabProblem(float("nan"), 1.0, Constant(1.0)), NonPositiveLength, "length"),
        (SlabProblem(1.0, -0.5, Constant(1.0)), NonPositiveDiffusivity, "diffusivity"),
        (SlabProblem(1.0, float("inf"), Constant(1.0)), NonPositiveDiffusivity, "diffusivity"),
        (SlabProblem(1.0, 1.0, SingleMode(0, 1.0)), MalformedProfile, "initial_profile.mode"),
        (SlabProblem(1.0, 1.0, Polynomial([])), MalformedProfile, "initial_profile.coefficients"),
        (SlabProblem(1.0, 1.0, Constant(float("nan"))), MalformedProfile, "initial_profile.value"),
        (SlabProblem(1.0, 1.0, "not a profile"), MalformedProfile, "initial_profile"),
    ],
)
def test_invalid_problems_name_the_field(problem, error, field):
    with pytest.raises(error) as info:
        validate_problem(problem)
    assert info.value.field == field


@pytest.mark.parametrize(
    "knots, values",
    [
        ([0.0, 0.5, 0.5, 1.0], [0, 1, 1, 0]),   # not strictly increasing
        ([-0.1, 1.0], [0, 0]),                # before 0
        ([0.0, 1.5], [0, 0]),                 # beyond L
        ([0.5], [1.0]),                       # too few
    ],
)
def test_piecewise_knot_rules(knots, values):
    with pytest.raises(MalformedProfile):
        validate_problem(SlabProblem(1.0, 1.0, PiecewiseLinear(knots, values)))


def test_eval_profile_examples():
    assert eval_profile(SingleMode(1, 1.0), 0.5, 1.0) == 1.0
    assert eval_profile(Constant(3.0), 0.7, 1.0) == 3.0
    assert eval_profile(PiecewiseLinear([0.0, 1.0], [0.0, 2.0]), 0.25, 1.0) == 0.5
    assert eval_profile(Polynomial([1.0, 2.0, 3.0]), 0.5, 1.0) == 1.0 + 1.0 + 0.75
    assert eval_profile(CallableProfile(lambda x: 2 * x), 0.25, 1.0) == 0.5


def test_eval_profile_clamps_tiny_overshoot_and_rejects_the_rest():
    assert eval_profile(Polynomial([0.0, 1.0]), 1.0 + 5e-13, 1.0) == 1.0
    assert eval_profile(Polynomial([0.0, 1.0]), -5e-13, 1.0) == 0.0
    with pytest.raises(OutOfDomain):
        eval_profile(Constant(1.0), 1.0 + 1e-9, 1.0)
    with pytest.raises(OutOfDomain):
        eval_profile(Constant(1.0), -0.1, 1.0)


def test_check_point_rejects_negative_time():
    with pytest.raises(OutOfDomain):
        check_point(EvalPoint(0.5, -1e-3), 1.0)
    assert check_point(EvalPoint(1.0 + 1e-13, 0.0), 1.0).x == 1.0


knots = st.lists(st.integers(0, 1000), min_size=2, max_size=8, unique=True).map(lambda ks: [k / 1000 for k in sorted(ks)])


@given(knots, st.data())
def test_piecewise_exact_at_knots_and_between_neighbours(ks, data):
    vals = data.draw(st.lists(st.floats(-10, 10), min_size=len(ks), max_size=len(ks)))
    f = PiecewiseLinear(ks, vals)
    validate_problem(SlabProblem(1.0, 1.0, f))
    for k, v in zip(ks, vals):
        assert eval_profile(f, k, 1.0) == pytest.approx(v, abs=1e-12)
    for (k0, v0), (k1, v1) in zip(zip(ks, vals), zip(ks[1:], vals[1:])):
        mid = eval_profile(f, 0.5 * (k0 + k1), 1.0)
        assert min(v0, v1) - 1e-12 <= mid <= max(v0, v1) + 1e-12
