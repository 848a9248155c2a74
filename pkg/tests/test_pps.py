"""Pre/post-selection statistics against the hand-expanded oracle."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import load_oracle_table
from threebox.errors import UndefinedConditionalError
from threebox.hilbert import (
    ComplexRational,
    StateVector,
    apply_projector,
    basis_state,
    binary_pvm,
    outer_product,
    projector_onto,
    trace_product,
)
from threebox.pps import (
    PpsScenario,
    abl_conditional,
    joint_distribution,
    postselection_success,
    success_without_intermediate,
    three_box_scenario,
)

F = Fraction


@pytest.fixture(scope="module")
def scenario():
    return three_box_scenario()


class TestThreeBoxScenario:
    def test_pre_post_overlap(self, scenario):
        # |<psi|phi>|^2 = |(1 + 1 - 1)/3|^2 = 1/9
        assert success_without_intermediate(scenario) == F(1, 9)

    def test_basis_overlap(self, scenario):
        box1 = projector_onto(basis_state(3, 0))
        assert trace_product(box1, scenario.pre_state) == F(1, 3)

    def test_projected_post_state_overlap(self, scenario):
        # Project the post-selection state onto box 3, then overlap with the
        # pre-state: |<phi| 3><3 |psi>|^2 = (1/3)·(1/3) = 1/9.
        psi_proj = outer_product(StateVector(
            3, (ComplexRational(F(1)), ComplexRational(F(1)), ComplexRational(F(-1))),
            F(1, 3)))
        box3 = scenario.intermediate[3][1]
        sandwiched, _ = apply_projector(box3, psi_proj)
        phi_proj = projector_onto(StateVector(
            3, (ComplexRational(F(1)),) * 3, F(1, 3)))
        assert trace_product(phi_proj, sandwiched) == F(1, 9)

    def test_choices(self, scenario):
        assert scenario.choices == (1, 2, 3)


class TestJointDistribution:
    def test_matches_hand_expanded_oracle(self, scenario):
        oracle = load_oracle_table()
        for k in (1, 2, 3):
            table = joint_distribution(scenario, k)
            for i in (0, 1):
                for j in (0, 1):
                    assert table[i, j] == oracle[i, j, k], (i, j, k)

    def test_anchor_entries(self, scenario):
        assert joint_distribution(scenario, 2)[0, 0] == F(2, 3)
        assert joint_distribution(scenario, 3)[0, 1] == F(4, 9)

    def test_invalid_choice(self, scenario):
        with pytest.raises(ValueError, match="choice"):
            joint_distribution(scenario, 7)

    def test_first_two_columns_identical(self, scenario):
        assert joint_distribution(scenario, 1) == joint_distribution(scenario, 2)

    def test_normalization(self, scenario):
        for k in (1, 2, 3):
            assert sum(joint_distribution(scenario, k).values()) == 1


class TestAblConditional:
    @pytest.mark.parametrize("k,expected", [(1, F(1)), (2, F(1)), (3, F(1, 5))])
    def test_found_conditional(self, scenario, k, expected):
        assert abl_conditional(scenario, k, 1) == expected

    def test_complement_conditional(self, scenario):
        assert abl_conditional(scenario, 3, 0) == F(4, 5)

    def test_invalid_outcome(self, scenario):
        with pytest.raises(ValueError):
            abl_conditional(scenario, 1, 2)

    def test_zero_denominator_is_an_error(self):
        # Pre-select box 1, post-select box 2: success probability is 0 and
        # the conditional must not silently default to anything.
        s = PpsScenario(
            pre_state=outer_product(basis_state(2, 0)),
            intermediate={1: binary_pvm(projector_onto(basis_state(2, 0)))},
            final=binary_pvm(projector_onto(basis_state(2, 1))),
        )
        with pytest.raises(UndefinedConditionalError):
            abl_conditional(s, 1, 1)


class TestPostselectionSuccess:
    @pytest.mark.parametrize("k,expected", [(1, F(1, 9)), (2, F(1, 9)), (3, F(5, 9))])
    def test_success(self, scenario, k, expected):
        assert postselection_success(scenario, k) == expected

    def test_skipping_the_measurement_matches_for_first_two_choices(self, scenario):
        skipped = success_without_intermediate(scenario)
        assert skipped == F(1, 9)
        assert postselection_success(scenario, 1) == skipped
        assert postselection_success(scenario, 2) == skipped
        assert postselection_success(scenario, 3) != skipped

    def test_bayes_consistency(self, scenario):
        for k in (1, 2, 3):
            joint = joint_distribution(scenario, k)
            success = postselection_success(scenario, k)
            for i in (0, 1):
                assert abl_conditional(scenario, k, i) * success == joint[i, 1]


def _state(pairs):
    amps = tuple(ComplexRational(F(re), F(im)) for re, im in pairs)
    norm = sum(a.abs_squared() for a in amps)
    return StateVector(len(amps), amps, F(1, norm))


amplitude_pairs = st.lists(
    st.tuples(st.integers(-2, 2), st.integers(-2, 2)),
    min_size=3, max_size=3,
).filter(lambda ps: any(re or im for re, im in ps))


@st.composite
def scenarios(draw):
    pre = _state(draw(amplitude_pairs))
    final = _state(draw(amplitude_pairs))
    n_choices = draw(st.integers(1, 3))
    intermediate = {
        k: binary_pvm(projector_onto(_state(draw(amplitude_pairs))))
        for k in range(1, n_choices + 1)
    }
    return PpsScenario(
        pre_state=outer_product(pre),
        intermediate=intermediate,
        final=binary_pvm(projector_onto(final)),
    )


@settings(max_examples=30, deadline=None)
@given(scenarios())
def test_generic_scenario_invariants(s):
    """Normalization and Bayes consistency beyond the three-box instance."""
    for k in s.choices:
        joint = joint_distribution(s, k)
        assert sum(joint.values()) == 1
        success = postselection_success(s, k)
        if success == 0:
            with pytest.raises(UndefinedConditionalError):
                abl_conditional(s, k, 1)
        else:
            for i in (0, 1):
                assert abl_conditional(s, k, i) * success == joint[i, 1]


def test_scenario_dim_mismatch_rejected():
    with pytest.raises(ValueError, match="dimension"):
        PpsScenario(
            pre_state=outer_product(basis_state(3, 0)),
            intermediate={1: binary_pvm(projector_onto(basis_state(2, 0)))},
            final=binary_pvm(projector_onto(basis_state(3, 1))),
        )
