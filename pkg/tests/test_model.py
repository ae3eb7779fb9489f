import numpy as np
import pytest
from hypothesis import given, strategies as st

from doublewell import (
    ConfigurationError,
    DomainError,
    InteractionKind,
    InteractionSpec,
    PotentialSpec,
    Region,
    interaction_eval,
    potential_eval,
    region_of,
)

SPEC = PotentialSpec(50.0, 3.0, 0.3)


class TestPotential:
    def test_left_well_interior(self):
        assert potential_eval(25.0, SPEC) == 0.0

    def test_barrier_value(self):
        assert potential_eval(51.5, SPEC) == 0.3

    def test_right_well_interior(self):
        assert potential_eval(100.0, SPEC) == 0.0

    def test_out_of_domain(self):
        with pytest.raises(DomainError):
            potential_eval(-1.0, SPEC)
        with pytest.raises(DomainError):
            potential_eval(103.5, SPEC)

    def test_array_input(self):
        out = potential_eval(np.array([25.0, 51.5, 100.0]), SPEC)
        assert np.array_equal(out, [0.0, 0.3, 0.0])

    @given(st.floats(min_value=0.0, max_value=103.0, allow_nan=False))
    def test_mirror_symmetry(self, x):
        assert potential_eval(x, SPEC) == potential_eval(SPEC.total_length - x, SPEC)

    def test_invalid_geometry(self):
        with pytest.raises(ConfigurationError):
            PotentialSpec(well_length=-1.0)
        with pytest.raises(ConfigurationError):
            PotentialSpec(barrier_width=-0.1)
        with pytest.raises(ConfigurationError):
            PotentialSpec(barrier_height=-0.1)


class TestInteraction:
    def test_soft_at_zero(self):
        spec = InteractionSpec(InteractionKind.SOFT_COULOMB, softening=1.0)
        assert interaction_eval(0.0, spec) == 1.0

    def test_hard_at_two(self):
        assert interaction_eval(2.0, InteractionSpec(InteractionKind.HARD_COULOMB)) == 0.5

    def test_contact_not_pointwise(self):
        with pytest.raises(ValueError):
            interaction_eval(0.0, InteractionSpec(InteractionKind.CONTACT))

    def test_hard_singularity(self):
        with pytest.raises(ZeroDivisionError):
            interaction_eval(0.0, InteractionSpec(InteractionKind.HARD_COULOMB))

    @given(st.floats(min_value=-200, max_value=200, allow_nan=False))
    def test_even(self, r):
        spec = InteractionSpec(InteractionKind.SOFT_COULOMB, softening=1.0)
        assert interaction_eval(r, spec) == interaction_eval(-r, spec)

    def test_soft_approaches_hard(self):
        hard = interaction_eval(1.0, InteractionSpec(InteractionKind.HARD_COULOMB))
        values = [
            interaction_eval(1.0, InteractionSpec(InteractionKind.SOFT_COULOMB, softening=d))
            for d in (1.0, 0.1, 0.01)
        ]
        assert values == [1 / np.sqrt(2.0), 1 / np.sqrt(1.01), 1 / np.sqrt(1.0001)]
        gaps = [abs(v - hard) for v in values]
        assert gaps[0] > gaps[1] > gaps[2]

    def test_soft_needs_positive_softening(self):
        with pytest.raises(ConfigurationError):
            InteractionSpec(InteractionKind.SOFT_COULOMB, softening=0.0)

    def test_kind_parsing(self):
        assert InteractionKind.from_string("Hard-Coulomb") is InteractionKind.HARD_COULOMB
        with pytest.raises(ConfigurationError):
            InteractionKind.from_string("banana")


class TestRegions:
    def test_both_left(self):
        assert region_of(10.0, 40.0, SPEC) is Region.I

    def test_one_each(self):
        assert region_of(10.0, 90.0, SPEC) is Region.II

    def test_both_right(self):
        # 60 is right of the midpoint 51.5 even though it is inside the barrier's
        # right neighborhood
        assert region_of(60.0, 95.0, SPEC) is Region.III

    def test_midpoint_goes_left(self):
        assert region_of(51.5, 51.5, SPEC) is Region.I

    def test_out_of_domain(self):
        with pytest.raises(DomainError):
            region_of(-0.1, 50.0, SPEC)

    @given(
        st.floats(min_value=0, max_value=103, allow_nan=False),
        st.floats(min_value=0, max_value=103, allow_nan=False),
    )
    def test_exchange_symmetric(self, x1, x2):
        assert region_of(x1, x2, SPEC) is region_of(x2, x1, SPEC)
