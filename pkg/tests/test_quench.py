import numpy as np
import pytest

from doublewell import (
    InteractionKind,
    InteractionSpec,
    PotentialSpec,
    decompose,
    evolve_probabilities,
    initial_state,
    mirror_state,
    solve_lowest,
)

from conftest import SMALL_H, SMALL_SPEC


@pytest.fixture(scope="module")
def quench_setup(small_bundles):
    """Initial state, eigenpairs, and decomposition for the small hard-core well."""
    bundle = small_bundles[InteractionKind.HARD_COULOMB]
    ints = InteractionSpec(InteractionKind.HARD_COULOMB)
    u = 0.4
    state = initial_state(SMALL_SPEC, ints, u, SMALL_H, full_basis=bundle.basis)
    pairs = solve_lowest(bundle.hamiltonian(u), bundle.mass, 40, 1e-8)
    d = decompose(state, pairs, bundle.mass, norm_floor=0.9)
    return bundle, state, pairs, d


class TestInitialState:
    def test_zero_strength_energy_is_separable_ground(self, small_bundles):
        ints = InteractionSpec(InteractionKind.CONTACT)
        state = initial_state(SMALL_SPEC, ints, 0.0, SMALL_H,
                              full_basis=small_bundles[InteractionKind.CONTACT].basis)
        analytic = 2 * np.pi**2 / SMALL_SPEC.well_length**2
        # lumped-mass dispersion: relative error -(kh)^2/12 per particle
        kh = np.pi * SMALL_H / SMALL_SPEC.well_length
        assert state.energy == pytest.approx(analytic * (1 - kh**2 / 12), rel=1e-4)

    def test_m_normalized(self, quench_setup):
        bundle, state, _, _ = quench_setup
        norm = state.coefficients @ (bundle.mass @ state.coefficients)
        assert abs(norm - 1.0) < 1e-10

    def test_support_confined_to_left_well(self, quench_setup):
        bundle, state, _, _ = quench_setup
        full = bundle.basis.expand(state.coefficients)
        coords = bundle.basis.mesh.nodes
        outside = (coords[:, 0] > SMALL_SPEC.well_length + 1e-12) | (
            coords[:, 1] > SMALL_SPEC.well_length + 1e-12)
        assert np.all(full[outside] == 0.0)

    def test_zero_strength_contact_state_is_product(self, small_bundles):
        ints = InteractionSpec(InteractionKind.CONTACT)
        basis = small_bundles[InteractionKind.CONTACT].basis
        state = initial_state(SMALL_SPEC, ints, 0.0, SMALL_H, full_basis=basis)
        n = basis.mesh.grid.n_nodes
        full = basis.expand(state.coefficients).reshape(n, n)
        sv = np.linalg.svd(full, compute_uv=False)
        assert sv[1] / sv[0] < 1e-8

    def test_hard_core_state_vanishes_on_diagonal(self, small_bundles):
        ints = InteractionSpec(InteractionKind.HARD_COULOMB)
        basis = small_bundles[InteractionKind.HARD_COULOMB].basis
        state = initial_state(SMALL_SPEC, ints, 0.7, SMALL_H, full_basis=basis)
        full = basis.expand(state.coefficients)
        assert np.all(full[basis.mesh.is_diagonal] == 0.0)


class TestDecompose:
    def test_eigenstate_decomposes_to_unit_vector(self, quench_setup):
        bundle, state, pairs, _ = quench_setup
        from doublewell.quench import InitialState

        fake = InitialState(coefficients=pairs[0].coefficients,
                            energy=pairs[0].energy, basis=bundle.basis)
        d = decompose(fake, pairs, bundle.mass, norm_floor=0.9)
        assert d.coefficients[0] == pytest.approx(1.0, abs=1e-10)
        assert np.max(np.abs(d.coefficients[1:])) < 1e-10

    def test_captured_norm_bounded(self, quench_setup):
        _, _, _, d = quench_setup
        assert np.max(np.abs(d.coefficients)) <= 1 + 1e-10
        assert d.captured_norm <= 1 + 1e-10

    def test_norm_warning(self, quench_setup):
        bundle, state, pairs, _ = quench_setup
        with pytest.warns(UserWarning, match="captures only"):
            d = decompose(state, pairs[:2], bundle.mass, norm_floor=0.999)
        assert d.norm_warning

    def test_basis_mismatch(self, quench_setup):
        bundle, state, pairs, _ = quench_setup
        from doublewell.quench import InitialState

        bad = InitialState(coefficients=state.coefficients[:-1],
                           energy=0.0, basis=bundle.basis)
        with pytest.raises(ValueError, match="basis mismatch"):
            decompose(bad, pairs, bundle.mass)

    def test_energy_conservation(self, quench_setup):
        bundle, state, pairs, d = quench_setup
        h = bundle.hamiltonian(0.4)
        direct = state.coefficients @ (h @ state.coefficients)
        spectral = np.sum(d.coefficients**2 * d.energies)
        deficit = 1 - d.captured_norm
        e_max = np.max(np.abs(d.energies))
        # the missing weight sits just above the computed window, so allow a
        # small multiple of the deficit * E_max scale
        assert abs(direct - spectral) <= max(3 * deficit * e_max, 1e-12)
        # the embedded quadratic form reproduces the isolated-well energy exactly
        assert direct == pytest.approx(state.energy, rel=1e-12)


class TestEvolve:
    def times(self, d):
        span = 2 * np.pi / max(np.min(np.diff(np.sort(d.energies))), 1e-8)
        return np.linspace(0.0, min(span, 5e4), 257)

    def test_initial_values(self, quench_setup):
        bundle, _, pairs, d = quench_setup
        ts = evolve_probabilities(d, pairs, *bundle.regions, np.array([0.0]))
        deficit = 1 - d.captured_norm
        assert abs(ts.p2[0] - 1.0) <= 2 * deficit + 1e-9
        assert ts.p1[0] <= 2 * deficit + 1e-9
        assert ts.p0[0] <= 2 * deficit + 1e-9
        assert ts.n_left[0] == ts.p2[0] + 0.5 * ts.p1[0]

    def test_time_reversal_even(self, quench_setup):
        bundle, _, pairs, d = quench_setup
        t = self.times(d)
        fwd = evolve_probabilities(d, pairs, *bundle.regions, t)
        bwd = evolve_probabilities(d, pairs, *bundle.regions, -t)
        for a, b in ((fwd.p0, bwd.p0), (fwd.p1, bwd.p1), (fwd.p2, bwd.p2)):
            assert np.allclose(a, b, rtol=0, atol=1e-12)

    def test_conservation(self, quench_setup):
        bundle, _, pairs, d = quench_setup
        ts = evolve_probabilities(d, pairs, *bundle.regions, self.times(d))
        total = ts.p0 + ts.p1 + ts.p2
        assert np.ptp(total) < 1e-9
        assert total[0] == pytest.approx(d.captured_norm, abs=1e-9)

    def test_left_right_duality(self, quench_setup):
        bundle, state, pairs, d = quench_setup
        t = self.times(d)
        fwd = evolve_probabilities(d, pairs, *bundle.regions, t)
        d_mirror = decompose(mirror_state(state), pairs, bundle.mass, norm_floor=0.9)
        rev = evolve_probabilities(d_mirror, pairs, *bundle.regions, t)
        assert np.allclose(fwd.p2, rev.p0, rtol=0, atol=1e-10)
        assert np.allclose(fwd.p0, rev.p2, rtol=0, atol=1e-10)
        assert np.allclose(fwd.p1, rev.p1, rtol=0, atol=1e-10)

    def test_empty_times_rejected(self, quench_setup):
        bundle, _, pairs, d = quench_setup
        with pytest.raises(ValueError):
            evolve_probabilities(d, pairs, *bundle.regions, np.array([]))

    def test_probabilities_nonnegative(self, quench_setup):
        bundle, _, pairs, d = quench_setup
        ts = evolve_probabilities(d, pairs, *bundle.regions, self.times(d))
        for p in (ts.p0, ts.p1, ts.p2):
            assert np.all(p > -1e-9)
