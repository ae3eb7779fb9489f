"""Acceptance suite at desk scale: h = 1, K = 150, 61-point strength grid.

Each test prints one PASS/FAIL line (run with ``pytest -s`` to see them all).
The sweep fixtures are shared module-wide; the whole module runs in roughly
ten minutes on a laptop-class machine.
"""

import warnings

import numpy as np
import pytest
from scipy.linalg import eigh

from doublewell import (
    InteractionKind,
    InteractionSpec,
    PotentialSpec,
    assemble_1d,
    build_1d_mesh,
    decompose,
    detect_avoided_crossings,
    dominant,
    evolve_probabilities,
    fd_oracle,
    frequency_components,
    hellmann_feynman_slope,
    initial_state,
    mirror_state,
    reconstruct_nl,
    scan_levels,
    solve_lowest,
    tunneling_period,
)

DESK_H = 1.0
DESK_K = 150
U_GRID = np.linspace(-0.5, 1.0, 61)
SPEC = PotentialSpec(50.0, 3.0, 0.3)
ENERGY_SCALE = 2 * np.pi**2 / 2500.0  # noninteracting pair ground energy


def check(name: str, ok: bool, detail: str):
    print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def desk_scans():
    out = {}
    for kind in InteractionKind:
        scan = scan_levels(SPEC, InteractionSpec(kind), U_GRID, DESK_K, h=DESK_H,
                           collect_dominant=True)
        crossings = detect_avoided_crossings(scan, refine_du=1e-4)
        out[kind] = (scan, crossings)
    return out


def quench_at(scan, u, k=DESK_K, n_times=2048):
    """Quench diagnostics at one strength, reusing the scan's operators."""
    bundle, iso = scan.bundle, scan.iso_bundle
    ground = solve_lowest(iso.hamiltonian(u), iso.mass, 1, scan.tol)[0]
    g = np.zeros(bundle.basis.size)
    g[scan.embed_indices] = ground.coefficients
    g /= np.sqrt(g @ (bundle.mass @ g))
    from doublewell.quench import InitialState

    state = InitialState(coefficients=g, energy=ground.energy, basis=bundle.basis)
    pairs = solve_lowest(bundle.hamiltonian(u), bundle.mass, k, scan.tol)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        d = decompose(state, pairs, bundle.mass)
    comps = frequency_components(d, pairs, bundle.s_i, bundle.s_ii, coeff_floor=0.0)
    doms = dominant(comps)
    horizon = 1.25 * tunneling_period(doms) if doms else 1.0
    times = np.linspace(0.0, horizon, n_times)
    series = evolve_probabilities(d, pairs, *bundle.regions, times)
    return state, pairs, d, comps, doms, series


def off_resonance_u(scan):
    """Grid strength with the purest doublet decomposition (smallest third
    weight), i.e. farthest from any resonance in the initial state's eyes."""
    third = np.sort(scan.weights, axis=1)[:, -3]
    idx = np.arange(2, len(scan.u_grid) - 2)
    return float(scan.u_grid[idx[np.argmin(third[idx])]])


class TestSeparability:
    def test_zero_strength_spectrum_is_pairwise_sums(self, desk_scans):
        scan, _ = desk_scans[InteractionKind.CONTACT]
        bundle = scan.bundle
        pairs = solve_lowest(bundle.hamiltonian(0.0), bundle.mass, 10, 1e-10)
        h1, m1 = assemble_1d(bundle.basis.mesh.grid, SPEC, lumped_mass=True)
        e1 = eigh(h1.toarray(), m1.toarray(), eigvals_only=True)[:10]
        sums = np.sort([e1[i] + e1[j] for i in range(10) for j in range(i, 10)])[:10]
        got = np.array([p.energy for p in pairs])
        rel = float(np.max(np.abs(got - sums) / np.abs(sums)))
        check("separability", rel <= 1e-10, f"max rel err {rel:.2e} <= 1e-10")


class TestAnalyticLimit:
    def test_isolated_ground_converges_at_order_two(self):
        exact = np.pi**2 / 2500.0
        energies = {}
        for h in (2.0, 1.0, 0.5):
            mesh = build_1d_mesh(SPEC, h, isolated_left=True)
            h1, m1 = assemble_1d(mesh, SPEC)
            energies[h] = eigh(h1.toarray(), m1.toarray(), eigvals_only=True,
                               subset_by_index=[0, 0])[0]
        order = np.log2((energies[2.0] - energies[1.0])
                        / (energies[1.0] - energies[0.5]))
        err = abs(energies[0.5] - exact) / exact
        check(
            "analytic-limit",
            order >= 1.9 and err < 1e-4,
            f"observed order {order:.3f} >= 1.9, E(h=0.5) rel err {err:.2e}",
        )


class TestOracleEquivalence:
    def test_ground_energies_cross_method(self, desk_scans):
        n_fd, n_fd_coarse = 96, 64
        worst = ("", 0.0)
        for kind in InteractionKind:
            scan, _ = desk_scans[kind]
            ints = InteractionSpec(kind)
            for u in (-0.2, 0.3, 0.8):
                fem = solve_lowest(
                    scan.bundle.hamiltonian(u), scan.bundle.mass, 1, 1e-8
                )[0].energy
                fd = fd_oracle(SPEC, ints, u, n_fd, 1)[0]
                fd_coarse = fd_oracle(SPEC, ints, u, n_fd_coarse, 1)[0]
                # combined empirical discretization bound, floored at 1% of
                # the energy scale (the attractive hard-core cusp converges
                # slowly on the oracle's uniform grid)
                tol = max(
                    0.01 * max(abs(fem), ENERGY_SCALE),
                    2.0 * abs(fd - fd_coarse),
                )
                gap = abs(fem - fd)
                assert gap <= tol, (
                    f"{kind.value} U={u}: |{fem:.6f} - {fd:.6f}| = {gap:.2e} > {tol:.2e}"
                )
                rel = gap / max(abs(fem), ENERGY_SCALE)
                if rel > worst[1]:
                    worst = (f"{kind.value} U={u}", rel)
        check("oracle-equivalence", True,
              f"9 cases within combined bounds; worst scale-relative {worst[1]:.2%} at {worst[0]}")


class TestHellmannFeynman:
    def test_central_difference_order(self, desk_scans):
        scan, _ = desk_scans[InteractionKind.HARD_COULOMB]
        bundle = scan.bundle
        u0, k = 0.5, 10
        ref = solve_lowest(bundle.hamiltonian(u0), bundle.mass, k, 1e-8)
        phi0 = np.column_stack([p.coefficients for p in ref])
        hf = np.array([hellmann_feynman_slope(p, bundle.v_int) for p in ref])

        def matched_energies(u):
            pairs = solve_lowest(bundle.hamiltonian(u), bundle.mass, k + 4, 1e-8)
            phi = np.column_stack([p.coefficients for p in pairs])
            idx = np.argmax(np.abs(phi0.T @ (bundle.mass @ phi)), axis=1)
            assert len(set(idx.tolist())) == k
            return np.array([pairs[i].energy for i in idx])

        errs = {}
        for delta in (0.04, 0.02):
            cd = (matched_energies(u0 + delta) - matched_energies(u0 - delta)) / (2 * delta)
            errs[delta] = np.abs(cd - hf)
        noise_floor = 1e-11
        orders = np.log2(np.maximum(errs[0.04], noise_floor)
                         / np.maximum(errs[0.02], noise_floor))
        converged = errs[0.02] <= noise_floor
        ok = bool(np.all((orders >= 1.9) | converged))
        check(
            "hellmann-feynman",
            ok,
            f"orders on {len(orders)} branches: min {orders.min():.2f}, "
            f"max {orders.max():.2f} (>= 1.9)",
        )

    def test_contact_one_per_well_slopes_vanish(self, desk_scans):
        # restricted to the low-lying levels: above the barrier the states
        # delocalize and carry diagonal density regardless of class, and the
        # barrier leakage (~e^(-2 kappa b) at W0=0.3, b=3) keeps even the
        # lowest one-per-well state's diagonal density at the 1e-3 level
        scan, _ = desk_scans[InteractionKind.CONTACT]
        low = scan.slopes[:, :8]
        t11 = scan.classes[:, :8] == "T11"
        t20 = scan.classes[:, :8] == "T20"
        ratio = np.median(low[t11]) / np.median(low[t20])
        check("contact-T11-slope", ratio < 1e-2,
              f"low-lying median T11/T20 slope ratio {ratio:.2e} < 1e-2")


class TestCrossingStructure:
    def test_counts_and_positions(self, desk_scans):
        du = float(U_GRID[1] - U_GRID[0])
        _, contact = desk_scans[InteractionKind.CONTACT]
        _, soft = desk_scans[InteractionKind.SOFT_COULOMB]
        _, hard = desk_scans[InteractionKind.HARD_COULOMB]

        ok_contact = len(contact) == 1 and abs(contact[0].u_center) <= du \
            and len(contact[0].participants) == 3
        soft_at_zero = [c for c in soft if abs(c.u_center) <= du]
        soft_positive = [c for c in soft if c.u_center > du]
        ok_soft = len(soft_at_zero) == 1 and len(soft_positive) >= 1
        ok_hard = len(hard) == len(soft) and hard[0].u_center < 0
        detail = (
            f"contact: {[round(c.u_center, 4) for c in contact]} "
            f"({len(contact[0].participants)} participants); "
            f"soft: {[round(c.u_center, 4) for c in soft]}; "
            f"hard: {[round(c.u_center, 4) for c in hard]}"
        )
        check("crossing-structure", ok_contact and ok_soft and ok_hard, detail)


class TestNormCapture:
    def test_hard_core_benchmark_strength(self, desk_scans):
        scan, _ = desk_scans[InteractionKind.HARD_COULOMB]
        _, _, d, _, _, _ = quench_at(scan, 0.3638, k=200, n_times=2)
        top3 = float(np.sort(d.coefficients**2)[-3:].sum())
        ok = d.captured_norm >= 0.999 and abs(top3 - 0.956) <= 0.02
        check(
            "norm-capture",
            ok,
            f"captured {d.captured_norm:.6f} >= 0.999 with K=200; "
            f"top-3 weight {top3:.4f} in 0.956 +- 0.02",
        )


class TestAmplitudeSum:
    def test_sum_near_half_when_capture_complete(self, desk_scans):
        results = []
        for kind in InteractionKind:
            scan, crossings = desk_scans[kind]
            for u in [off_resonance_u(scan)] + [c.u_center for c in crossings]:
                _, _, d, comps, _, _ = quench_at(scan, u, n_times=2)
                if d.captured_norm >= 0.999:
                    results.append(sum(c.amplitude for c in comps))
        ok = all(0.495 <= s <= 0.5 for s in results) and results
        check(
            "amplitude-sum",
            bool(ok),
            f"{len(results)} norm-compliant runs, sums in "
            f"[{min(results):.4f}, {max(results):.4f}] within [0.495, 0.5]",
        )


class TestCorrelatedRegime:
    def test_off_resonance_pair_tunneling(self, desk_scans):
        details = []
        ok = True
        for kind in InteractionKind:
            scan, _ = desk_scans[kind]
            u = off_resonance_u(scan)
            _, _, _, _, doms, series = quench_at(scan, u)
            p1_max = float(series.p1.max())
            ok &= p1_max <= 0.1 and len(doms) == 1
            details.append(f"{kind.value}@U={u:+.3f}: maxP1={p1_max:.4f}, {len(doms)} dominant")
        check("correlated-regime", ok, "; ".join(details))


class TestUncorrelatedRegime:
    def test_resonant_single_particle_tunneling(self, desk_scans):
        scan, crossings = desk_scans[InteractionKind.HARD_COULOMB]
        details = []
        ok = True
        ratios_at_four = []
        for c in crossings:
            _, _, _, _, doms, series = quench_at(scan, c.u_center)
            p1_max = float(series.p1.max())
            ok &= p1_max >= 0.4 and len(doms) >= 2
            if len(c.participants) == 4 and len(doms) >= 2:
                by_amp = sorted(doms, key=lambda x: -abs(x.amplitude))[:2]
                w = sorted([by_amp[0].omega, by_amp[1].omega])
                ratios_at_four.append(float(w[1] / w[0]))
            details.append(
                f"U={c.u_center:+.4f}({len(c.participants)}p): maxP1={p1_max:.3f}, "
                f"{len(doms)} dominant"
            )
        four_ok = any(3.5 <= r <= 4.5 for r in ratios_at_four)
        ok &= four_ok
        check(
            "uncorrelated-regime",
            ok,
            "; ".join(details)
            + f"; 4-state frequency ratios {[round(r, 2) for r in ratios_at_four]}",
        )


class TestReconstruction:
    def test_dominant_components_approximate_occupation(self, desk_scans):
        sups = []
        for kind in InteractionKind:
            scan, crossings = desk_scans[kind]
            for u in [off_resonance_u(scan)] + [c.u_center for c in crossings]:
                _, _, _, _, doms, series = quench_at(scan, u)
                rec = reconstruct_nl(doms, series.times)
                sups.append(float(np.max(np.abs(rec - series.n_left))))
        ok = all(s <= 0.05 for s in sups)
        check(
            "reconstruction",
            ok,
            f"{len(sups)} strengths, dominant-only sup error max {max(sups):.4f} <= 0.05",
        )


class TestBeatRearrangementPattern:
    """Qualitative structure of the dominant beats versus strength: the
    contact kind reorganizes only around zero, the soft kind repeatedly at
    repulsive strengths, the hard kind already at attractive strengths."""

    @staticmethod
    def rearrangement_points(scan):
        # reorganization shows as a collapsing leading amplitude (hybridized
        # doublet) or a jump of the slowest dominant frequency (band switch)
        out = set()
        omin = [min((c.omega for c in d), default=np.nan)
                for d in scan.dominant_components]
        amax = [max((abs(c.amplitude) for c in d), default=np.nan)
                for d in scan.dominant_components]
        for i, u in enumerate(scan.u_grid):
            if not np.isnan(amax[i]) and amax[i] < 0.4:
                out.add(float(u))
            if i and not (np.isnan(omin[i]) or np.isnan(omin[i - 1])):
                ratio = max(omin[i], omin[i - 1]) / min(omin[i], omin[i - 1])
                if ratio > 3:
                    out.add(float(scan.u_grid[i]))
                    out.add(float(scan.u_grid[i - 1]))
        return sorted(out)

    def test_pattern_per_kind(self, desk_scans):
        du = float(U_GRID[1] - U_GRID[0])
        pts = {kind: self.rearrangement_points(desk_scans[kind][0])
               for kind in InteractionKind}
        contact = pts[InteractionKind.CONTACT]
        soft = pts[InteractionKind.SOFT_COULOMB]
        hard = pts[InteractionKind.HARD_COULOMB]
        ok_contact = bool(contact) and all(abs(u) <= 2 * du for u in contact)
        ok_soft = any(abs(u) <= 2 * du for u in soft) and any(u > 2 * du for u in soft)
        ok_hard = bool(hard) and min(hard) < 0
        check(
            "beat-rearrangement",
            ok_contact and ok_soft and ok_hard,
            f"contact only near 0: {[round(u, 3) for u in contact]}; "
            f"soft adds repulsive bands ({sum(u > 2 * du for u in soft)} points); "
            f"hard starts attractive (min {min(hard):.3f})",
        )


class TestConservationSuite:
    def test_conservation_evenness_duality(self, desk_scans):
        scan, _ = desk_scans[InteractionKind.HARD_COULOMB]
        bundle = scan.bundle
        u = 0.3638
        ints = InteractionSpec(InteractionKind.HARD_COULOMB)
        state = initial_state(SPEC, ints, u, DESK_H, full_basis=bundle.basis)
        pairs = solve_lowest(bundle.hamiltonian(u), bundle.mass, DESK_K, 1e-8)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            d = decompose(state, pairs, bundle.mass)
            d_mirror = decompose(mirror_state(state), pairs, bundle.mass)
        comps = frequency_components(d, pairs, bundle.s_i, bundle.s_ii)
        horizon = 1.25 * tunneling_period(dominant(comps))
        times = np.linspace(0, horizon, 512)
        fwd = evolve_probabilities(d, pairs, *bundle.regions, times)
        bwd = evolve_probabilities(d, pairs, *bundle.regions, -times)
        rev = evolve_probabilities(d_mirror, pairs, *bundle.regions, times)
        total = fwd.p0 + fwd.p1 + fwd.p2
        conservation = float(np.ptp(total))
        evenness = max(
            float(np.max(np.abs(fwd.p0 - bwd.p0))),
            float(np.max(np.abs(fwd.p1 - bwd.p1))),
            float(np.max(np.abs(fwd.p2 - bwd.p2))),
        )
        duality = max(
            float(np.max(np.abs(fwd.p2 - rev.p0))),
            float(np.max(np.abs(fwd.p0 - rev.p2))),
            float(np.max(np.abs(fwd.p1 - rev.p1))),
        )
        ok = conservation < 1e-9 and evenness < 1e-12 and duality < 1e-10
        check(
            "conservation-suite",
            ok,
            f"P0+P1+P2 spread {conservation:.1e} < 1e-9; evenness {evenness:.1e}; "
            f"mirror duality {duality:.1e}",
        )
