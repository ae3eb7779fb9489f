"""Interaction-strength sweep: level flows, slopes, state classification, and
avoided-crossing detection.

Levels are tracked diabatically between neighboring strengths by maximal
M-overlap matching. Resonances announce themselves as character exchanges:
levels carrying initial-state weight swap their one-per-well region weight
across a few strength steps. Runs of such rows bracket the crossings, and an
optional refinement stage pins each center by minimizing the parity-resolved
gap (mirror parity is conserved, so only same-parity gaps avoid; opposite
parities cross exactly).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .assembly import OperatorBundle, assemble_2d
from .eigensolve import (
    EigenPair,
    rotate_degenerate_to_symmetry,
    solve_lowest,
    solve_near,
)
from .errors import ConvergenceError
from .frequency import components_from_arrays, dominant
from .mesh import build_1d_mesh, build_2d_mesh
from .model import InteractionSpec, PotentialSpec
from .quench import isolated_bundle

CLASS_ONE_PER_WELL = "T11"
CLASS_SAME_WELL = "T20"
CLASS_MIXED = "mixed"

OVERLAP_AMBIGUITY = 1e-3
NEW_BRANCH_OVERLAP = 0.25


def hellmann_feynman_slope(pair: EigenPair, v_int: sp.spmatrix) -> float:
    """dE/dU of an M-normalized eigenpair: the interaction expectation value
    <phi|V_int|phi>."""
    x = pair.coefficients
    return float(x @ (v_int @ x))


def classify_state(
    pair: EigenPair,
    s_i: sp.spmatrix,
    s_ii: sp.spmatrix,
    s_iii: sp.spmatrix,
    threshold: float = 0.6,
):
    """Region weights of an eigenstate and its type.

    T11 when the one-particle-per-well weight w_II dominates, T20 when the
    same-well weight w_I + w_III dominates, mixed in between.
    """
    x = pair.coefficients
    w_i = float(x @ (s_i @ x))
    w_ii = float(x @ (s_ii @ x))
    w_iii = float(x @ (s_iii @ x))
    if w_ii >= threshold:
        label = CLASS_ONE_PER_WELL
    elif w_i + w_iii >= threshold:
        label = CLASS_SAME_WELL
    else:
        label = CLASS_MIXED
    return label, w_i, w_ii, w_iii


@dataclass
class AvoidedCrossing:
    """One resonance of the initial state with one-per-well levels.

    ``participants`` are the level indices (ascending-energy positions) that
    carry significant initial-state weight at the crossing center; ``types``
    are their diabatic characters just outside the crossing. ``unresolved``
    marks candidates the U grid could not bracket or resolve cleanly.
    """

    u_center: float
    gap: float
    participants: list[int]
    types: list[str]
    refined: bool = False
    unresolved: bool = False


@dataclass
class ScanResult:
    """Per-strength spectra and derived data of one sweep.

    Eigenvectors are transient (only consecutive sweeps points are held during
    tracking); everything needed downstream is stored densely per (U, level).
    """

    u_grid: np.ndarray
    energies: np.ndarray          # (nU, K)
    weights: np.ndarray           # (nU, K)  |<phi_n|g_L(U)>|^2
    slopes: np.ndarray            # (nU, K)  Hellmann-Feynman dE/dU
    region_weights: np.ndarray    # (nU, K, 3)
    classes: np.ndarray           # (nU, K)  strings
    branch_ids: np.ndarray        # (nU, K)  diabatic branch per level
    parities: np.ndarray          # (nU, K)  mirror-parity expectation
    initial_energies: np.ndarray  # (nU,)    isolated-well ground energy
    captured_norms: np.ndarray = None  # (nU,) sum of weights
    matched_overlaps: np.ndarray = None  # (nU-1, K) |<phi(U_i)|M|phi(U_i+1)>| of the match
    dominant_components: list | None = None  # per-U dominant beats (optional)
    ambiguous_matches: list = field(default_factory=list)
    window: tuple | None = None
    bundle: OperatorBundle | None = field(default=None, repr=False)
    iso_bundle: OperatorBundle | None = field(default=None, repr=False)
    embed_indices: np.ndarray | None = field(default=None, repr=False)
    spec: PotentialSpec | None = None
    int_spec: InteractionSpec | None = None
    h: float = 0.0
    k: int = 0
    tol: float = 1e-8

    @property
    def n_levels(self) -> int:
        return self.energies.shape[1]


def _parity_floor(pairs, norm_h):
    res = max(p.residual_norm for p in pairs)
    return max(1e-12 * norm_h, 20.0 * res)


def _solve_point(bundle, iso, embed_idx, u, k, tol, mirror_perm, collect_dominant):
    """Everything computed at a single strength; returns a plain dict."""
    h_u = bundle.hamiltonian(u)
    pairs = solve_lowest(h_u, bundle.mass, k, tol)
    norm_h = float(np.max(np.abs(h_u).sum(axis=1)))
    perm_mat = sp.csr_matrix(
        (np.ones(len(mirror_perm)), (mirror_perm, np.arange(len(mirror_perm)))),
        shape=(len(mirror_perm), len(mirror_perm)),
    )
    rotate_degenerate_to_symmetry(pairs, perm_mat, bundle.mass, _parity_floor(pairs, norm_h))
    phi = np.column_stack([p.coefficients for p in pairs])

    ground = solve_lowest(iso.hamiltonian(u), iso.mass, 1, tol)[0]
    g = np.zeros(phi.shape[0])
    g[embed_idx] = ground.coefficients
    g /= np.sqrt(g @ (bundle.mass @ g))

    c = phi.T @ (bundle.mass @ g)
    energies = np.array([p.energy for p in pairs])
    slopes = np.einsum("ik,ik->k", phi, bundle.v_int @ phi)
    w_i = np.einsum("ik,ik->k", phi, bundle.s_i @ phi)
    w_ii = np.einsum("ik,ik->k", phi, bundle.s_ii @ phi)
    w_iii = np.einsum("ik,ik->k", phi, bundle.s_iii @ phi)
    parity = np.einsum("ik,ik->k", phi, bundle.mass @ (perm_mat @ phi))
    point = {
        "energies": energies,
        "phi": phi,
        "weights": c * c,
        "slopes": slopes,
        "region_weights": np.column_stack([w_i, w_ii, w_iii]),
        "parities": parity,
        "initial_energy": ground.energy,
        "residuals": np.array([p.residual_norm for p in pairs]),
    }
    if collect_dominant:
        q_nl = phi.T @ ((bundle.s_i + 0.5 * bundle.s_ii) @ phi)
        point["dominant"] = dominant(components_from_arrays(c, energies, q_nl))
    return point


def _classify_rows(region_weights, threshold=0.6):
    w_i, w_ii, w_iii = region_weights.T
    out = np.full(len(w_i), CLASS_MIXED, dtype="<U5")
    out[w_ii >= threshold] = CLASS_ONE_PER_WELL
    out[(w_i + w_iii) >= threshold] = CLASS_SAME_WELL
    return out


def _match_branches(o_abs, e_prev, e_next, prev_ids, next_branch_start):
    """Greedy overlap matching with energy-proximity tie-breaks."""
    k = o_abs.shape[0]
    ids = np.empty(k, dtype=int)
    overlaps = np.empty(k)
    ambiguous = []
    taken_rows = np.zeros(k, dtype=bool)
    col_order = np.argsort(-o_abs.max(axis=0))
    next_new = next_branch_start
    for col in col_order:
        scores = np.where(taken_rows, -1.0, o_abs[:, col])
        best = int(np.argmax(scores))
        close = np.flatnonzero(scores >= scores[best] - OVERLAP_AMBIGUITY)
        if len(close) > 1:
            best = int(close[np.argmin(np.abs(e_prev[close] - e_next[col]))])
            ambiguous.append(col)
        taken_rows[best] = True
        overlaps[col] = o_abs[best, col]
        if o_abs[best, col] < NEW_BRANCH_OVERLAP:
            ids[col] = next_new
            next_new += 1
        else:
            ids[col] = prev_ids[best]
    return ids, overlaps, ambiguous, next_new


def scan_levels(
    spec: PotentialSpec,
    int_spec: InteractionSpec,
    u_grid: np.ndarray,
    k: int,
    window: tuple | None = None,
    h: float = 0.5,
    tol: float = 1e-8,
    workers: int = 1,
    collect_dominant: bool = False,
    progress=None,
    row_sink=None,
) -> ScanResult:
    """Sweep the interaction strength over ``u_grid``.

    At every U the double well is re-solved for the K lowest pairs, the
    isolated-well ground state is re-solved and decomposed against them, and
    levels are matched to the previous strength by maximal M-overlap.

    ``collect_dominant`` additionally records the dominant beat components of
    N_L at every strength. ``row_sink(i, result)`` is invoked as soon as row i
    is final, letting callers stream records to disk during long sweeps.
    """
    u_grid = np.asarray(u_grid, dtype=float)
    if not np.all(np.diff(u_grid) > 0):
        raise ValueError("u_grid must be strictly increasing")
    mesh1 = build_1d_mesh(spec, h, include_region_split=True)
    bundle = assemble_2d(build_2d_mesh(mesh1), spec, int_spec, regions=True)
    iso = isolated_bundle(spec, int_spec, h)
    embed_idx = bundle.basis.pair_indices(iso.basis.pairs[:, 0], iso.basis.pairs[:, 1])
    if np.any(embed_idx < 0):
        raise ConvergenceError("isolated basis does not embed into the full basis")
    mirror_perm = bundle.basis.mirror_permutation()

    n_u = len(u_grid)
    result = ScanResult(
        u_grid=u_grid,
        energies=np.empty((n_u, k)),
        weights=np.empty((n_u, k)),
        slopes=np.empty((n_u, k)),
        region_weights=np.empty((n_u, k, 3)),
        classes=np.empty((n_u, k), dtype="<U5"),
        branch_ids=np.empty((n_u, k), dtype=int),
        parities=np.empty((n_u, k)),
        initial_energies=np.empty(n_u),
        captured_norms=np.empty(n_u),
        matched_overlaps=np.empty((max(n_u - 1, 0), k)),
        dominant_components=[] if collect_dominant else None,
        window=window,
        bundle=bundle,
        iso_bundle=iso,
        embed_indices=embed_idx,
        spec=spec,
        int_spec=int_spec,
        h=h,
        k=k,
        tol=tol,
    )

    def job(u):
        return _solve_point(bundle, iso, embed_idx, u, k, tol, mirror_perm, collect_dominant)

    executor = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    pending = {}
    prev_phi = None
    next_branch = k
    try:
        for i, u in enumerate(u_grid):
            if executor is not None:
                for ahead in range(i, min(i + workers, n_u)):
                    if ahead not in pending:
                        pending[ahead] = executor.submit(job, u_grid[ahead])
                point = pending.pop(i).result()
            else:
                point = job(u)
            result.energies[i] = point["energies"]
            result.weights[i] = point["weights"]
            result.slopes[i] = point["slopes"]
            result.region_weights[i] = point["region_weights"]
            result.parities[i] = point["parities"]
            result.initial_energies[i] = point["initial_energy"]
            result.captured_norms[i] = point["weights"].sum()
            result.classes[i] = _classify_rows(point["region_weights"])
            if collect_dominant:
                result.dominant_components.append(point["dominant"])
            if i == 0:
                result.branch_ids[0] = np.arange(k)
            else:
                o_abs = np.abs(prev_phi.T @ (bundle.mass @ point["phi"]))
                ids, overlaps, ambiguous, next_branch = _match_branches(
                    o_abs, result.energies[i - 1], result.energies[i],
                    result.branch_ids[i - 1], next_branch,
                )
                result.branch_ids[i] = ids
                result.matched_overlaps[i - 1] = overlaps
                result.ambiguous_matches.extend((i, col) for col in ambiguous)
            prev_phi = point["phi"]
            if row_sink is not None:
                row_sink(i, result)
            if progress is not None:
                progress(i + 1, n_u)
    finally:
        if executor is not None:
            executor.shutdown(wait=False, cancel_futures=True)
    return result


# ---------------------------------------------------------------------------
# Avoided-crossing detection

WEIGHT_JUMP = 0.25  # w_II transfer across +-2 grid steps that marks an exchange


def _weighted_exchange_rows(scan: ScanResult, weight_floor: float) -> dict:
    """Rows showing a character exchange of a level that carries initial-state
    weight, mapped to the exchanging level indices.

    Adjacent-level gaps are no reliable detector here: at three-state
    crossings the neighboring gap is the doublet splitting, which decays
    monotonically through the resonance. The w_II exchange fires for any
    crossing width, including centers sitting exactly on a grid point (where
    overlap tracking ties and the hybrids classify as mixed) and crossings far
    narrower than the grid (where the level order swaps between rows).
    """
    w_ii = scan.region_weights[:, :, 1]
    n_u = len(scan.u_grid)
    rows: dict[int, set] = {}
    for i in range(1, n_u - 1):
        lo = max(0, i - 2)
        hi = min(n_u - 1, i + 2)
        delta = np.abs(w_ii[hi] - w_ii[lo])
        for j in np.flatnonzero(delta >= WEIGHT_JUMP):
            j = int(j)
            if scan.window is not None:
                w_lo, w_hi = scan.window
                if not w_lo <= scan.energies[i, j] <= w_hi:
                    continue
            if scan.weights[lo:hi + 1, j].max() < weight_floor:
                continue
            rows.setdefault(i, set()).add(j)
    return rows


def _contiguous_runs(rows: dict) -> list[tuple[int, int]]:
    if not rows:
        return []
    ordered = sorted(rows)
    runs = []
    start = prev = ordered[0]
    for i in ordered[1:]:
        if i == prev + 1:
            prev = i
            continue
        runs.append((start, prev))
        start = prev = i
    runs.append((start, prev))
    return runs


def _hybridization_center(scan: ScanResult, lo: int, hi: int, levels, floor: float) -> int:
    """Row inside [lo, hi] where the weighted levels are most hybridized."""
    levels = sorted(levels)

    def score(i):
        w = np.sort(scan.weights[i, levels])[::-1]
        return (np.sum(w >= floor), w[1] if len(w) > 1 else 0.0)

    return max(range(lo, hi + 1), key=score)


def _center_weights(scan: ScanResult, u_center: float):
    """Initial-state weights per level from a fresh solve at the center."""
    bundle, iso = scan.bundle, scan.iso_bundle
    pairs = solve_lowest(bundle.hamiltonian(u_center), bundle.mass, scan.k, scan.tol)
    ground = solve_lowest(iso.hamiltonian(u_center), iso.mass, 1, scan.tol)[0]
    g = np.zeros(bundle.basis.size)
    g[scan.embed_indices] = ground.coefficients
    g /= np.sqrt(g @ (bundle.mass @ g))
    phi = np.column_stack([p.coefficients for p in pairs])
    c = phi.T @ (bundle.mass @ g)
    return c * c


def _diabatic_types(scan: ScanResult, levels, i_center: int) -> list[str]:
    """Classes of the participating levels just outside the crossing, where
    they are diabatically pure."""
    types = []
    for lvl in levels:
        label = CLASS_MIXED
        for row in (i_center - 2, i_center + 2, i_center - 1, i_center + 1):
            if 0 <= row < len(scan.u_grid) and scan.classes[row, lvl] != CLASS_MIXED:
                label = str(scan.classes[row, lvl])
                break
        types.append(label)
    return types


def _local_parity_gap(bundle, mirror_mat, u, sigma, k_local, tol):
    """Smallest same-parity gap among the states nearest ``sigma``.

    Mirror parity is conserved, so only same-parity levels repel; opposite
    parities cross exactly. This is the gap an avoided crossing minimizes.
    """
    pairs = solve_near(bundle.hamiltonian(u), bundle.mass, sigma, k_local, tol)
    norm_h = float(np.max(np.abs(bundle.h0).sum(axis=1))) + abs(u) * float(
        np.max(np.abs(bundle.v_int).sum(axis=1))
    )
    rotate_degenerate_to_symmetry(pairs, mirror_mat, bundle.mass, _parity_floor(pairs, norm_h))
    phi = np.column_stack([p.coefficients for p in pairs])
    parity = np.einsum("ik,ik->k", phi, bundle.mass @ (mirror_mat @ phi))
    e = np.array([p.energy for p in pairs])
    local = np.argsort(np.abs(e - sigma))[:6]
    e, parity = e[local], parity[local]
    best = np.inf
    for sign in (1, -1):
        sel = np.sort(e[np.sign(parity) == sign])
        if len(sel) > 1:
            best = min(best, float(np.min(np.diff(sel))))
    return best


def _golden_min(f, a: float, b: float, resolution: float):
    inv_phi = (np.sqrt(5) - 1) / 2
    x1 = b - inv_phi * (b - a)
    x2 = a + inv_phi * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(80):
        if b - a <= resolution:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv_phi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv_phi * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def detect_avoided_crossings(
    scan: ScanResult,
    weight_floor: float = 0.05,
    refine_du: float | None = None,
) -> list[AvoidedCrossing]:
    """Resonances of the initial state with one-particle-per-well levels.

    Contiguous runs of character-exchange rows bracket the resonances. With
    ``refine_du`` each bracket is swept with the parity-resolved gap, whose
    local minima separate adjacent resonances sharing a bracket; each minimum
    is pinned by golden-section search and its participants are read off a
    fresh decomposition at the refined center, resolving crossings much
    narrower than the U grid. Without refinement one crossing per run is
    reported at the most hybridized grid row.
    """
    rows = _weighted_exchange_rows(scan, weight_floor)
    n_u = len(scan.u_grid)
    u = scan.u_grid
    crossings: list[AvoidedCrossing] = []
    refining = refine_du is not None and scan.bundle is not None
    if refining:
        perm = scan.bundle.basis.mirror_permutation()
        mirror_mat = sp.csr_matrix(
            (np.ones(len(perm)), (perm, np.arange(len(perm)))),
            shape=(len(perm), len(perm)),
        )
        k_local = min(10, scan.n_levels)

        def gap_at(x):
            sigma = float(np.interp(x, u, scan.initial_energies))
            return _local_parity_gap(
                scan.bundle, mirror_mat, x, sigma, k_local, scan.tol
            )

    for lo, hi in _contiguous_runs(rows):
        levels_hit = sorted(set.union(*(rows[i] for i in range(lo, hi + 1))))
        i_center = _hybridization_center(scan, lo, hi, levels_hit, weight_floor)
        at_edge = lo <= 1 or hi >= n_u - 2
        a = u[max(0, lo - 1)]
        b = u[min(n_u - 1, hi + 1)]
        centers = []
        if refining:
            samples = np.linspace(a, b, max(7, 2 * (hi - lo) + 5))
            values = [gap_at(x) for x in samples]
            for m in range(1, len(samples) - 1):
                if values[m] <= values[m - 1] and values[m] <= values[m + 1]:
                    x_c, g_c = _golden_min(
                        gap_at, samples[m - 1], samples[m + 1], refine_du
                    )
                    centers.append((x_c, g_c, True, at_edge))
            if not centers:
                m = int(np.argmin(values))
                centers.append((samples[m], values[m], True, True))
        else:
            pair_gaps = [
                scan.energies[i_center, j + 1] - scan.energies[i_center, j]
                for j in levels_hit if j + 1 < scan.n_levels
            ]
            centers.append((
                float(u[i_center]),
                float(min(pair_gaps)) if pair_gaps else 0.0,
                False,
                at_edge,
            ))

        for x_c, g_c, refined, unresolved in centers:
            if refined:
                weights = _center_weights(scan, x_c)
            else:
                weights = scan.weights[max(0, lo - 1):hi + 2].max(axis=0)
            participants = [int(l) for l in np.flatnonzero(weights >= weight_floor)]
            if refined and len(participants) < 3:
                continue  # gap dip without hybridization: not this state's resonance
            if len(participants) < 3:
                unresolved = True
            crossings.append(AvoidedCrossing(
                u_center=float(x_c),
                gap=float(g_c),
                participants=participants,
                types=_diabatic_types(scan, participants, i_center),
                refined=refined,
                unresolved=unresolved,
            ))

    # merge duplicate centers found from overlapping runs or twin dips
    crossings.sort(key=lambda c: c.u_center)
    du = float(np.min(np.diff(u))) if len(u) > 1 else 0.0
    merged: list[AvoidedCrossing] = []
    for c in crossings:
        if merged and abs(c.u_center - merged[-1].u_center) <= du and (
            set(c.participants) & set(merged[-1].participants)
        ):
            if c.gap < merged[-1].gap:
                merged[-1] = c
            continue
        merged.append(c)
    return merged
