"""Lowest eigenpairs of the generalized symmetric problem H x = E M x.

The production path is shift-invert ARPACK with a rigorous Gershgorin shift
below the spectrum, deterministic start vector, M-orthonormalization, residual
verification, and an LDL-inertia certificate that no eigenvalue below the
returned window was skipped. A dense LAPACK path handles small problems.

``fd_oracle`` is an independent second-order finite-difference discretization
with a dense eigensolve, used by the test suite to cross-check the finite
element results end to end.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import eigh, eigh_tridiagonal

from .errors import ConvergenceError, OracleSizeError
from .model import InteractionKind, InteractionSpec, PotentialSpec, potential_eval

_V0_SEED = 20250608
_DENSE_CUTOFF = 260  # below this dimension a dense solve is cheaper and sturdier


@dataclass
class EigenPair:
    """One M-normalized eigenpair with its verified residual norm.

    ``splitting_certified`` is False when the gap to a neighboring eigenvalue
    is below what the residual tolerance can resolve; the two energies are
    then correct individually but their difference is not certified.
    """

    energy: float
    coefficients: np.ndarray = field(repr=False)
    residual_norm: float = 0.0
    splitting_certified: bool = True


def _is_diagonal(m: sp.spmatrix) -> bool:
    coo = m.tocoo()
    return bool(np.all(coo.row == coo.col))


def lower_bound(h: sp.spmatrix, m: sp.spmatrix) -> float:
    """Rigorous lower bound on the generalized spectrum.

    For diagonal M the pencil is similar to D^-1/2 H D^-1/2 and Gershgorin
    applies directly; otherwise combine Gershgorin bounds of H and M.
    """
    h = h.tocsr()
    if _is_diagonal(m):
        d = 1.0 / np.sqrt(m.diagonal())
        b = sp.diags(d) @ h @ sp.diags(d)
        radii = np.asarray(abs(b).sum(axis=1)).ravel() - np.abs(b.diagonal())
        return float((b.diagonal() - radii).min())
    radii_h = np.asarray(abs(h).sum(axis=1)).ravel() - np.abs(h.diagonal())
    g_lo = float((h.diagonal() - radii_h).min())
    m = m.tocsr()
    radii_m = np.asarray(abs(m).sum(axis=1)).ravel() - np.abs(m.diagonal())
    m_lo = float((m.diagonal() - radii_m).min())
    m_hi = float((m.diagonal() + radii_m).max())
    if m_lo <= 0:
        raise ConvergenceError("mass matrix is not safely positive definite")
    return g_lo / m_hi if g_lo >= 0 else g_lo / m_lo


def count_below(h: sp.spmatrix, m: sp.spmatrix, energy: float) -> int:
    """Number of generalized eigenvalues strictly below ``energy`` via the
    inertia of H - energy * M (symmetric-mode LDL through SuperLU)."""
    a = (h - energy * m).tocsc()
    lu = spla.splu(
        a,
        permc_spec="MMD_AT_PLUS_A",
        diag_pivot_thresh=0.0,
        options=dict(SymmetricMode=True),
    )
    return int((lu.U.diagonal() < 0).sum())


def m_orthonormalize(vectors: np.ndarray, m: sp.spmatrix) -> np.ndarray:
    """Modified Gram-Schmidt in the M inner product, in column order."""
    v = np.array(vectors, dtype=float, copy=True)
    for i in range(v.shape[1]):
        for _ in range(2):  # one re-orthogonalization pass for stability
            if i:
                proj = v[:, :i].T @ (m @ v[:, i])
                v[:, i] -= v[:, :i] @ proj
        nrm = np.sqrt(v[:, i] @ (m @ v[:, i]))
        v[:, i] /= nrm
    return v


def _canonical_signs(vectors: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _dense_lowest(h, m, k):
    vals, vecs = eigh(
        h.toarray(), m.toarray(), subset_by_index=[0, k - 1], driver="gvx"
    )
    return vals, vecs


def _arpack_lowest(h, m, k, sigma):
    rng = np.random.default_rng(_V0_SEED)
    v0 = rng.standard_normal(h.shape[0])
    last_err = None
    for attempt in range(3):
        try:
            vals, vecs = spla.eigsh(
                h, k=k, M=m, sigma=sigma, which="LM", v0=v0, tol=0,
                maxiter=2000 * (attempt + 1),
            )
            order = np.argsort(vals)
            return vals[order], vecs[:, order]
        except (spla.ArpackNoConvergence, RuntimeError) as err:
            last_err = err
            sigma -= (attempt + 1) * max(1e-8, 1e-5 * abs(sigma))
    partial = getattr(last_err, "eigenvalues", None)
    raise ConvergenceError(
        f"eigensolver failed to converge: {last_err}",
        pairs=[] if partial is None else list(partial),
    )


def solve_lowest(
    h: sp.spmatrix,
    m: sp.spmatrix,
    k: int,
    tol: float = 1e-8,
    certify: bool = True,
) -> list[EigenPair]:
    """K lowest eigenpairs, ascending, M-orthonormal, residual-checked.

    ``certify`` additionally verifies by inertia counting that no eigenvalue
    below the returned window was missed; on mismatch the solve is retried
    with a wider Krylov window before giving up.
    """
    h = h.tocsc()
    m = m.tocsc()
    n = h.shape[0]
    if m.shape != h.shape:
        raise ValueError("H and M dimensions differ")
    if not 0 < k < n:
        raise ValueError(f"need 0 < K < dimension, got K={k}, n={n}")

    norm_h = float(np.max(np.abs(h).sum(axis=1)))
    buffer = 0 if n <= k + 1 else min(n - 1 - k, max(4, k // 20))
    for attempt in range(3):
        k_req = min(n - 1, k + buffer * (attempt + 1)) if n > 2 else k
        if n <= _DENSE_CUTOFF or k_req >= n - 1:
            vals, vecs = _dense_lowest(h, m, min(n, k_req + 1))
        else:
            sigma0 = lower_bound(h, m)
            sigma0 -= max(1e-10, 1e-6 * abs(sigma0)) + 1e-12 * norm_h
            vals, vecs = _arpack_lowest(h, m, k_req, sigma0)
        vecs = _canonical_signs(m_orthonormalize(vecs, m))
        if not certify or len(vals) <= k:
            break
        # pick the widest relative gap in the buffer zone as the counting cut
        gaps = vals[k:] - vals[k - 1:len(vals) - 1]
        j = int(np.argmax(gaps)) + k
        e_star = 0.5 * (vals[j - 1] + vals[j])
        try:
            found = count_below(h, m, e_star)
        except RuntimeError:
            found = count_below(h, m, e_star + 1e-10 * max(1.0, abs(e_star)))
        if found == j:
            break
        if attempt == 2:
            raise ConvergenceError(
                f"inertia check found {found} eigenvalues below {e_star}, "
                f"solver returned {j}",
                pairs=_make_pairs(vals[:k], vecs[:, :k], h, m, norm_h, tol),
            )
    pairs = _make_pairs(vals[:k], vecs[:, :k], h, m, norm_h, tol)
    _flag_unresolved_splittings(pairs, tol, norm_h)
    return pairs


def solve_near(
    h: sp.spmatrix,
    m: sp.spmatrix,
    sigma: float,
    k: int,
    tol: float = 1e-8,
) -> list[EigenPair]:
    """The k eigenpairs nearest ``sigma``, ascending; used for zooming into a
    spectral window (crossing refinement) without solving from the bottom."""
    h = h.tocsc()
    m = m.tocsc()
    n = h.shape[0]
    if not 0 < k < n:
        raise ValueError(f"need 0 < k < dimension, got k={k}, n={n}")
    norm_h = float(np.max(np.abs(h).sum(axis=1)))
    if n <= _DENSE_CUTOFF:
        vals, vecs = eigh(h.toarray(), m.toarray())
        nearest = np.argsort(np.abs(vals - sigma))[:k]
        nearest = nearest[np.argsort(vals[nearest])]
        vals, vecs = vals[nearest], vecs[:, nearest]
    else:
        vals, vecs = _arpack_lowest(h, m, k, sigma)
    vecs = _canonical_signs(m_orthonormalize(vecs, m))
    return _make_pairs(vals, vecs, h, m, norm_h, tol)


def _make_pairs(vals, vecs, h, m, norm_h, tol):
    res = h @ vecs - (m @ vecs) * vals[np.newaxis, :]
    res_norms = np.linalg.norm(res, axis=0)
    col_norms = np.linalg.norm(vecs, axis=0)
    bad = res_norms > tol * norm_h * col_norms
    if np.any(bad):
        raise ConvergenceError(
            f"{int(bad.sum())} eigenpairs exceed the residual tolerance "
            f"{tol:g} * |H| (worst {float(np.max(res_norms / (norm_h * col_norms))):.2e})",
            pairs=[
                EigenPair(float(e), v.copy(), float(r))
                for e, v, r in zip(vals, vecs.T, res_norms)
            ],
        )
    return [
        EigenPair(float(e), v.copy(), float(r))
        for e, v, r in zip(vals, vecs.T, res_norms)
    ]


def _flag_unresolved_splittings(pairs, tol, norm_h):
    floor = tol * norm_h
    for a, b in zip(pairs[:-1], pairs[1:]):
        if abs(b.energy - a.energy) < floor:
            a.splitting_certified = False
            b.splitting_certified = False


def rotate_degenerate_to_symmetry(
    pairs: list[EigenPair],
    symmetry: sp.spmatrix,
    m: sp.spmatrix,
    gap_floor: float,
) -> None:
    """Within clusters whose gaps fall below ``gap_floor``, rotate the
    eigenvectors to diagonalize a commuting symmetry (M-metric), giving a
    deterministic, symmetry-pure basis where the solver's choice is arbitrary.
    Energies and residual flags are untouched; rotations are M-orthogonal.
    """
    energies = np.array([p.energy for p in pairs])
    cluster_start = 0
    for i in range(1, len(pairs) + 1):
        if i < len(pairs) and energies[i] - energies[i - 1] < gap_floor:
            continue
        if i - cluster_start > 1:
            block = np.column_stack([p.coefficients for p in pairs[cluster_start:i]])
            p_block = block.T @ (m @ (symmetry @ block))
            p_block = 0.5 * (p_block + p_block.T)
            _, rot = np.linalg.eigh(p_block)
            rotated = _canonical_signs(block @ rot)
            for col, pair in enumerate(pairs[cluster_start:i]):
                pair.coefficients = rotated[:, col]
        cluster_start = i


# ---------------------------------------------------------------------------
# Finite-difference oracle (independent verification path)

def fd_oracle_1d(
    spec: PotentialSpec, n_grid: int, k: int, isolated_left: bool = False
) -> np.ndarray:
    """K lowest single-particle energies from a uniform-grid second-order
    finite-difference discretization (dense tridiagonal solve)."""
    length = spec.well_length if isolated_left else spec.total_length
    h = length / n_grid
    x = np.linspace(0.0, length, n_grid + 1)[1:-1]
    v = np.zeros_like(x) if isolated_left else potential_eval(x, spec)
    diag = 2.0 / h**2 + v
    off = np.full(len(x) - 1, -1.0 / h**2)
    vals = eigh_tridiagonal(diag, off, select="i", select_range=(0, k - 1))[0]
    return vals


def fd_oracle(
    spec: PotentialSpec,
    int_spec: InteractionSpec,
    u: float,
    n_grid: int,
    k: int,
    isolated_left: bool = False,
    max_dense_dim: int = 7000,
) -> np.ndarray:
    """K lowest two-boson energies from an independent finite-difference
    discretization of the same problem (symmetric sector, dense eigensolve).

    Boundary and diagonal conventions mirror the assembly: Dirichlet walls,
    contact as a diagonal line measure in arclength, hard-core as exclusion of
    the grid diagonal. Grids whose symmetric sector exceeds ``max_dense_dim``
    raise OracleSizeError instead of attempting the dense solve.
    """
    length = spec.well_length if isolated_left else spec.total_length
    h = length / n_grid
    nx = n_grid - 1
    x = np.linspace(0.0, length, n_grid + 1)[1:-1]
    v1 = np.zeros_like(x) if isolated_left else potential_eval(x, spec)
    hard = int_spec.kind is InteractionKind.HARD_COULOMB

    n_sym = nx * (nx + 1) // 2 - (nx if hard else 0)
    if n_sym > max_dense_dim:
        raise OracleSizeError(
            f"symmetric sector has {n_sym} points, above the dense budget "
            f"{max_dense_dim}"
        )

    t = -1.0 / h**2
    i = np.arange(nx)
    lap = sp.csr_matrix(
        (np.full(2 * (nx - 1), t), (np.r_[i[:-1], i[1:]], np.r_[i[1:], i[:-1]])),
        shape=(nx, nx),
    ) + sp.diags(np.full(nx, 2.0 / h**2))
    eye = sp.identity(nx, format="csr")
    h_full = sp.kron(lap + sp.diags(v1), eye) + sp.kron(eye, lap + sp.diags(v1))

    xi = np.repeat(x, nx)
    xj = np.tile(x, nx)
    r = xi - xj
    if int_spec.kind is InteractionKind.CONTACT:
        v_int = np.where(r == 0.0, np.sqrt(2.0) / h, 0.0)
    elif int_spec.kind is InteractionKind.SOFT_COULOMB:
        v_int = 1.0 / np.sqrt(r * r + int_spec.softening**2)
    else:
        v_int = np.where(r == 0.0, 0.0, 1.0 / np.where(r == 0.0, 1.0, np.abs(r)))
    h_full = h_full + sp.diags(u * v_int)

    a, b = np.triu_indices(nx)
    if hard:
        keep = a != b
        a, b = a[keep], b[keep]
    diag_pair = a == b
    kk = np.arange(len(a))
    rows = np.concatenate([a * nx + b, (b * nx + a)[~diag_pair]])
    cols = np.concatenate([kk, kk[~diag_pair]])
    vals = np.concatenate([
        np.where(diag_pair, 1.0, 1 / np.sqrt(2.0)),
        np.full((~diag_pair).sum(), 1 / np.sqrt(2.0)),
    ])
    s = sp.csr_matrix((vals, (rows, cols)), shape=(nx * nx, len(a)))
    h_sym = (s.T @ h_full @ s).toarray()
    h_sym = 0.5 * (h_sym + h_sym.T)
    vals = eigh(h_sym, subset_by_index=[0, k - 1], eigvals_only=True)
    return vals
